use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use locallab::alpha::{schedule, solve_alpha1, table, verify_schedule};
use locallab::bench::{
    fit_rows, parse_list, parse_results, rows_to_csv, run_algo, run_bench, Algo, AlgoParams, BigN,
    ExperimentConfig, FitColumn, IdChoice, ResultRow,
};
use locallab::generators::{
    assign_ids, gen_caterpillar2, gen_lb_graph, gen_path, gen_random_tree, gen_threelevel,
    Generated,
};
use locallab::halfcol::{parse_output, verify_halfcol};
use locallab::rc::{parse_labeling, verify_decomposition, verify_rc_lcl, Violation, DEFAULT_ELL};
use locallab::tree::{compute_levels, levels_to_text, parse_instance, to_text};
use locallab::{fmt_float, par, Error};

#[derive(Parser)]
#[command(name = "locallab", version, about = "LOCAL-model tree algorithm lab")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for the optimal phase exponents.
    SolveAlpha {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        /// Print a CSV table over these k and c values instead.
        #[arg(long)]
        table: bool,
        #[arg(long, default_value = "2,3,4,5,6")]
        ks: String,
        #[arg(long, default_value = "1,2,3,4,5")]
        cs: String,
    },
    /// Generate an instance file.
    Gen {
        #[arg(value_enum)]
        family: GenFamily,
        /// Level path lengths for lb-graph (comma-separated, level 1 first).
        #[arg(long)]
        lengths: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Three-level shape `l,l2,i`.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long, default_value = "sequential")]
        ids: String,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Level count used to tag random trees.
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run an algorithm on an instance and print its result row.
    Run {
        algo: String,
        instance: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        /// `n`, `n^c` or a number.
        #[arg(long = "N")]
        big_n: Option<String>,
        #[arg(long, default_value_t = DEFAULT_ELL)]
        ell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the per-node trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the labeling here.
        #[arg(long)]
        labeling: Option<PathBuf>,
    },
    /// Check a labeling against an instance.
    Verify {
        #[arg(value_enum)]
        problem: Problem,
        instance: PathBuf,
        labeling: PathBuf,
        /// Level count (halfcol) or label bound (rc).
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_ELL)]
        ell: usize,
    },
    /// Run an experiment config and write its results CSV.
    Bench {
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Fit rounds against n on a log-log scale.
    Fit {
        results: PathBuf,
        #[arg(long, default_value = "rounds_max")]
        y: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    LbGraph,
    Path,
    Caterpillar,
    Threelevel,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    /// The k-rake-and-compress labeling problem.
    Rc,
    /// A (gamma, ell, L)-decomposition.
    Decomp,
    /// k-hierarchical 2½-coloring.
    Halfcol,
}

enum Failure {
    Err(Error),
    Rejected(Vec<Violation>),
    Unverified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Err(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::NonTermination(_) | Error::UnsolvableWitness(_) | Error::BudgetExceeded(_) => 1,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn need<T>(x: Option<T>, what: &str) -> Result<T, Error> {
    x.ok_or_else(|| Error::Config(format!("missing --{what}")))
}

fn solve_alpha(k: usize, c: f64, tab: bool, ks: &str, cs: &str) -> Result<(), Failure> {
    if tab {
        let ks = parse_list(ks)?;
        let cs = cs
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad c `{x}`"))))
            .collect::<Result<Vec<f64>, Error>>()?;
        print!("{}", table(&ks, &cs)?);
        return Ok(());
    }
    let a1 = solve_alpha1(k, c, 1e-13)?;
    let s = schedule(k, c)?;
    println!("alpha1 {}", fmt_float(a1));
    println!("exponent {}", fmt_float(c * a1));
    println!("i0 {}", s.i0);
    for i in 1..k {
        println!("alpha {i} {} prefix {}", fmt_float(s.alpha_at(i)), fmt_float(s.prefix_at(i)));
    }
    let bad = verify_schedule(&s, 1e-8);
    for v in &bad {
        eprintln!("schedule identity failed: {v:?}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen(
    family: GenFamily,
    lengths: Option<String>,
    n: Option<usize>,
    p: Option<usize>,
    q: Option<usize>,
    shape: Option<String>,
    ids: &str,
    c: f64,
    seed: u64,
    k: u32,
) -> Result<String, Failure> {
    let g = match family {
        GenFamily::LbGraph => {
            let l = parse_list(&need(lengths, "lengths")?)?;
            gen_lb_graph(l.len(), &l)?
        }
        GenFamily::Path => gen_path(need(n, "n")?)?,
        GenFamily::Caterpillar => gen_caterpillar2(need(p, "p")?, need(q, "q")?)?,
        GenFamily::Threelevel => match parse_list(&need(shape, "shape")?)?[..] {
            [l, l2, i] => gen_threelevel(l, l2, i)?,
            _ => return Err(Error::Config("--shape takes l,l2,i".into()).into()),
        },
        GenFamily::Random => {
            let tree = gen_random_tree(need(n, "n")?, 4, seed)?;
            let level_tags = compute_levels(&tree, k).level;
            Generated { tree, level_tags }
        }
    };
    let ids: IdChoice = ids.parse()?;
    let tree = match ids {
        IdChoice::Sequential => g.tree,
        other => assign_ids(&g.tree, other.scheme(c), seed)?,
    };
    Ok(to_text(&tree) + &levels_to_text(&g.level_tags))
}

#[allow(clippy::too_many_arguments)]
fn run(
    algo: &str,
    instance: &Path,
    k: usize,
    c: f64,
    big_n: Option<String>,
    ell: usize,
    seed: u64,
    trace: Option<PathBuf>,
    labeling: Option<PathBuf>,
) -> Result<(), Failure> {
    let algo: Algo = algo.parse()?;
    let inst = parse_instance(&read(instance)?)?;
    let params = AlgoParams {
        k,
        c,
        big_n: big_n.map(|s| s.parse::<BigN>()).transpose()?,
        ell,
    };
    let out = run_algo(algo, &inst.tree, &params, seed)?;
    if let Some(p) = trace {
        write(&p, &out.trace_csv)?;
    }
    if let Some(p) = labeling {
        write(&p, &out.labeling)?;
    }
    let row = ResultRow {
        run_id: 0,
        algo: algo.name().to_string(),
        family: instance
            .file_stem()
            .map(|s| s.to_string_lossy().replace(',', "_"))
            .unwrap_or_default(),
        n: inst.tree.n(),
        k,
        c,
        big_n: out.big_n,
        seed,
        rounds_max: out.rounds_max,
        rounds_avg: out.rounds_avg,
        verified: out.verified,
        wall_ms: 0.0,
    };
    print!("{}", rows_to_csv(&[row]));
    if !out.verified {
        return Err(Failure::Unverified("the output failed verification".into()));
    }
    Ok(())
}

fn verify(problem: Problem, instance: &Path, labeling: &Path, k: Option<u32>, ell: usize) -> Result<(), Failure> {
    let inst = parse_instance(&read(instance)?)?;
    let tree = &inst.tree;
    let text = read(labeling)?;
    let violations = match problem {
        Problem::Halfcol => {
            let out = parse_output(&text, tree.n())?;
            verify_halfcol(tree, need(k, "k")?, &out)
        }
        Problem::Decomp => verify_decomposition(tree, &parse_labeling(&text, tree.n())?.decomposition(ell)),
        Problem::Rc => verify_rc_lcl(tree, &parse_labeling(&text, tree.n())?.lcl(tree, k)),
    };
    if violations.is_empty() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Rejected(violations))
    }
}

fn bench(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = ExperimentConfig::parse(&read(config)?)?;
    let rows = match run_bench(&cfg) {
        Ok(rows) => rows,
        Err(Error::Domain(msg)) if msg.contains("invalid output") => return Err(Failure::Unverified(msg)),
        Err(e) => return Err(e.into()),
    };
    let csv = rows_to_csv(&rows);
    match out.or(cfg.output) {
        Some(p) => write(&p, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn fit(results: &Path, y: &str) -> Result<(), Failure> {
    let rows = parse_results(&read(results)?)?;
    let f = fit_rows(&rows, y.parse::<FitColumn>()?)?;
    println!("slope,intercept,r2,points");
    println!("{},{},{},{}", fmt_float(f.slope), fmt_float(f.intercept), fmt_float(f.r2), f.points);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("LOCALLAB_THREADS").ok().and_then(|s| s.parse().ok());
    par::init_threads(threads);
    let result = match cli.cmd {
        Cmd::SolveAlpha { k, c, table, ks, cs } => solve_alpha(k, c, table, &ks, &cs),
        Cmd::Gen {
            family,
            lengths,
            n,
            p,
            q,
            shape,
            ids,
            c,
            seed,
            k,
            out,
        } => gen(family, lengths, n, p, q, shape, &ids, c, seed, k).and_then(|t| Ok(write(&out, &t)?)),
        Cmd::Run {
            algo,
            instance,
            k,
            c,
            big_n,
            ell,
            seed,
            trace,
            labeling,
        } => run(&algo, &instance, k, c, big_n, ell, seed, trace, labeling),
        Cmd::Verify {
            problem,
            instance,
            labeling,
            k,
            ell,
        } => verify(problem, &instance, &labeling, k, ell),
        Cmd::Bench { config, out } => bench(&config, out),
        Cmd::Fit { results, y } => fit(&results, &y),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Rejected(vs)) => {
            for v in &vs {
                println!("violation node {}: {}", v.node, v.rule);
            }
            ExitCode::from(3)
        }
        Err(Failure::Unverified(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
