//! Experiment configs, the algorithm and instance registries, sweeps and scaling fits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::alpha::{schedule, AlphaSchedule};
use crate::error::{Error, Result};
use crate::generators::{
    assign_ids, gen_caterpillar2, gen_lb_graph, gen_path, gen_random_tree, id_range, IdScheme,
};
use crate::halfcol::{build_halflog, output_to_text, verify_halfcol, HalfColAlgo, HalfLog};
use crate::rc::{
    decompose_knuth_io, decompose_known_n, decompose_log, decompose_poly_n, labeling_to_text,
    verify_decomposition, DEFAULT_ELL,
};
use crate::sim::{Knowledge, KnowledgeModel};
use crate::tree::{compute_levels, Tree};
use crate::{fmt_float, par};

pub const ALGORITHMS: &[&str] = &[
    "rc-known-n",
    "rc-log",
    "rc-poly-n",
    "rc-knuth-io",
    "halfcol-known-n",
    "halfcol-id",
    "halfcol-rand-k2",
    "halfcol-rand-k3",
];

pub const FAMILIES: &[&str] = &["path", "lb-graph", "caterpillar", "random"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    RcKnownN,
    RcLog,
    RcPolyN,
    RcKnuthIo,
    HalfcolKnownN,
    HalfcolId,
    HalfcolRandK2,
    HalfcolRandK3,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rc-known-n" => Algo::RcKnownN,
            "rc-log" => Algo::RcLog,
            "rc-poly-n" => Algo::RcPolyN,
            "rc-knuth-io" => Algo::RcKnuthIo,
            "halfcol-known-n" => Algo::HalfcolKnownN,
            "halfcol-id" => Algo::HalfcolId,
            "halfcol-rand-k2" => Algo::HalfcolRandK2,
            "halfcol-rand-k3" => Algo::HalfcolRandK3,
            _ => return Err(Error::Config(format!("unknown algorithm `{s}`"))),
        })
    }
}

impl Algo {
    pub fn name(self) -> &'static str {
        ALGORITHMS[self as usize]
    }

    pub fn randomized(self) -> bool {
        matches!(self, Algo::HalfcolRandK2 | Algo::HalfcolRandK3)
    }

    /// Whether the algorithm reads an upper bound `N`.
    pub fn needs_big_n(self) -> bool {
        matches!(self, Algo::RcPolyN | Algo::RcKnuthIo)
    }
}

/// How `N` is chosen from the instance size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BigN {
    /// `N = n`.
    N,
    /// `N = n^c`, saturating.
    NPowC,
    Fixed(u64),
}

impl FromStr for BigN {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(BigN::N),
            "n^c" => Ok(BigN::NPowC),
            _ => s
                .parse()
                .map(BigN::Fixed)
                .map_err(|_| Error::Config(format!("bad N `{s}`"))),
        }
    }
}

impl BigN {
    pub fn resolve(self, n: usize, c: f64) -> u64 {
        match self {
            BigN::N => n as u64,
            BigN::NPowC => id_range(n, c).max(n as u64),
            BigN::Fixed(x) => x,
        }
    }
}

/// Path lengths for the lower-bound family.
#[derive(Debug, Clone, PartialEq)]
pub enum Lengths {
    /// `ceil(n^{1/k})` at every level.
    Uniform,
    /// `ceil(n^{alpha_i})` below the top, `ceil(n^{1 - A_{k-1}})` at the top.
    Alpha,
    Explicit(Vec<usize>),
}

impl FromStr for Lengths {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Lengths::Uniform),
            "alpha" => Ok(Lengths::Alpha),
            _ => parse_list(s).map(Lengths::Explicit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdChoice {
    Sequential,
    Random,
    Monotone,
}

impl FromStr for IdChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(IdChoice::Sequential),
            "random" => Ok(IdChoice::Random),
            "monotone" => Ok(IdChoice::Monotone),
            _ => Err(Error::Config(format!("unknown id scheme `{s}`"))),
        }
    }
}

impl IdChoice {
    pub fn scheme(self, c: f64) -> IdScheme {
        match self {
            IdChoice::Sequential => IdScheme::Sequential,
            IdChoice::Random => IdScheme::RandomPermutation { c },
            IdChoice::Monotone => IdScheme::MonotoneAlongPaths { c },
        }
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("bad number `{s}`")))
}

fn parse_count(s: &str) -> Result<usize> {
    let x = parse_num(s)?;
    if x < 0.0 || x.fract() != 0.0 {
        return Err(Error::Config(format!("bad count `{s}`")));
    }
    Ok(x as usize)
}

/// Comma-separated counts; `1e3` notation is accepted.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(parse_count)
        .collect()
}

/// Comma-separated seeds or ranges `a..b`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse_count(a)? as u64, parse_count(b)? as u64);
            out.extend(a..b);
        } else {
            out.push(parse_count(part)? as u64);
        }
    }
    Ok(out)
}

/// Instance family with its size parameter `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path,
    LbGraph,
    /// Spine of `ceil(n / ln n)` nodes with legs of `ceil(5 ln n)` nodes.
    Caterpillar,
    Random,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "path" => Family::Path,
            "lb-graph" => Family::LbGraph,
            "caterpillar" => Family::Caterpillar,
            "random" => Family::Random,
            _ => return Err(Error::Config(format!("unknown family `{s}`"))),
        })
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        FAMILIES[self as usize]
    }
}

/// Lower-bound lengths `ceil(n^{alpha_i})`, topped by `ceil(n^{1 - A_{k-1}})`.
pub fn alpha_lengths(s: &AlphaSchedule, n: usize) -> Vec<usize> {
    let nf = n as f64;
    let mut l: Vec<usize> = (1..s.k)
        .map(|i| nf.powf(s.alpha_at(i)).ceil() as usize)
        .collect();
    l.push(nf.powf(1.0 - s.prefix_at(s.k - 1)).ceil().max(1.0) as usize);
    l
}

pub fn caterpillar_shape(n: usize) -> (usize, usize) {
    let ln = (n.max(3) as f64).ln();
    ((n as f64 / ln).ceil() as usize, (5.0 * ln).ceil() as usize)
}

/// Builds a family member of nominal size `n` (the actual size may differ).
pub fn build_instance(family: Family, n: usize, k: usize, c: f64, lengths: &Lengths, seed: u64) -> Result<Tree> {
    Ok(match family {
        Family::Path => gen_path(n)?.tree,
        Family::Caterpillar => {
            let (p, q) = caterpillar_shape(n);
            gen_caterpillar2(p, q)?.tree
        }
        Family::Random => gen_random_tree(n, 4, seed)?,
        Family::LbGraph => {
            let l = match lengths {
                Lengths::Uniform => vec![(n as f64).powf(1.0 / k as f64).ceil() as usize; k],
                Lengths::Alpha => alpha_lengths(&schedule(k, c)?, n),
                Lengths::Explicit(l) => l.clone(),
            };
            gen_lb_graph(l.len(), &l)?.tree
        }
    })
}

/// Parameters shared by every algorithm.
#[derive(Debug, Clone)]
pub struct AlgoParams {
    pub k: usize,
    pub c: f64,
    pub big_n: Option<BigN>,
    pub ell: usize,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            k: 2,
            c: 2.0,
            big_n: None,
            ell: DEFAULT_ELL,
        }
    }
}

/// A verified (or rejected) run of one algorithm on one instance.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rounds_max: usize,
    pub rounds_avg: f64,
    pub verified: bool,
    pub big_n: Option<u64>,
    /// SimTrace CSV.
    pub trace_csv: String,
    /// Labeling in the verifier's text format.
    pub labeling: String,
}

thread_local! {
    static HALFLOG: std::cell::OnceCell<HalfLog> = const { std::cell::OnceCell::new() };
}

fn default_halflog() -> Result<HalfLog> {
    HALFLOG.with(|h| {
        if let Some(x) = h.get() {
            return Ok(x.clone());
        }
        let x = build_halflog(std::f64::consts::E, 1e7, 1e-10)?;
        let _ = h.set(x.clone());
        Ok(x)
    })
}

pub fn run_algo(algo: Algo, tree: &Tree, p: &AlgoParams, seed: u64) -> Result<RunOutcome> {
    let rc = |d: crate::rc::Decomposition, big_n: Option<u64>| RunOutcome {
        rounds_max: d.trace.rounds_max,
        rounds_avg: d.trace.rounds_avg,
        verified: verify_decomposition(tree, &d.labeling).is_empty(),
        big_n,
        trace_csv: d.trace.to_csv(tree, None),
        labeling: labeling_to_text(&d.labeling),
    };
    let upper = || -> Result<(KnowledgeModel, u64)> {
        let b = p
            .big_n
            .ok_or_else(|| Error::KnowledgeViolation("this algorithm needs N".into()))?
            .resolve(tree.n(), p.c);
        let m = KnowledgeModel::deterministic(Knowledge::UpperBound { big_n: b, c: p.c });
        Ok((m, b))
    };
    let hc = match algo {
        Algo::RcKnownN => return Ok(rc(decompose_known_n(tree, p.k, p.ell)?, None)),
        Algo::RcLog => return Ok(rc(decompose_log(tree, p.k, p.ell)?, None)),
        Algo::RcPolyN => {
            let (m, b) = upper()?;
            return Ok(rc(decompose_poly_n(tree, &m, &schedule(p.k, p.c)?, p.ell)?, Some(b)));
        }
        Algo::RcKnuthIo => {
            let (m, b) = upper()?;
            return Ok(rc(decompose_knuth_io(tree, p.k, &m, p.ell)?, Some(b)));
        }
        Algo::HalfcolKnownN => HalfColAlgo::known_n(p.k as u32, tree.n()),
        Algo::HalfcolId => HalfColAlgo::id_promise(&schedule(p.k, p.c)?),
        Algo::HalfcolRandK2 => HalfColAlgo::rand_k2(),
        Algo::HalfcolRandK3 => HalfColAlgo::rand_k3(default_halflog()?),
    };
    let r = hc.run(tree, seed)?;
    Ok(RunOutcome {
        rounds_max: r.trace.rounds_max,
        rounds_avg: r.trace.rounds_avg,
        verified: verify_halfcol(tree, hc.k, &r.output).is_empty(),
        big_n: None,
        trace_csv: r.trace.to_csv(tree, Some(&r.levels.level)),
        labeling: output_to_text(&r.output),
    })
}

/// One experiment, read from a flat `key = value` file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub family: Family,
    pub params: AlgoParams,
    pub lengths: Lengths,
    pub ids: IdChoice,
    pub n_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    /// Record wall-clock time; off by default so that output is reproducible.
    pub wall_clock: bool,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Parse {
                line: i + 1,
                msg: "expected key = value".into(),
            })?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate key `{}`", k.trim()),
                });
            }
        }
        let mut take = |key: &str| kv.remove(key);
        let algo: Algo = take("algo")
            .ok_or_else(|| Error::Config("missing `algo`".into()))?
            .parse()?;
        let family: Family = take("family")
            .ok_or_else(|| Error::Config("missing `family`".into()))?
            .parse()?;
        let mut params = AlgoParams::default();
        if let Some(v) = take("k") {
            params.k = parse_count(&v)?;
        }
        if let Some(v) = take("c") {
            params.c = parse_num(&v)?;
        }
        if let Some(v) = take("ell") {
            params.ell = parse_count(&v)?;
        }
        params.big_n = take("N").map(|v| v.parse()).transpose()?;
        if algo.needs_big_n() && params.big_n.is_none() {
            return Err(Error::Config(format!("`{}` needs `N`", algo.name())));
        }
        let lengths = take("lengths").map(|v| v.parse()).transpose()?.unwrap_or(Lengths::Uniform);
        let ids = take("ids").map(|v| v.parse()).transpose()?.unwrap_or(IdChoice::Sequential);
        let n_grid = parse_list(&take("n_grid").ok_or_else(|| Error::Config("missing `n_grid`".into()))?)?;
        let seeds = take("seeds").map(|v| parse_seeds(&v)).transpose()?.unwrap_or_default();
        let output = take("output").map(PathBuf::from);
        let wall_clock = match take("wall_clock").as_deref() {
            None | Some("false") => false,
            Some("true") => true,
            Some(v) => return Err(Error::Config(format!("bad wall_clock `{v}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        if params.k < 1 || params.c < 1.0 {
            return Err(Error::Config("need k >= 1 and c >= 1".into()));
        }
        Ok(ExperimentConfig {
            algo,
            family,
            params,
            lengths,
            ids,
            n_grid,
            seeds,
            output,
            wall_clock,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub run_id: usize,
    pub algo: String,
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub c: f64,
    /// `N` handed to the algorithm, if any.
    pub big_n: Option<u64>,
    pub seed: u64,
    pub rounds_max: usize,
    pub rounds_avg: f64,
    pub verified: bool,
    pub wall_ms: f64,
}

pub const CSV_HEADER: &str = "run_id,algo,family,n,k,c,N,seed,rounds_max,rounds_avg,verified,wall_ms";

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.algo,
            self.family,
            self.n,
            self.k,
            fmt_float(self.c),
            self.big_n.map(|x| x.to_string()).unwrap_or_default(),
            self.seed,
            self.rounds_max,
            fmt_float(self.rounds_avg),
            self.verified,
            fmt_float(self.wall_ms)
        )
    }

    pub fn from_csv(line: &str, lineno: usize) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: lineno,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(bad("expected 12 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad("bad integer"));
        Ok(ResultRow {
            run_id: int(f[0])? as usize,
            algo: f[1].to_string(),
            family: f[2].to_string(),
            n: int(f[3])? as usize,
            k: int(f[4])? as usize,
            c: num(f[5])?,
            big_n: if f[6].is_empty() { None } else { Some(int(f[6])?) },
            seed: int(f[7])?,
            rounds_max: int(f[8])? as usize,
            rounds_avg: num(f[9])?,
            verified: f[10].parse().map_err(|_| bad("bad boolean"))?,
            wall_ms: num(f[11])?,
        })
    }
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.to_csv());
    }
    s
}

pub fn parse_results(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing results header".into(),
            })
        }
    }
    lines.map(|(i, l)| ResultRow::from_csv(l.trim(), i + 1)).collect()
}

/// Runs every `(n, seed)` grid point; rows come out ordered by `n`, then seed.
/// A run whose output fails verification is an error.
pub fn run_bench(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut points: Vec<(usize, u64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    points.sort_unstable();
    points.dedup();
    let results = par::map(&points, |&(n, seed)| -> Result<ResultRow> {
        let base = build_instance(cfg.family, n, cfg.params.k, cfg.params.c, &cfg.lengths, seed)?;
        let tree = match cfg.ids {
            IdChoice::Sequential => base,
            other => assign_ids(&base, other.scheme(cfg.params.c), seed)?,
        };
        let start = Instant::now();
        let out = run_algo(cfg.algo, &tree, &cfg.params, seed)?;
        let wall_ms = if cfg.wall_clock {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        Ok(ResultRow {
            run_id: 0,
            algo: cfg.algo.name().to_string(),
            family: cfg.family.name().to_string(),
            n: tree.n(),
            k: cfg.params.k,
            c: cfg.params.c,
            big_n: out.big_n,
            seed,
            rounds_max: out.rounds_max,
            rounds_avg: out.rounds_avg,
            verified: out.verified,
            wall_ms,
        })
    });
    let mut rows = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        let mut row = r?;
        row.run_id = i;
        rows.push(row);
    }
    if let Some(r) = rows.iter().find(|r| !r.verified) {
        return Err(Error::Domain(format!(
            "run {} (n = {}, seed = {}) produced an invalid output",
            r.run_id, r.n, r.seed
        )));
    }
    Ok(rows)
}

/// Least-squares fit of `ln y = slope * ln x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<Fit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::InsufficientData { need: 3, got: xs.len() });
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::Domain("fit needs positive values".into()));
    }
    let m = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(Fit {
        slope,
        intercept,
        r2,
        points: points.len(),
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

/// Which result column is fitted against `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitColumn {
    RoundsMax,
    RoundsAvg,
}

impl FromStr for FitColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rounds_max" => Ok(FitColumn::RoundsMax),
            "rounds_avg" => Ok(FitColumn::RoundsAvg),
            _ => Err(Error::Config(format!("cannot fit column `{s}`"))),
        }
    }
}

/// Fits the column against `n`; rows of randomized algorithms are reduced to per-`n` medians.
pub fn fit_rows(rows: &[ResultRow], column: FitColumn) -> Result<Fit> {
    let y = |r: &ResultRow| match column {
        FitColumn::RoundsMax => r.rounds_max as f64,
        FitColumn::RoundsAvg => r.rounds_avg,
    };
    let randomized = rows
        .iter()
        .any(|r| r.algo.parse::<Algo>().is_ok_and(Algo::randomized));
    let points: Vec<(f64, f64)> = if randomized {
        let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for r in rows {
            by_n.entry(r.n).or_default().push(y(r));
        }
        by_n.into_iter()
            .map(|(n, mut ys)| (n as f64, median(&mut ys)))
            .collect()
    } else {
        rows.iter().map(|r| (r.n as f64, y(r))).collect()
    };
    fit_loglog(&points)
}

/// Level histogram line used by `gen`: `levels 1:<count> 2:<count> ...`.
pub fn level_summary(tree: &Tree, k: u32) -> String {
    let lv = compute_levels(tree, k);
    let mut s = String::from("levels");
    for j in 1..=k + 1 {
        let _ = write!(s, " {j}:{}", lv.count(j));
    }
    s
}
