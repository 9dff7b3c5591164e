//! The k-hierarchical 2½-coloring problem: checker, algorithms and the half-log.

mod algos;
mod fast;
mod friendly;
mod halflog;
mod view;

pub use algos::{
    algo_id_promise, algo_known_n, algo_rand_k2, algo_rand_k3, condition2_exponent, HalfColAlgo,
    HalfColRun, OwnRule,
};
pub use friendly::{is_friendly, q_set, union_size};
pub use halflog::{build_halflog, HalfLog};
pub use view::HalfColProgram;

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rc::Violation;
use crate::tree::{compute_levels, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfLabel {
    B,
    W,
    E,
    D,
}

impl HalfLabel {
    pub fn is_color(&self) -> bool {
        matches!(self, HalfLabel::B | HalfLabel::W)
    }
}

impl fmt::Display for HalfLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            HalfLabel::B => "B",
            HalfLabel::W => "W",
            HalfLabel::E => "E",
            HalfLabel::D => "D",
        };
        f.write_str(c)
    }
}

impl std::str::FromStr for HalfLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "B" => Ok(HalfLabel::B),
            "W" => Ok(HalfLabel::W),
            "E" => Ok(HalfLabel::E),
            "D" => Ok(HalfLabel::D),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

pub fn verify_halfcol(tree: &Tree, k: u32, out: &[HalfLabel]) -> Vec<Violation> {
    let n = tree.n();
    let mut v_out = Vec::new();
    if out.len() != n {
        v_out.push(Violation {
            node: 0,
            rule: "output size differs from the tree".into(),
        });
        return v_out;
    }
    let levels = compute_levels(tree, k);
    let lvl = &levels.level;
    let mut push = |node, rule: String| v_out.push(Violation { node, rule });
    for v in 0..n {
        let l = lvl[v];
        if levels.is_remainder(v) {
            if out[v] != HalfLabel::D {
                push(v, format!("remainder node labeled {}", out[v]));
            }
            continue;
        }
        if l == k && out[v] == HalfLabel::D {
            push(v, "D at the top level".into());
        }
        if l == 1 && out[v] == HalfLabel::E {
            push(v, "E at level 1".into());
        }
        for &u in tree.neighbors(v) {
            if lvl[u] != l || u < v {
                continue;
            }
            let clash = matches!(
                (out[v], out[u]),
                (HalfLabel::B, HalfLabel::B)
                    | (HalfLabel::W, HalfLabel::W)
                    | (HalfLabel::B | HalfLabel::W, HalfLabel::D)
                    | (HalfLabel::D, HalfLabel::B | HalfLabel::W)
            );
            if clash {
                push(v, format!("{} next to {} at level {l} (node {u})", out[v], out[u]));
            }
        }
        if out[v] == HalfLabel::E
            && !tree
                .neighbors(v)
                .iter()
                .any(|&u| lvl[u] < l && out[u] != HalfLabel::D)
        {
            push(v, "E without a lower neighbour labeled B, W or E".into());
        }
    }
    v_out
}

pub fn output_to_text(out: &[HalfLabel]) -> String {
    let mut s = String::new();
    for (u, l) in out.iter().enumerate() {
        let _ = writeln!(s, "out {u} {l}");
    }
    s
}

pub fn parse_output(text: &str, n: usize) -> Result<Vec<HalfLabel>> {
    let mut out = vec![None; n];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line, msg };
        if toks[0] != "out" || toks.len() != 3 {
            return Err(bad("expected `out <u> <label>`".into()));
        }
        let u: usize = toks[1].parse().map_err(|_| bad("bad node".into()))?;
        if u >= n {
            return Err(bad(format!("node {u} out of range")));
        }
        out[u] = Some(toks[2].parse().map_err(bad)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(u, l)| {
            l.ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("node {u} has no label"),
            })
        })
        .collect()
}
