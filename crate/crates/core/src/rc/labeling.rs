use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Rake { i: u32, j: u32 },
    Compress { i: u32 },
}

impl Layer {
    /// Total order `R_{i,1} < R_{i,2} < ... < C_i < R_{i+1,1}`.
    pub fn key(&self) -> (u32, u32, u32) {
        match *self {
            Layer::Rake { i, j } => (i, 0, j),
            Layer::Compress { i } => (i, 1, 0),
        }
    }

    pub fn is_rake(&self) -> bool {
        matches!(self, Layer::Rake { .. })
    }

    pub fn index(&self) -> u32 {
        match *self {
            Layer::Rake { i, .. } | Layer::Compress { i } => i,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layer::Rake { i, j } => write!(f, "R{i}.{j}"),
            Layer::Compress { i } => write!(f, "C{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompLabeling {
    pub layer: Vec<Layer>,
    pub gamma: u32,
    pub ell: usize,
    pub big_l: u32,
}

impl DecompLabeling {
    /// Fills `gamma` and `big_l` from the labels actually used.
    pub fn from_layers(layer: Vec<Layer>, ell: usize) -> Self {
        let gamma = layer
            .iter()
            .filter_map(|l| match l {
                Layer::Rake { j, .. } => Some(*j),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let big_l = layer.iter().map(Layer::index).max().unwrap_or(0);
        DecompLabeling {
            layer,
            gamma,
            ell,
            big_l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LclLabel {
    R(u32),
    C(u32),
}

impl LclLabel {
    /// Position in `R_1 < C_1 < R_2 < ... < R_k`.
    pub fn rank(&self) -> u32 {
        match *self {
            LclLabel::R(i) => 2 * i - 2,
            LclLabel::C(i) => 2 * i - 1,
        }
    }

    pub fn is_rake(&self) -> bool {
        matches!(self, LclLabel::R(_))
    }
}

impl fmt::Display for LclLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LclLabel::R(i) => write!(f, "R{i}"),
            LclLabel::C(i) => write!(f, "C{i}"),
        }
    }
}

/// Labels plus a partial orientation, given as directed pairs `u -> v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcLclOutput {
    pub k: u32,
    pub label: Vec<LclLabel>,
    pub orient: Vec<(usize, usize)>,
}

/// Canonical conversion: sublayers collapse to their layer, every edge touching a
/// rake node points to the higher layer (ties toward the higher id), and
/// compress-compress edges stay unoriented.
pub fn to_lcl(tree: &Tree, lab: &DecompLabeling) -> RcLclOutput {
    let label = lab
        .layer
        .iter()
        .map(|l| match *l {
            Layer::Rake { i, .. } => LclLabel::R(i),
            Layer::Compress { i } => LclLabel::C(i),
        })
        .collect();
    let mut orient = Vec::new();
    for (u, v) in tree.edges() {
        let (lu, lv) = (lab.layer[u], lab.layer[v]);
        if !lu.is_rake() && !lv.is_rake() {
            continue;
        }
        let up = (lv.key(), tree.id(v)) > (lu.key(), tree.id(u));
        orient.push(if up { (u, v) } else { (v, u) });
    }
    RcLclOutput {
        k: lab.big_l.max(1),
        label,
        orient,
    }
}

pub fn labeling_to_text(lab: &DecompLabeling) -> String {
    let mut s = String::new();
    for (u, l) in lab.layer.iter().enumerate() {
        let _ = match l {
            Layer::Rake { i, j } => writeln!(s, "label {u} R {i} {j}"),
            Layer::Compress { i } => writeln!(s, "label {u} C {i}"),
        };
    }
    s
}

pub fn lcl_to_text(out: &RcLclOutput) -> String {
    let mut s = String::new();
    for (u, l) in out.label.iter().enumerate() {
        let _ = match l {
            LclLabel::R(i) => writeln!(s, "label {u} R {i}"),
            LclLabel::C(i) => writeln!(s, "label {u} C {i}"),
        };
    }
    for &(u, v) in &out.orient {
        let _ = writeln!(s, "orient {u} {v}");
    }
    s
}

/// Contents of a labeling file. Rake labels without a sublayer get sublayer 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLabeling {
    pub layer: Vec<Layer>,
    pub orient: Vec<(usize, usize)>,
}

impl ParsedLabeling {
    pub fn decomposition(&self, ell: usize) -> DecompLabeling {
        DecompLabeling::from_layers(self.layer.clone(), ell)
    }

    /// Uses the listed orientation, or the canonical one when none is listed.
    pub fn lcl(&self, tree: &Tree, k: Option<u32>) -> RcLclOutput {
        let dec = self.decomposition(0);
        let mut out = to_lcl(tree, &dec);
        if !self.orient.is_empty() {
            out.orient = self.orient.clone();
        }
        if let Some(k) = k {
            out.k = k;
        }
        out
    }
}

pub fn parse_labeling(text: &str, n: usize) -> Result<ParsedLabeling> {
    let mut layer: Vec<Option<Layer>> = vec![None; n];
    let mut orient = Vec::new();
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        let num = |t: Option<&&str>| -> Result<u64> {
            t.and_then(|s| s.parse().ok())
                .ok_or_else(|| err(line, "expected a number"))
        };
        match toks[0] {
            "label" => {
                let u = num(toks.get(1))? as usize;
                if u >= n {
                    return Err(err(line, "node out of range"));
                }
                let i = num(toks.get(3))? as u32;
                if i == 0 {
                    return Err(err(line, "layer index starts at 1"));
                }
                layer[u] = Some(match toks.get(2) {
                    Some(&"R") => Layer::Rake {
                        i,
                        j: if toks.len() > 4 { num(toks.get(4))? as u32 } else { 1 },
                    },
                    Some(&"C") => Layer::Compress { i },
                    _ => return Err(err(line, "expected R or C")),
                });
            }
            "orient" => {
                let u = num(toks.get(1))? as usize;
                let v = num(toks.get(2))? as usize;
                if u >= n || v >= n {
                    return Err(err(line, "node out of range"));
                }
                orient.push((u, v));
            }
            _ => return Err(err(line, "unknown keyword")),
        }
    }
    let layer = layer
        .into_iter()
        .enumerate()
        .map(|(u, l)| l.ok_or_else(|| err(0, &format!("node {u} has no label"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParsedLabeling { layer, orient })
}
