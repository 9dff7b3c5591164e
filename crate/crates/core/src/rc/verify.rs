use std::collections::HashMap;

use super::labeling::{DecompLabeling, Layer, LclLabel, RcLclOutput};
use crate::tree::Tree;

/// A violated rule with a witness node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub rule: String,
}

impl Violation {
    fn new(node: usize, rule: impl Into<String>) -> Self {
        Violation {
            node,
            rule: rule.into(),
        }
    }
}

pub fn verify_decomposition(tree: &Tree, lab: &DecompLabeling) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = tree.n();
    if lab.layer.len() != n {
        out.push(Violation::new(0, "labeling size differs from the tree"));
        return out;
    }
    let layer = &lab.layer;
    let higher = |v: usize| {
        tree.neighbors(v)
            .iter()
            .filter(|&&u| layer[u].key() > layer[v].key())
            .count()
    };
    for v in 0..n {
        match layer[v] {
            Layer::Rake { i, j } => {
                if i == 0 || i > lab.big_l || j == 0 || j > lab.gamma {
                    out.push(Violation::new(v, format!("rake label {} out of range", layer[v])));
                }
                if tree.neighbors(v).iter().any(|&u| layer[u] == layer[v]) {
                    out.push(Violation::new(v, "rake sublayer not independent"));
                }
                if higher(v) > 1 {
                    out.push(Violation::new(v, "rake node with more than one higher neighbour"));
                }
            }
            Layer::Compress { i } => {
                if i == 0 || i >= lab.big_l.max(1) {
                    out.push(Violation::new(v, format!("compress label {} out of range", layer[v])));
                }
            }
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] || layer[s].is_rake() {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut idx = 0;
        while idx < comp.len() {
            let x = comp[idx];
            idx += 1;
            for &u in tree.neighbors(x) {
                if !seen[u] && layer[u] == layer[s] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
        }
        let inner_deg =
            |x: usize| tree.neighbors(x).iter().filter(|&&u| layer[u] == layer[x]).count();
        let witness = *comp.iter().min().expect("nonempty component");
        if comp.iter().any(|&x| inner_deg(x) > 2) {
            out.push(Violation::new(witness, "compress component is not a path"));
            continue;
        }
        if comp.len() < lab.ell || comp.len() > 2 * lab.ell {
            out.push(Violation::new(
                witness,
                format!("compress path has {} nodes, outside [{}, {}]", comp.len(), lab.ell, 2 * lab.ell),
            ));
        }
        for &x in &comp {
            let h = higher(x);
            let ok = match (inner_deg(x), comp.len()) {
                (0, _) => (1..=2).contains(&h),
                (1, _) => h == 1,
                _ => h == 0,
            };
            if !ok {
                out.push(Violation::new(x, format!("compress node with {h} higher neighbours")));
            }
        }
    }
    out
}

pub fn verify_rc_lcl(tree: &Tree, o: &RcLclOutput) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = tree.n();
    if o.label.len() != n {
        out.push(Violation::new(0, "labeling size differs from the tree"));
        return out;
    }
    let label = &o.label;
    for (v, l) in label.iter().enumerate() {
        let ok = match *l {
            LclLabel::R(i) => i >= 1 && i <= o.k,
            LclLabel::C(i) => i >= 1 && i < o.k,
        };
        if !ok {
            out.push(Violation::new(v, format!("label {l} outside the alphabet for k = {}", o.k)));
        }
    }
    // Orientation per undirected edge: the head node.
    let mut head: HashMap<(usize, usize), usize> = HashMap::new();
    for &(u, v) in &o.orient {
        if !tree.neighbors(u).contains(&v) {
            out.push(Violation::new(u, format!("orientation {u}->{v} on a non-edge")));
            continue;
        }
        let key = (u.min(v), u.max(v));
        if let Some(&h) = head.get(&key) {
            if h != v {
                out.push(Violation::new(u, "edge oriented both ways"));
            }
        }
        head.insert(key, v);
    }
    let mut outdeg = vec![0usize; n];
    for (&(a, b), &h) in &head {
        let tail = if h == a { b } else { a };
        outdeg[tail] += 1;
        if label[h].rank() < label[tail].rank() {
            out.push(Violation::new(tail, format!("rule 3: {}->{} points to a lower label", tail, h)));
        }
    }
    for (u, v) in tree.edges() {
        let oriented = head.contains_key(&(u, v));
        let touches_rake = label[u].is_rake() || label[v].is_rake();
        if touches_rake && !oriented {
            out.push(Violation::new(u, format!("rule 1: edge {u}-{v} touches a rake node but is unoriented")));
        }
        if !touches_rake && oriented {
            out.push(Violation::new(u, format!("rule 1: compress edge {u}-{v} is oriented")));
        }
        if let (LclLabel::C(a), LclLabel::C(b)) = (label[u], label[v]) {
            if a != b {
                out.push(Violation::new(u, format!("rule 5: C{a} adjacent to C{b}")));
            }
        }
    }
    for v in 0..n {
        let compress_nbrs = tree
            .neighbors(v)
            .iter()
            .filter(|&&u| !label[u].is_rake())
            .count();
        let limit = if !label[v].is_rake() && compress_nbrs >= 2 { 0 } else { 1 };
        if outdeg[v] > limit {
            out.push(Violation::new(v, format!("rule 2: {} outgoing edges", outdeg[v])));
        }
        if let LclLabel::C(_) = label[v] {
            let same = tree.neighbors(v).iter().filter(|&&u| label[u] == label[v]).count();
            if same > 2 {
                out.push(Violation::new(v, "rule 4: compress label does not induce paths"));
            }
        }
    }
    out.sort_by_key(|x| x.node);
    out
}
