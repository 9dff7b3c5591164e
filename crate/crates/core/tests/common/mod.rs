//! Independent checkers and mutation helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use locallab::halfcol::HalfLabel;
use locallab::rc::{DecompLabeling, Layer, LclLabel, RcLclOutput};
use locallab::tree::{compute_levels, Tree};
use rand::Rng;

fn order(l: Layer) -> (u32, u32, u32) {
    match l {
        Layer::Rake { i, j } => (i, 0, j),
        Layer::Compress { i } => (i, 1, 0),
    }
}

fn same_label_components(t: &Tree, same: impl Fn(usize, usize) -> bool, pick: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let n = t.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (u, v) in t.edges() {
        if pick(u) && pick(v) && same(u, v) {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in (0..n).filter(|&v| pick(v)) {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Whether a layer assignment is a valid decomposition.
pub fn decomposition_ok(t: &Tree, lab: &DecompLabeling) -> bool {
    let layer = &lab.layer;
    if layer.len() != t.n() {
        return false;
    }
    let up = |v: usize| t.neighbors(v).iter().filter(|&&u| order(layer[u]) > order(layer[v])).count();
    for v in 0..t.n() {
        match layer[v] {
            Layer::Rake { i, j } => {
                if !(1..=lab.big_l).contains(&i) || !(1..=lab.gamma).contains(&j) {
                    return false;
                }
                if t.neighbors(v).iter().any(|&u| layer[u] == layer[v]) || up(v) > 1 {
                    return false;
                }
            }
            Layer::Compress { i } => {
                if i < 1 || i >= lab.big_l {
                    return false;
                }
            }
        }
    }
    let comps = same_label_components(t, |u, v| layer[u] == layer[v], |v| !layer[v].is_rake());
    for comp in comps {
        let inside: HashSet<usize> = comp.iter().copied().collect();
        let deg = |x: usize| t.neighbors(x).iter().filter(|u| inside.contains(u)).count();
        if comp.iter().any(|&x| deg(x) > 2) {
            return false;
        }
        if comp.len() < lab.ell || comp.len() > 2 * lab.ell {
            return false;
        }
        for &x in &comp {
            let ok = match deg(x) {
                0 => up(x) == 1 || up(x) == 2,
                1 => up(x) == 1,
                _ => up(x) == 0,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn rank(l: LclLabel) -> u32 {
    match l {
        LclLabel::R(i) => 2 * i,
        LclLabel::C(i) => 2 * i + 1,
    }
}

/// Whether labels plus orientation satisfy the five rules.
pub fn lcl_ok(t: &Tree, o: &RcLclOutput) -> bool {
    let n = t.n();
    let label = &o.label;
    if label.len() != n {
        return false;
    }
    let in_alphabet = |l: LclLabel| match l {
        LclLabel::R(i) => i >= 1 && i <= o.k,
        LclLabel::C(i) => i >= 1 && i < o.k,
    };
    if !label.iter().all(|&l| in_alphabet(l)) {
        return false;
    }
    let mut dir: std::collections::HashMap<(usize, usize), (usize, usize)> = Default::default();
    for &(a, b) in &o.orient {
        if !t.neighbors(a).contains(&b) {
            return false;
        }
        let key = (a.min(b), a.max(b));
        if dir.insert(key, (a, b)).is_some_and(|old| old != (a, b)) {
            return false;
        }
    }
    let mut out = vec![0; n];
    for (u, v) in t.edges() {
        let rakey = matches!(label[u], LclLabel::R(_)) || matches!(label[v], LclLabel::R(_));
        match dir.get(&(u, v)) {
            Some(&(a, b)) => {
                if !rakey || rank(label[b]) < rank(label[a]) {
                    return false;
                }
                out[a] += 1;
            }
            None if rakey => return false,
            None => {}
        }
        if let (LclLabel::C(x), LclLabel::C(y)) = (label[u], label[v]) {
            if x != y {
                return false;
            }
        }
    }
    for v in 0..n {
        let cn = t.neighbors(v).iter().filter(|&&u| matches!(label[u], LclLabel::C(_))).count();
        let exempt = matches!(label[v], LclLabel::C(_)) && cn >= 2;
        if out[v] > if exempt { 0 } else { 1 } {
            return false;
        }
    }
    let comps = same_label_components(t, |u, v| label[u] == label[v], |v| matches!(label[v], LclLabel::C(_)));
    for comp in comps {
        let inside: HashSet<usize> = comp.iter().copied().collect();
        if comp.iter().any(|&x| t.neighbors(x).iter().filter(|u| inside.contains(u)).count() > 2) {
            return false;
        }
    }
    true
}

/// Whether a labeling solves the k-level problem.
pub fn halfcol_ok(t: &Tree, k: u32, out: &[HalfLabel]) -> bool {
    use HalfLabel::*;
    if out.len() != t.n() {
        return false;
    }
    let lv = compute_levels(t, k).level;
    for v in 0..t.n() {
        let l = lv[v];
        if l > k && out[v] != D {
            return false;
        }
        if (l == k && out[v] == D) || (l == 1 && out[v] == E) {
            return false;
        }
        if out[v] == E && !t.neighbors(v).iter().any(|&u| lv[u] < l && out[u] != D) {
            return false;
        }
        for &u in t.neighbors(v) {
            if lv[u] != l || u < v {
                continue;
            }
            let bad = matches!(
                (out[u], out[v]),
                (B, B) | (W, W) | (B, D) | (D, B) | (W, D) | (D, W)
            );
            if bad {
                return false;
            }
        }
    }
    true
}

/// A random layer other than `cur` with index at most `k` and sublayer at most `gamma + 1`.
pub fn mutate_layer(k: u32, gamma: u32, cur: Layer, rng: &mut impl Rng) -> Layer {
    loop {
        let cand = if k > 1 && rng.gen_bool(0.3) {
            Layer::Compress { i: rng.gen_range(1..k) }
        } else {
            Layer::Rake {
                i: rng.gen_range(1..=k),
                j: rng.gen_range(1..=gamma + 1),
            }
        };
        if cand != cur {
            return cand;
        }
    }
}

/// A random label of the `k`-level alphabet other than `cur`; needs `k >= 2`.
pub fn mutate_lcl_label(k: u32, cur: LclLabel, rng: &mut impl Rng) -> LclLabel {
    loop {
        let cand = if rng.gen_bool(0.4) {
            LclLabel::C(rng.gen_range(1..k))
        } else {
            LclLabel::R(rng.gen_range(1..=k))
        };
        if cand != cur {
            return cand;
        }
    }
}

pub fn mutate_half(cur: HalfLabel, rng: &mut impl Rng) -> HalfLabel {
    let all = [HalfLabel::B, HalfLabel::W, HalfLabel::E, HalfLabel::D];
    loop {
        let c = all[rng.gen_range(0..4)];
        if c != cur {
            return c;
        }
    }
}
