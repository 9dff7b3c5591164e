//! Global evaluation of the per-level rules, producing the same decision rounds
//! and labels as the node program run in the synchronous engine.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::algos::{ColorPolicy, HalfColAlgo, OwnRule};
use super::friendly::q_set_unchecked;
use super::HalfLabel;
use crate::error::{Error, Result};
use crate::par;
use crate::tape::random_tape;
use crate::tree::{level_paths, Levels, Tree};

const NEVER: usize = usize::MAX;

type Decided = (usize, HalfLabel, usize, u64);

pub(crate) fn evaluate(
    algo: &HalfColAlgo,
    tree: &Tree,
    levels: &Levels,
    seed: u64,
) -> Result<(Vec<HalfLabel>, Vec<usize>, Vec<u64>)> {
    let n = tree.n();
    let k = algo.k;
    let mut label = vec![HalfLabel::D; n];
    let mut round = vec![0usize; n];
    let mut aux = vec![0u64; n];
    for v in 0..n {
        if levels.is_remainder(v) {
            round[v] = k as usize - 1;
        }
    }
    for j in 1..=k {
        let paths = level_paths(tree, levels, j);
        let ctx = Ctx {
            algo,
            tree,
            levels,
            seed,
            j,
            label: &label,
            round: &round,
            aux: &aux,
        };
        let results = par::map(&paths, |p| ctx.solve_path(p));
        for r in results {
            for (v, l, t, x) in r? {
                label[v] = l;
                round[v] = t;
                aux[v] = x;
            }
        }
    }
    Ok((label, round, aux))
}

struct Ctx<'a> {
    algo: &'a HalfColAlgo,
    tree: &'a Tree,
    levels: &'a Levels,
    seed: u64,
    j: u32,
    label: &'a [HalfLabel],
    round: &'a [usize],
    aux: &'a [u64],
}

/// Per-node data of one candidate segment.
struct Seg<'a> {
    nodes: &'a [usize],
    act: Vec<usize>,
    left: Option<usize>,
    right: Option<usize>,
}

impl Ctx<'_> {
    fn lower(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let l = self.levels.level[v];
        self.tree
            .neighbors(v)
            .iter()
            .copied()
            .filter(move |&u| self.levels.level[u] < l)
    }

    fn activation(&self, v: usize) -> usize {
        self.lower(v)
            .map(|u| self.round[u] + 1)
            .max()
            .unwrap_or(0)
            .max(self.j as usize - 1)
    }

    fn exempt(&self, v: usize) -> bool {
        self.lower(v).any(|u| self.label[u] != HalfLabel::D)
    }

    /// Largest decline size among level-(j-1) neighbours.
    fn nlow(&self, v: usize) -> u64 {
        self.tree
            .neighbors(v)
            .iter()
            .filter(|&&u| self.levels.level[u] + 1 == self.j)
            .map(|&u| self.aux[u])
            .max()
            .unwrap_or(0)
    }

    /// Boundary item beyond a path end: knowing the higher neighbours are not at level `j`.
    fn end_item(&self, v: usize) -> Option<usize> {
        self.tree
            .neighbors(v)
            .iter()
            .any(|&u| self.levels.level[u] > self.j)
            .then_some(self.j as usize - 1)
    }

    fn solve_path(&self, path: &[usize]) -> Result<Vec<Decided>> {
        let m = path.len();
        let act: Vec<usize> = path.iter().map(|&v| self.activation(v)).collect();
        let ex: Vec<bool> = path.iter().map(|&v| self.exempt(v)).collect();
        let mut out = Vec::with_capacity(m);
        let mut p = 0;
        while p < m {
            if ex[p] {
                out.push((path[p], HalfLabel::E, act[p], 0));
                p += 1;
                continue;
            }
            let start = p;
            while p < m && !ex[p] {
                p += 1;
            }
            let seg = Seg {
                nodes: &path[start..p],
                act: act[start..p].to_vec(),
                left: if start > 0 {
                    Some(act[start - 1])
                } else {
                    self.end_item(path[start])
                },
                right: if p < m {
                    Some(act[p])
                } else {
                    self.end_item(path[p - 1])
                },
            };
            out.extend(self.solve_segment(&seg)?);
        }
        Ok(out)
    }
}

/// `out[p] = max_q (x[q] + |p - q|)`.
fn spread_max(x: &[usize]) -> Vec<usize> {
    let m = x.len();
    let mut fwd = x.to_vec();
    for p in 1..m {
        fwd[p] = fwd[p].max(fwd[p - 1] + 1);
    }
    let mut bwd = x.to_vec();
    for p in (0..m.saturating_sub(1)).rev() {
        bwd[p] = bwd[p].max(bwd[p + 1] + 1);
    }
    fwd.iter().zip(&bwd).map(|(a, b)| *a.max(b)).collect()
}

/// Round at which each node knows its whole segment and both boundaries.
pub(crate) fn boundary_times(act: &[usize], left: Option<usize>, right: Option<usize>) -> Vec<usize> {
    let m = act.len();
    let mut b = spread_max(act);
    for (p, bp) in b.iter_mut().enumerate() {
        if let Some(t) = left {
            *bp = (*bp).max(t + p + 1);
        }
        if let Some(t) = right {
            *bp = (*bp).max(t + m - p);
        }
    }
    b
}

pub(crate) fn color_times(policy: ColorPolicy, b: &[usize]) -> Vec<usize> {
    let m = b.len();
    match policy {
        ColorPolicy::Immediate => b.to_vec(),
        ColorPolicy::Safe => spread_max(b),
        ColorPolicy::AfterScan => (0..m)
            .map(|p| b[p].max(p.max(m - 1 - p) + m))
            .collect(),
    }
}

/// State of the explored segment `P` for the growth-based rules.
#[derive(Default)]
struct Explored {
    len: usize,
    max_id: u64,
    marked: bool,
    nsum: u64,
}

/// Earliest round `>= t` at which the rule fires with `P` fixed, and the decline size.
pub(crate) fn fire_time(rule: &OwnRule, t: usize, st: (usize, u64, bool, u64)) -> Option<(usize, u64)> {
    let (len, max_id, marked, nsum) = st;
    match *rule {
        OwnRule::LongPath { bound } => (len > bound).then_some((t, len as u64)),
        OwnRule::Mark => marked.then_some((t, len as u64)),
        OwnRule::MaxIdRound { alpha1 } => {
            let thr = alpha1 * (max_id.max(1) as f64).ln();
            let mut i = (thr.exp().floor() as usize).saturating_sub(1).max(t).max(1);
            while (i as f64).ln() <= thr {
                i += 1;
            }
            Some((i, i as u64))
        }
        OwnRule::DeclineSum { exponent } => {
            ((len as f64).powf(exponent) > nsum as f64).then_some((t, nsum))
        }
        OwnRule::Never | OwnRule::Friendly { .. } => None,
    }
}

impl Ctx<'_> {
    fn mark(&self, v: usize) -> bool {
        random_tape(self.seed, self.tree.id(v)).mark()
    }

    fn own_growth(&self, rule: &OwnRule, seg: &Seg<'_>, p: usize, cutoff: usize) -> Option<(usize, u64)> {
        let m = seg.nodes.len();
        let mut st = Explored::default();
        let add = |st: &mut Explored, q: usize| {
            let v = seg.nodes[q];
            st.len += 1;
            st.max_id = st.max_id.max(self.tree.id(v));
            if matches!(rule, OwnRule::Mark) {
                st.marked |= self.mark(v);
            }
            if matches!(rule, OwnRule::DeclineSum { .. }) {
                st.nsum += self.nlow(v);
            }
        };
        add(&mut st, p);
        let (mut l, mut r) = (p, p);
        let mut reach_l = seg.act[p];
        let mut reach_r = seg.act[p];
        let mut t = seg.act[p];
        loop {
            let next_l = (l > 0).then(|| reach_l.max(seg.act[l - 1] + (p - l + 1)));
            let next_r = (r + 1 < m).then(|| reach_r.max(seg.act[r + 1] + (r + 1 - p)));
            let next = next_l.unwrap_or(NEVER).min(next_r.unwrap_or(NEVER));
            if let Some((tf, nv)) = fire_time(rule, t, (st.len, st.max_id, st.marked, st.nsum)) {
                if tf < next && tf <= cutoff {
                    return Some((tf, nv));
                }
            }
            if next == NEVER || next > cutoff {
                return None;
            }
            t = next;
            if next_l == Some(next) {
                l -= 1;
                reach_l = next;
                add(&mut st, l);
            }
            if next_r == Some(next) {
                r += 1;
                reach_r = next;
                add(&mut st, r);
            }
        }
    }

    /// Earliest round at which each node sees a friendly subpath of its segment.
    fn own_friendly(&self, factor: f64, seg: &Seg<'_>, cutoff: &[usize]) -> Vec<Option<(usize, u64)>> {
        let m = seg.nodes.len();
        let f = self.algo.friendly_f(factor);
        let level = &self.levels.level;
        let mut best = vec![None::<(usize, u64)>; m];
        for i in 1..=m {
            let thr = i as f64 * f(i as f64);
            let sizes: Vec<usize> = seg
                .nodes
                .iter()
                .map(|&v| q_set_unchecked(self.tree, level, v, i).len())
                .collect();
            for l in 0..=m - i {
                let r = l + i - 1;
                // Each level-1 node lies in at most two Q-sets.
                let sum: usize = sizes[l..=r].iter().sum();
                if sum as f64 >= 2.0 * thr {
                    continue;
                }
                let mut all: Vec<usize> = seg.nodes[l..=r]
                    .iter()
                    .flat_map(|&v| q_set_unchecked(self.tree, level, v, i))
                    .collect();
                all.sort_unstable();
                all.dedup();
                if all.len() as f64 >= thr {
                    continue;
                }
                for p in 0..m {
                    let (lo, hi) = (l.min(p), r.max(p));
                    let hull = (lo..=hi)
                        .map(|q| seg.act[q] + q.abs_diff(p))
                        .max()
                        .expect("nonempty hull");
                    let t = hull.max(l.abs_diff(p).max(r.abs_diff(p)) + i);
                    if t <= cutoff[p] && best[p].is_none_or(|(bt, _)| t < bt) {
                        best[p] = Some((t, 0));
                    }
                }
            }
        }
        best
    }
}

/// Decline times along a segment: own firing times relaxed through neighbours,
/// a node learning of a declined neighbour one round later but never before its
/// own activation. Ties prefer inherited sizes, the larger one first.
pub(crate) fn propagate(own: &[Option<(usize, u64)>], act: &[usize]) -> Vec<Option<(usize, u64)>> {
    let m = own.len();
    // (time, inherited, size)
    let mut best: Vec<Option<(usize, bool, u64)>> = own.iter().map(|o| o.map(|(t, x)| (t, false, x))).collect();
    let mut heap = BinaryHeap::new();
    for (p, b) in best.iter().enumerate() {
        if let Some((t, _, _)) = b {
            heap.push(Reverse((*t, p)));
        }
    }
    let mut done = vec![false; m];
    while let Some(Reverse((t, p))) = heap.pop() {
        if done[p] || best[p].map(|b| b.0) != Some(t) {
            continue;
        }
        done[p] = true;
        let x = best[p].expect("settled").2;
        for q in [p.wrapping_sub(1), p + 1] {
            if q >= m || done[q] {
                continue;
            }
            let cand = act[q].max(t + 1);
            let better = match best[q] {
                None => true,
                Some((bt, inh, bx)) => cand < bt || (cand == bt && (!inh || x > bx)),
            };
            if better {
                best[q] = Some((cand, true, x));
                heap.push(Reverse((cand, q)));
            }
        }
    }
    best.into_iter().map(|b| b.map(|(t, _, x)| (t, x))).collect()
}

impl Ctx<'_> {
    fn solve_segment(&self, seg: &Seg<'_>) -> Result<Vec<Decided>> {
        let m = seg.nodes.len();
        let j = self.j as usize;
        let rule = &self.algo.rules[j - 1];
        let policy = self.algo.policy[j - 1];
        let b = boundary_times(&seg.act, seg.left, seg.right);
        let color = color_times(policy, &b);
        let cutoff = if policy == ColorPolicy::AfterScan { &color } else { &b };
        let own: Vec<Option<(usize, u64)>> = match rule {
            OwnRule::Never => vec![None; m],
            OwnRule::Friendly { factor } => self.own_friendly(*factor, seg, cutoff),
            _ => (0..m).map(|p| self.own_growth(rule, seg, p, cutoff[p])).collect(),
        };
        let decline = propagate(&own, &seg.act);
        let declined: Vec<bool> = (0..m)
            .map(|p| decline[p].is_some_and(|(t, _)| t <= color[p]))
            .collect();
        if declined.iter().any(|&d| d) && !declined.iter().all(|&d| d) {
            return Err(Error::UnsolvableWitness(seg.nodes[0]));
        }
        if declined.first() == Some(&true) {
            return Ok((0..m)
                .map(|p| {
                    let (t, x) = decline[p].expect("declined");
                    (seg.nodes[p], HalfLabel::D, t, x)
                })
                .collect());
        }
        let black_first = self.black_at_first(seg.nodes);
        Ok((0..m)
            .map(|p| {
                let from = if black_first { p } else { m - 1 - p };
                let l = if from % 2 == 0 { HalfLabel::B } else { HalfLabel::W };
                (seg.nodes[p], l, color[p], 0)
            })
            .collect())
    }

    /// The endpoint with the lower id (or lower tape key when ids are withheld) is black.
    fn black_at_first(&self, nodes: &[usize]) -> bool {
        let (a, z) = (nodes[0], nodes[nodes.len() - 1]);
        if self.algo.model().ids_visible() {
            self.tree.id(a) <= self.tree.id(z)
        } else {
            let key = |v: usize| random_tape(self.seed, self.tree.id(v)).key();
            key(a) <= key(z)
        }
    }
}
