//! The 2½-coloring algorithms as node programs over radius-t views.

use std::collections::VecDeque;

use super::algos::{ColorPolicy, HalfColAlgo, OwnRule};
use super::fast::fire_time;
use super::HalfLabel;
use crate::sim::{Ball, Decision, Knowledge, NodeProgram};

pub struct HalfColProgram {
    algo: HalfColAlgo,
}

impl HalfColProgram {
    pub fn new(algo: HalfColAlgo) -> Self {
        HalfColProgram { algo }
    }
}

/// Levels as far as they are determined by the view.
struct ViewLevels {
    level: Vec<Option<u32>>,
    /// Largest `i` such that the node is known not to lie in levels `1..=i`.
    not_upto: Vec<u32>,
}

impl ViewLevels {
    fn new<O>(ball: &Ball<O>, k: u32) -> Self {
        let n = ball.nodes.len();
        let t = ball.radius;
        let mut level = vec![None; n];
        let mut not_upto = vec![0u32; n];
        for i in 1..=k {
            if (i - 1) as usize > t {
                break;
            }
            let horizon = t - (i - 1) as usize;
            let mut newly = Vec::new();
            for x in 0..n {
                let node = &ball.nodes[x];
                if level[x].is_some() || node.dist > horizon {
                    continue;
                }
                let removed = node
                    .nbrs
                    .iter()
                    .filter(|&&u| level[u].is_some_and(|l| l < i))
                    .count();
                if node.degree - removed <= 2 {
                    newly.push(x);
                } else {
                    not_upto[x] = i;
                }
            }
            for x in newly {
                level[x] = Some(i);
            }
        }
        for x in 0..n {
            if level[x].is_none() && not_upto[x] == k {
                level[x] = Some(k + 1);
            }
        }
        ViewLevels { level, not_upto }
    }

    /// Whether `x` is at level `j`, if known.
    fn is_level(&self, x: usize, j: u32) -> Option<bool> {
        match self.level[x] {
            Some(l) => Some(l == j),
            None if self.not_upto[x] >= j => Some(false),
            None => None,
        }
    }

    /// Whether `x` is below level `j`, if known.
    fn is_below(&self, x: usize, j: u32) -> Option<bool> {
        match self.level[x] {
            Some(l) => Some(l < j),
            None if self.not_upto[x] + 1 >= j => Some(false),
            None => None,
        }
    }

    fn is_above(&self, x: usize, j: u32) -> Option<bool> {
        match self.level[x] {
            Some(l) => Some(l > j),
            None if self.not_upto[x] >= j => Some(true),
            None => None,
        }
    }
}

/// A level-`j` node whose activation is visible.
#[derive(Clone)]
struct Rec {
    x: usize,
    dist: usize,
    act: usize,
    exempt: bool,
    nlow: u64,
}

enum SideEnd {
    Unknown,
    /// Boundary known; optional item `(time, distance from the centre)`.
    Known(Option<(usize, usize)>),
}

struct View<'a> {
    algo: &'a HalfColAlgo,
    ball: &'a Ball<HalfLabel>,
    lv: ViewLevels,
    j: u32,
    t: usize,
}

impl View<'_> {
    /// Activation data of the level-`j` node `x`, if all its lower neighbours are visibly decided.
    fn record(&self, x: usize) -> Option<Rec> {
        let node = &self.ball.nodes[x];
        if self.j == 1 {
            return Some(Rec {
                x,
                dist: node.dist,
                act: 0,
                exempt: false,
                nlow: 0,
            });
        }
        if node.dist >= self.t {
            return None;
        }
        let mut act = self.j as usize - 1;
        let mut exempt = false;
        let mut nlow = 0;
        for &u in &node.nbrs {
            if !self.lv.is_below(u, self.j)? {
                continue;
            }
            let p = self.ball.nodes[u].published.as_ref()?;
            act = act.max(p.round + 1);
            exempt |= p.output != HalfLabel::D;
            if self.lv.level[u] == Some(self.j - 1) {
                nlow = nlow.max(p.aux);
            }
        }
        Some(Rec {
            x,
            dist: node.dist,
            act,
            exempt,
            nlow,
        })
    }

    /// Item for a path end at `x`: its higher neighbours are known not to be at level `j`.
    fn end_item(&self, x: usize) -> Option<(usize, usize)> {
        let node = &self.ball.nodes[x];
        node.nbrs
            .iter()
            .any(|&u| self.lv.is_above(u, self.j) == Some(true))
            .then_some((self.j as usize - 1, node.dist + 1))
    }

    /// Level-`j` neighbours of `x` other than `prev`; `None` if some status is unknown
    /// and no such neighbour was found.
    fn next_on_path(&self, x: usize, prev: Option<usize>) -> Option<Vec<usize>> {
        let node = &self.ball.nodes[x];
        let mut found = Vec::new();
        // At the rim only the degree is visible.
        let mut unknown = node.dist >= self.t && node.degree > usize::from(prev.is_some());
        for &u in &node.nbrs {
            if Some(u) == prev {
                continue;
            }
            match self.lv.is_level(u, self.j) {
                Some(true) => found.push(u),
                Some(false) => {}
                None => unknown = true,
            }
        }
        if unknown && found.len() + usize::from(prev.is_some()) < 2 {
            return None;
        }
        Some(found)
    }

    fn walk(&self, start: usize, first: usize) -> (Vec<Rec>, SideEnd) {
        let mut run = Vec::new();
        let mut prev = start;
        let mut cur = first;
        loop {
            let Some(rec) = self.record(cur) else {
                return (run, SideEnd::Unknown);
            };
            if rec.exempt {
                return (run, SideEnd::Known(Some((rec.act, rec.dist))));
            }
            run.push(rec);
            match self.next_on_path(cur, Some(prev)) {
                None => return (run, SideEnd::Unknown),
                Some(next) => match next.first() {
                    Some(&z) => {
                        prev = cur;
                        cur = z;
                    }
                    None => return (run, SideEnd::Known(self.end_item(cur))),
                },
            }
        }
    }
}

fn q_union<O>(ball: &Ball<O>, lv: &ViewLevels, window: &[usize], i: usize) -> usize {
    let mut seen = vec![false; ball.nodes.len()];
    let mut count = 0;
    for &v in window {
        let mut q = VecDeque::new();
        for &w in &ball.nodes[v].nbrs {
            if lv.level[w] == Some(1) && i >= 1 {
                q.push_back((w, v, 1usize));
            }
        }
        while let Some((x, parent, d)) = q.pop_front() {
            if !seen[x] {
                seen[x] = true;
                count += 1;
            }
            if d == i {
                continue;
            }
            for &u in &ball.nodes[x].nbrs {
                if u != parent && lv.level[u] == Some(1) {
                    q.push_back((u, x, d + 1));
                }
            }
        }
    }
    count
}

fn max_spread(items: impl Iterator<Item = (usize, i64)>, at: i64) -> usize {
    items
        .map(|(t, pos)| t + pos.abs_diff(at) as usize)
        .max()
        .unwrap_or(0)
}

impl NodeProgram for HalfColProgram {
    type Output = HalfLabel;

    fn decide(&self, t: usize, ball: &Ball<HalfLabel>, _k: &Knowledge) -> Decision<HalfLabel> {
        let algo = &self.algo;
        let k = algo.k;
        let lv = ViewLevels::new(ball, k);
        let c = ball.center;
        let j = match lv.level[c] {
            None => return Decision::Undecided,
            Some(l) if l == k + 1 => {
                return Decision::Decided {
                    output: HalfLabel::D,
                    aux: 0,
                }
            }
            Some(l) => l,
        };
        let view = View {
            algo,
            ball,
            lv,
            j,
            t,
        };
        let Some(me) = view.record(c) else {
            return Decision::Undecided;
        };
        if me.exempt {
            return Decision::Decided {
                output: HalfLabel::E,
                aux: 0,
            };
        }
        let Some(firsts) = view.next_on_path(c, None) else {
            return own_only(&view, &me, &[], &[]);
        };
        let mut sides = Vec::new();
        for &f in &firsts {
            sides.push(view.walk(c, f));
        }
        let end_here = || SideEnd::Known(view.end_item(c));
        while sides.len() < 2 {
            sides.push((Vec::new(), end_here()));
        }
        let (right_run, right_end) = sides.pop().expect("two sides");
        let (left_run, left_end) = sides.pop().expect("two sides");

        // Decline announced by a neighbour on the segment.
        let inherited = left_run
            .first()
            .into_iter()
            .chain(right_run.first())
            .filter_map(|r| ball.nodes[r.x].published.as_ref())
            .filter(|p| p.output == HalfLabel::D)
            .map(|p| p.aux)
            .max();
        if let Some(aux) = inherited {
            return Decision::Decided {
                output: HalfLabel::D,
                aux,
            };
        }

        match (left_end, right_end) {
            (SideEnd::Known(li), SideEnd::Known(ri)) => {
                full_segment(&view, &me, &left_run, &right_run, li, ri)
            }
            _ => own_only(&view, &me, &left_run, &right_run),
        }
    }
}

/// The explored segment in path order with positions relative to the centre.
fn segment(me: &Rec, left: &[Rec], right: &[Rec]) -> Vec<(Rec, i64)> {
    let mut seg: Vec<(Rec, i64)> = left.iter().rev().map(|r| (r.clone(), -(r.dist as i64))).collect();
    seg.push((me.clone(), 0));
    seg.extend(right.iter().map(|r| (r.clone(), r.dist as i64)));
    seg
}

fn declined(aux: u64) -> Decision<HalfLabel> {
    Decision::Decided {
        output: HalfLabel::D,
        aux,
    }
}

/// Decline size if the centre's own rule fires at the current round.
fn own_fires(view: &View<'_>, seg: &[(Rec, i64)]) -> Option<u64> {
    let rule = &view.algo.rules[view.j as usize - 1];
    let t = view.t;
    let nodes = &view.ball.nodes;
    match rule {
        OwnRule::Never => None,
        OwnRule::Friendly { factor } => {
            let f = view.algo.friendly_f(*factor);
            let m = seg.len();
            for i in 1..=m {
                for l in 0..=m - i {
                    let window = &seg[l..l + i];
                    if window.iter().any(|(_, pos)| pos.unsigned_abs() as usize + i > t) {
                        continue;
                    }
                    let xs: Vec<usize> = window.iter().map(|(r, _)| r.x).collect();
                    if (q_union(view.ball, &view.lv, &xs, i) as f64) < i as f64 * f(i as f64) {
                        return Some(0);
                    }
                }
            }
            None
        }
        _ => {
            let len = seg.len();
            let max_id = seg.iter().filter_map(|(r, _)| nodes[r.x].id).max().unwrap_or(0);
            let marked = seg
                .iter()
                .any(|(r, _)| nodes[r.x].tape.is_some_and(|tp| tp.mark()));
            let nsum = seg.iter().map(|(r, _)| r.nlow).sum();
            match fire_time(rule, t, (len, max_id, marked, nsum)) {
                Some((tf, aux)) if tf == t => Some(aux),
                _ => None,
            }
        }
    }
}

/// Boundaries not yet known: only the centre's own rule can fire.
fn own_only(view: &View<'_>, me: &Rec, left: &[Rec], right: &[Rec]) -> Decision<HalfLabel> {
    let seg = segment(me, left, right);
    match own_fires(view, &seg) {
        Some(aux) => declined(aux),
        None => Decision::Undecided,
    }
}

fn full_segment(
    view: &View<'_>,
    me: &Rec,
    left: &[Rec],
    right: &[Rec],
    li: Option<(usize, usize)>,
    ri: Option<(usize, usize)>,
) -> Decision<HalfLabel> {
    let t = view.t;
    let j = view.j as usize;
    let seg = segment(me, left, right);
    let m = seg.len();
    let mut items: Vec<(usize, i64)> = seg.iter().map(|(r, pos)| (r.act, *pos)).collect();
    if let Some((tau, d)) = li {
        items.push((tau, -(d as i64)));
    }
    if let Some((tau, d)) = ri {
        items.push((tau, d as i64));
    }
    let b_at = |pos: i64| max_spread(items.iter().copied(), pos);
    let b_v = b_at(0);
    let policy = view.algo.policy[j - 1];
    let reach = seg.iter().map(|(_, p)| p.unsigned_abs() as usize).max().unwrap_or(0);
    let color_time = match policy {
        ColorPolicy::Immediate => b_v,
        ColorPolicy::Safe => seg
            .iter()
            .map(|(_, p)| b_at(*p) + p.unsigned_abs() as usize)
            .max()
            .unwrap_or(b_v),
        ColorPolicy::AfterScan => b_v.max(reach + m),
    };
    let cutoff = if policy == ColorPolicy::AfterScan { color_time } else { b_v };
    if t <= cutoff {
        if let Some(aux) = own_fires(view, &seg) {
            return declined(aux);
        }
    }
    if color_time > t {
        return Decision::Undecided;
    }
    let nodes = &view.ball.nodes;
    let (a, z) = (&seg[0], &seg[m - 1]);
    let black_first = if view.algo.model().ids_visible() {
        nodes[a.0.x].id <= nodes[z.0.x].id
    } else {
        let key = |r: &Rec| nodes[r.x].tape.map(|tp| tp.key()).unwrap_or(0);
        key(&a.0) <= key(&z.0)
    };
    let from = if black_first { a.1 } else { z.1 };
    let output = if from.unsigned_abs() % 2 == 0 { HalfLabel::B } else { HalfLabel::W };
    Decision::Decided { output, aux: 0 }
}
