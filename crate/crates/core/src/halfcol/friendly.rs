use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::tree::{Levels, Tree};

/// Level-1 nodes reachable from the level-2 node `v` by a path of at most `i`
/// edges whose nodes other than `v` are all at level 1.
pub fn q_set(tree: &Tree, levels: &Levels, v: usize, i: usize) -> Result<Vec<usize>> {
    if levels.level[v] != 2 {
        return Err(Error::WrongLevel(v));
    }
    Ok(q_set_unchecked(tree, &levels.level, v, i))
}

pub(crate) fn q_set_unchecked(tree: &Tree, level: &[u32], v: usize, i: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut q = VecDeque::new();
    for &w in tree.neighbors(v) {
        if level[w] == 1 && i >= 1 {
            q.push_back((w, v, 1usize));
        }
    }
    while let Some((x, parent, d)) = q.pop_front() {
        out.push(x);
        if d == i {
            continue;
        }
        for &u in tree.neighbors(x) {
            if u != parent && level[u] == 1 {
                q.push_back((u, x, d + 1));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// `|Q_i(v_1) ∪ ... ∪ Q_i(v_m)|` for the nodes of `path`.
pub fn union_size(tree: &Tree, levels: &Levels, path: &[usize], i: usize) -> usize {
    let mut all: Vec<usize> = path
        .iter()
        .flat_map(|&v| q_set_unchecked(tree, &levels.level, v, i))
        .collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// A path of `i` level-2 nodes is friendly when its Q-union has fewer than `i f(i)` nodes.
pub fn is_friendly(tree: &Tree, levels: &Levels, path: &[usize], f: impl Fn(f64) -> f64) -> bool {
    let i = path.len();
    i > 0 && (union_size(tree, levels, path, i) as f64) < i as f64 * f(i as f64)
}
