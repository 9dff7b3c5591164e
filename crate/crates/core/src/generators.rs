//! Instance families and identifier assignment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tree::{build_tree, Tree};

/// Largest instance any generator will build.
pub const MAX_NODES: u128 = 10_000_000;

/// A generated tree together with the level of every node by construction.
#[derive(Debug, Clone)]
pub struct Generated {
    pub tree: Tree,
    pub level_tags: Vec<u32>,
}

/// Number of nodes of the lower-bound graph with the given per-level path lengths.
pub fn lb_graph_size(lengths: &[usize]) -> u128 {
    let k = lengths.len();
    let mut paths: u128 = 1;
    let mut total: u128 = 0;
    for i in (0..k).rev() {
        total = total.saturating_add(paths.saturating_mul(lengths[i] as u128));
        if i > 0 {
            paths = paths.saturating_mul(lengths[i] as u128 + 2);
        }
    }
    total
}

/// Level-`k` path of `lengths[k-1]` nodes; every node of a level-`i` path gets
/// `3 - (path degree)` fresh level-`(i-1)` paths of `lengths[i-2]` nodes.
pub fn gen_lb_graph(k: usize, lengths: &[usize]) -> Result<Generated> {
    if k == 0 || lengths.len() != k || lengths.contains(&0) {
        return Err(Error::Domain(format!(
            "need k >= 1 positive lengths, got k={k} lengths={lengths:?}"
        )));
    }
    let size = lb_graph_size(lengths);
    if size > MAX_NODES {
        return Err(Error::SizeOverflow(size));
    }
    let n = size as usize;
    let mut edges = Vec::with_capacity(n - 1);
    let mut tags = Vec::with_capacity(n);
    // Each entry is one path of the current level, as a node range.
    let mut current: Vec<(usize, usize)> = Vec::new();
    let spine = lengths[k - 1];
    push_path(&mut edges, &mut tags, spine, k as u32);
    current.push((0, spine));
    for level in (1..k).rev() {
        let len = lengths[level - 1];
        let mut next = Vec::new();
        for &(start, m) in &current {
            for x in start..start + m {
                let path_deg = usize::from(x > start) + usize::from(x + 1 < start + m);
                for _ in 0..3 - path_deg {
                    let first = tags.len();
                    push_path(&mut edges, &mut tags, len, level as u32);
                    edges.push((x, first));
                    next.push((first, len));
                }
            }
        }
        current = next;
    }
    let tree = build_tree(n, &edges, None, None)?;
    Ok(Generated {
        tree,
        level_tags: tags,
    })
}

fn push_path(edges: &mut Vec<(usize, usize)>, tags: &mut Vec<u32>, len: usize, level: u32) {
    let start = tags.len();
    for x in start..start + len {
        if x > start {
            edges.push((x - 1, x));
        }
        tags.push(level);
    }
}

pub fn gen_path(n: usize) -> Result<Generated> {
    if n == 0 {
        return Err(Error::Domain("path needs at least one node".into()));
    }
    if n as u128 > MAX_NODES {
        return Err(Error::SizeOverflow(n as u128));
    }
    let edges: Vec<_> = (1..n).map(|x| (x - 1, x)).collect();
    Ok(Generated {
        tree: build_tree(n, &edges, None, None)?,
        level_tags: vec![1; n],
    })
}

/// Spine of `p` nodes, each carrying a leg of `q` nodes; `p(q+1)` nodes total.
/// Spine nodes of degree at most 2 peel with the legs at level 1.
pub fn gen_caterpillar2(p: usize, q: usize) -> Result<Generated> {
    if p == 0 {
        return Err(Error::Domain("caterpillar needs a spine".into()));
    }
    let size = p as u128 * (q as u128 + 1);
    if size > MAX_NODES {
        return Err(Error::SizeOverflow(size));
    }
    let n = size as usize;
    let mut edges = Vec::with_capacity(n - 1);
    let mut tags = vec![1u32; n];
    for s in 1..p {
        edges.push((s - 1, s));
    }
    for s in 0..p {
        let base = p + s * q;
        for t in 0..q {
            let x = base + t;
            edges.push((if t == 0 { s } else { x - 1 }, x));
        }
    }
    let tree = build_tree(n, &edges, None, None)?;
    for s in 0..p {
        if tree.degree(s) > 2 {
            tags[s] = 2;
        }
    }
    Ok(Generated {
        tree,
        level_tags: tags,
    })
}

/// Three-level instance: spine of `l` nodes, level-2 paths of `l2` nodes and
/// level-1 paths of `i` nodes, attached as in [`gen_lb_graph`].
pub fn gen_threelevel(l: usize, l2: usize, i: usize) -> Result<Generated> {
    gen_lb_graph(3, &[i, l2, l])
}

/// Uniform attachment tree: node `v` hooks onto a random earlier node with spare degree.
pub fn gen_random_tree(n: usize, max_degree: usize, seed: u64) -> Result<Tree> {
    if n == 0 || max_degree < 2 {
        return Err(Error::Domain("need n >= 1 and max degree >= 2".into()));
    }
    if n as u128 > MAX_NODES {
        return Err(Error::SizeOverflow(n as u128));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut open: Vec<usize> = vec![0];
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let slot = rng.gen_range(0..open.len());
        let u = open[slot];
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
        if deg[u] == max_degree {
            open.swap_remove(slot);
        }
        open.push(v);
    }
    build_tree(n, &edges, None, Some(max_degree))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdScheme {
    /// Ids `1..=n` by node index.
    Sequential,
    /// Distinct ids drawn uniformly from `[1, n^c]`.
    RandomPermutation { c: f64 },
    /// Ids increasing along every path away from the tree's center, spread over `[1, n^c]`.
    MonotoneAlongPaths { c: f64 },
}

/// Upper end of the id range `[1, n^c]`, saturating at `u64::MAX`.
pub fn id_range(n: usize, c: f64) -> u64 {
    let r = (n as f64).powf(c).floor();
    if r >= u64::MAX as f64 {
        u64::MAX
    } else {
        r as u64
    }
}

pub fn assign_ids(tree: &Tree, scheme: IdScheme, seed: u64) -> Result<Tree> {
    let n = tree.n();
    let ids = match scheme {
        IdScheme::Sequential => (1..=n as u64).collect(),
        IdScheme::RandomPermutation { c } => {
            let range = id_range(n, c);
            if range < n as u64 {
                return Err(Error::RangeTooSmall { n, range });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ids: Vec<u64> = if range <= 4 * n as u64 {
                let mut all: Vec<u64> = (1..=range).collect();
                all.shuffle(&mut rng);
                all.truncate(n);
                all
            } else {
                let mut seen = std::collections::HashSet::with_capacity(n);
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    let x = rng.gen_range(1..=range);
                    if seen.insert(x) {
                        out.push(x);
                    }
                }
                out
            };
            ids.shuffle(&mut rng);
            ids
        }
        IdScheme::MonotoneAlongPaths { c } => {
            let range = id_range(n, c);
            if range < n as u64 {
                return Err(Error::RangeTooSmall { n, range });
            }
            let step = range / n as u64;
            let mut ids = vec![0u64; n];
            let mut next = 1u64;
            let mut stack = vec![(center(tree), usize::MAX)];
            while let Some((v, parent)) = stack.pop() {
                ids[v] = next * step;
                next += 1;
                for &u in tree.neighbors(v).iter().rev() {
                    if u != parent {
                        stack.push((u, v));
                    }
                }
            }
            ids
        }
    };
    tree.with_ids(ids)
}

/// Parents and distances of a breadth-first search from `src`.
fn bfs(tree: &Tree, src: usize) -> (Vec<usize>, Vec<usize>) {
    let n = tree.n();
    let mut parent = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    dist[src] = 0;
    let mut q = std::collections::VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        for &u in tree.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                parent[u] = v;
                q.push_back(u);
            }
        }
    }
    (parent, dist)
}

/// Middle node of a longest path.
fn center(tree: &Tree) -> usize {
    let far = |d: &[usize]| (0..d.len()).max_by_key(|&v| (d[v], std::cmp::Reverse(v))).unwrap_or(0);
    let a = far(&bfs(tree, 0).1);
    let (parent, dist) = bfs(tree, a);
    let mut v = far(&dist);
    for _ in 0..dist[v] / 2 {
        v = parent[v];
    }
    v
}
