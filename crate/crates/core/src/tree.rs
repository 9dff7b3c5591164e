//! Bounded-degree trees with unique identifiers, level peeling and ball extraction.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<usize>>,
    ids: Vec<u64>,
    max_degree: usize,
}

/// Builds a tree on nodes `0..n`. Ids default to `1..=n`.
pub fn build_tree(
    n: usize,
    edges: &[(usize, usize)],
    ids: Option<Vec<u64>>,
    max_degree: Option<usize>,
) -> Result<Tree> {
    let max_degree = max_degree.unwrap_or(DEFAULT_MAX_DEGREE);
    if n == 0 {
        return Err(Error::NotATree("empty node set".into()));
    }
    if edges.len() != n - 1 {
        return Err(Error::NotATree(format!(
            "{} edges for {} nodes",
            edges.len(),
            n
        )));
    }
    let ids = match ids {
        Some(ids) => {
            if ids.len() != n {
                return Err(Error::NotATree(format!("{} ids for {} nodes", ids.len(), n)));
            }
            let mut seen = HashSet::with_capacity(n);
            for &id in &ids {
                if id == 0 {
                    return Err(Error::Domain("ids must be positive".into()));
                }
                if !seen.insert(id) {
                    return Err(Error::DuplicateId(id));
                }
            }
            ids
        }
        None => (1..=n as u64).collect(),
    };
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n {
            return Err(Error::InvalidIndex(u));
        }
        if v >= n {
            return Err(Error::InvalidIndex(v));
        }
        if u == v {
            return Err(Error::NotATree(format!("self loop at {u}")));
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    for (v, nb) in adj.iter_mut().enumerate() {
        if nb.len() > max_degree {
            return Err(Error::DegreeExceeded {
                node: v,
                degree: nb.len(),
                max: max_degree,
            });
        }
        nb.sort_unstable_by_key(|&u| ids[u]);
        if nb.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotATree(format!("parallel edge at {v}")));
        }
    }
    // n-1 edges plus connectivity implies acyclic.
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    if count != n {
        return Err(Error::NotATree("disconnected".into()));
    }
    Ok(Tree {
        adj,
        ids,
        max_degree,
    })
}

impl Tree {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbours of `v`, sorted by id.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn id(&self, v: usize) -> u64 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn max_id(&self) -> u64 {
        self.ids.iter().copied().max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        for (v, nb) in self.adj.iter().enumerate() {
            for &u in nb {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out
    }

    /// Same topology, new identifiers.
    pub fn with_ids(&self, ids: Vec<u64>) -> Result<Tree> {
        build_tree(self.n(), &self.edges(), Some(ids), Some(self.max_degree))
    }

    /// Hop distances from `src`, truncated at `radius` (`usize::MAX` beyond).
    pub fn distances_from(&self, src: usize, radius: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            if dist[v] == radius {
                continue;
            }
            for &u in &self.adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    q.push_back(u);
                }
            }
        }
        dist
    }
}

/// Level assignment from iterated peeling of degree-at-most-2 nodes.
/// Level `k + 1` denotes the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Levels {
    pub k: u32,
    pub level: Vec<u32>,
}

impl Levels {
    pub fn remainder(&self) -> u32 {
        self.k + 1
    }

    pub fn is_remainder(&self, v: usize) -> bool {
        self.level[v] == self.k + 1
    }

    pub fn count(&self, j: u32) -> usize {
        self.level.iter().filter(|&&l| l == j).count()
    }
}

pub fn compute_levels(tree: &Tree, k: u32) -> Levels {
    let n = tree.n();
    let mut level = vec![k + 1; n];
    let mut deg: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    for i in 1..=k {
        let (peel, rest): (Vec<usize>, Vec<usize>) = alive.iter().partition(|&&v| deg[v] <= 2);
        for &v in &peel {
            level[v] = i;
        }
        for &v in &peel {
            for &u in tree.neighbors(v) {
                if level[u] > i {
                    deg[u] -= 1;
                }
            }
        }
        alive = rest;
        if alive.is_empty() {
            break;
        }
    }
    Levels { k, level }
}

/// Nodes within distance `r` of `v`, ordered by id, with their distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallShape {
    pub center: usize,
    pub radius: usize,
    pub nodes: Vec<usize>,
    pub dist: Vec<usize>,
}

pub fn extract_ball(tree: &Tree, v: usize, r: usize) -> Result<BallShape> {
    if v >= tree.n() {
        return Err(Error::InvalidIndex(v));
    }
    let mut found = vec![(v, 0usize)];
    let mut q = VecDeque::from([(v, usize::MAX, 0usize)]);
    while let Some((x, parent, d)) = q.pop_front() {
        if d == r {
            continue;
        }
        for &u in tree.neighbors(x) {
            if u != parent {
                found.push((u, d + 1));
                q.push_back((u, x, d + 1));
            }
        }
    }
    found.sort_unstable_by_key(|&(x, _)| tree.id(x));
    Ok(BallShape {
        center: v,
        radius: r,
        nodes: found.iter().map(|p| p.0).collect(),
        dist: found.iter().map(|p| p.1).collect(),
    })
}

/// Connected components of level `j`, each listed in path order starting from
/// the end with the smaller id.
pub fn level_paths(tree: &Tree, levels: &Levels, j: u32) -> Vec<Vec<usize>> {
    let n = tree.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let same = |x: usize| tree.neighbors(x).iter().filter(move |&&u| levels.level[u] == j);
    for s in 0..n {
        if seen[s] || levels.level[s] != j || same(s).count() > 1 {
            continue;
        }
        let mut path = vec![s];
        seen[s] = true;
        let mut prev = usize::MAX;
        let mut cur = s;
        loop {
            let next = same(cur).find(|&&u| u != prev).copied();
            match next {
                Some(u) if !seen[u] => {
                    seen[u] = true;
                    path.push(u);
                    prev = cur;
                    cur = u;
                }
                _ => break,
            }
        }
        if path.len() > 1 && tree.id(path[path.len() - 1]) < tree.id(path[0]) {
            path.reverse();
        }
        out.push(path);
    }
    out
}

/// Serializes as `tree <n>`, then `edge <u> <v>` and `id <u> <value>` lines.
pub fn to_text(tree: &Tree) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tree {}", tree.n());
    for (u, v) in tree.edges() {
        let _ = writeln!(s, "edge {u} {v}");
    }
    for v in 0..tree.n() {
        let _ = writeln!(s, "id {} {}", v, tree.id(v));
    }
    s
}

/// Appends a `levels <u> <value>` sidecar section.
pub fn levels_to_text(levels: &[u32]) -> String {
    let mut s = String::new();
    for (v, l) in levels.iter().enumerate() {
        let _ = writeln!(s, "levels {v} {l}");
    }
    s
}

/// A parsed instance: the tree plus optional level tags.
#[derive(Debug, Clone)]
pub struct Instance {
    pub tree: Tree,
    pub level_tags: Option<Vec<u32>>,
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| Error::Parse {
        line,
        msg: "expected a number".into(),
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut ids: Vec<Option<u64>> = Vec::new();
    let mut tags: Vec<Option<u32>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut it = raw.split_whitespace();
        let kw = it.next().unwrap_or("");
        if kw == "tree" {
            let m: usize = num(it.next(), line)?;
            n = Some(m);
            ids = vec![None; m];
            tags = vec![None; m];
            continue;
        }
        let m = n.ok_or_else(|| Error::Parse {
            line,
            msg: "missing `tree <n>` header".into(),
        })?;
        let u: usize = num(it.next(), line)?;
        if u >= m {
            return Err(Error::Parse {
                line,
                msg: format!("node {u} out of range"),
            });
        }
        match kw {
            "edge" => {
                let v: usize = num(it.next(), line)?;
                if v >= m {
                    return Err(Error::Parse {
                        line,
                        msg: format!("node {v} out of range"),
                    });
                }
                edges.push((u, v));
            }
            "id" => ids[u] = Some(num(it.next(), line)?),
            "levels" => tags[u] = Some(num(it.next(), line)?),
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown keyword `{other}`"),
                })
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing `tree <n>` header".into(),
    })?;
    let ids = if ids.iter().all(Option::is_none) {
        None
    } else {
        Some(
            ids.iter()
                .enumerate()
                .map(|(v, x)| x.unwrap_or(v as u64 + 1))
                .collect(),
        )
    };
    let level_tags = if tags.iter().all(Option::is_none) {
        None
    } else {
        Some(tags.iter().map(|t| t.unwrap_or(0)).collect())
    };
    let tree = build_tree(n, &edges, ids, Some(usize::MAX))?;
    Ok(Instance { tree, level_tags })
}
