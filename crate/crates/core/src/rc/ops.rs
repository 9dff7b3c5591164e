use super::labeling::Layer;
use crate::ceil_root;
use crate::sim::Meter;
use crate::tree::Tree;

/// The subgraph induced by unprocessed nodes, with layers of processed ones.
#[derive(Debug, Clone)]
pub struct Residual<'a> {
    tree: &'a Tree,
    alive: Vec<bool>,
    deg: Vec<usize>,
    layer: Vec<Option<Layer>>,
    alive_count: usize,
    low: Vec<usize>,
    queued: Vec<bool>,
}

impl<'a> Residual<'a> {
    pub fn new(tree: &'a Tree) -> Self {
        let n = tree.n();
        let deg: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
        let low: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
        let mut queued = vec![false; n];
        for &v in &low {
            queued[v] = true;
        }
        Residual {
            tree,
            alive: vec![true; n],
            deg,
            layer: vec![None; n],
            alive_count: n,
            low,
            queued,
        }
    }

    pub fn tree(&self) -> &'a Tree {
        self.tree
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.deg[v]
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_empty(&self) -> bool {
        self.alive_count == 0
    }

    pub fn layer(&self, v: usize) -> Option<Layer> {
        self.layer[v]
    }

    /// All layers, once every node has been assigned.
    pub fn layers(&self) -> Option<Vec<Layer>> {
        self.layer.iter().copied().collect()
    }

    fn remove(&mut self, v: usize, layer: Layer) {
        debug_assert!(self.alive[v]);
        self.alive[v] = false;
        self.layer[v] = Some(layer);
        self.alive_count -= 1;
        for &u in self.tree.neighbors(v) {
            if self.alive[u] {
                self.deg[u] -= 1;
                if self.deg[u] <= 1 && !self.queued[u] {
                    self.queued[u] = true;
                    self.low.push(u);
                }
            }
        }
    }

    /// Smallest rake sublayer at or above `R_{i,j}` that lies above every assigned neighbour.
    fn rake_layer(&self, v: usize, i: u32, j: u32) -> Layer {
        let mut best = Layer::Rake { i, j };
        for &u in self.tree.neighbors(v) {
            if let Some(l) = self.layer[u] {
                if l.key() >= best.key() {
                    best = match l {
                        Layer::Rake { i, j } => Layer::Rake { i, j: j + 1 },
                        Layer::Compress { i } => Layer::Rake { i: i + 1, j: 1 },
                    };
                }
            }
        }
        best
    }
}

/// One rake step targeting sublayer `R_{i,j}`. Costs one round.
/// Of two adjacent degree-1 nodes only the one with the lower id participates.
pub fn rake(res: &mut Residual<'_>, i: u32, j: u32, meter: Option<&mut Meter>) -> Vec<usize> {
    let tree = res.tree;
    let pending = std::mem::take(&mut res.low);
    let mut chosen = Vec::new();
    let mut keep = Vec::new();
    for v in pending {
        if !res.alive[v] {
            continue;
        }
        let participates = match res.deg[v] {
            0 => true,
            1 => {
                let u = tree
                    .neighbors(v)
                    .iter()
                    .copied()
                    .find(|&u| res.alive[u])
                    .expect("degree-1 node has an alive neighbour");
                res.deg[u] != 1 || tree.id(v) < tree.id(u)
            }
            _ => unreachable!("only low-degree nodes are queued"),
        };
        if participates {
            chosen.push(v);
        } else {
            keep.push(v);
        }
    }
    res.low = keep;
    let layers: Vec<Layer> = chosen.iter().map(|&v| res.rake_layer(v, i, j)).collect();
    for (&v, l) in chosen.iter().zip(layers) {
        res.queued[v] = false;
        res.remove(v, l);
    }
    if let Some(m) = meter {
        m.charge(1);
        for &v in &chosen {
            m.fix(v);
        }
    }
    chosen
}

fn is_prime(q: u128) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn next_prime(mut q: u128) -> u128 {
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// Field size and polynomial degree for one reduction step from `m` colors
/// with `max_deg` conflicting neighbours, if the step shrinks the palette.
fn reduction_step(m: u128, max_deg: u128) -> Option<(u128, u32)> {
    let mut best: Option<(u128, u32)> = None;
    for d in 1..=64u32 {
        let q = next_prime((max_deg * d as u128 + 1).max(ceil_root(m, d + 1)));
        if best.is_none_or(|(bq, _)| q < bq) {
            best = Some((q, d));
        }
    }
    best.filter(|&(q, _)| q * q < m)
}

/// Evaluates the polynomial whose coefficients are the base-`q` digits of `c`.
fn poly_eval(mut c: u128, d: u32, q: u128, x: u128) -> u128 {
    let mut coeffs = Vec::with_capacity(d as usize + 1);
    for _ in 0..=d {
        coeffs.push(c % q);
        c /= q;
    }
    coeffs.iter().rev().fold(0, |acc, &a| (acc * x + a) % q)
}

fn reduction_schedule(palette: u128, ell: usize) -> (Vec<(u128, u32)>, u128) {
    let mut steps = Vec::new();
    let mut palette = palette;
    while let Some((q, d)) = reduction_step(palette, (2 * ell) as u128) {
        steps.push((q, d));
        palette = q * q;
    }
    (steps, palette)
}

fn apply_schedule(ids: &[u64], ell: usize, steps: &[(u128, u32)]) -> Vec<u64> {
    let m = ids.len();
    let mut colors: Vec<u128> = ids.iter().map(|&x| x as u128).collect();
    for &(q, d) in steps {
        let values = |x: u128| -> Vec<u128> { colors.iter().map(|&c| poly_eval(c, d, q, x)).collect() };
        let table: Vec<Vec<u128>> = (0..q).map(values).collect();
        colors = (0..m)
            .map(|p| {
                let lo = p.saturating_sub(ell);
                let hi = (p + ell).min(m - 1);
                let x = (0..q as usize)
                    .find(|&x| {
                        let row = &table[x];
                        (lo..=hi).filter(|&o| o != p).all(|o| row[o] != row[p])
                    })
                    .expect("field larger than the number of conflicts");
                x as u128 * q + table[x][p]
            })
            .collect();
    }
    colors.into_iter().map(|c| c as u64).collect()
}

/// Linial color reduction on the `ell`-th power of a path whose nodes carry
/// distinct colors below `palette`. Returns final colors, the number of
/// reduction iterations, and the final palette size.
pub fn linial_path_power(ids: &[u64], ell: usize, palette: u128) -> (Vec<u64>, usize, u128) {
    let palette = palette.max(ids.iter().max().map_or(1, |&c| c as u128 + 1));
    let (steps, fin) = reduction_schedule(palette, ell);
    (apply_schedule(ids, ell, &steps), steps.len(), fin)
}

/// Qualifying compress paths of a residual and a distance-`ell` coloring of each.
#[derive(Debug, Clone)]
pub struct PathColoring {
    pub ell: usize,
    pub paths: Vec<Vec<usize>>,
    pub colors: Vec<Vec<u64>>,
    pub iterations: usize,
    pub palette: u128,
}

/// Maximal alive paths of degree-2 nodes with room for a compress segment of
/// `ell` nodes between two rake endpoints.
fn degree2_paths(res: &Residual<'_>, ell: usize) -> Vec<Vec<usize>> {
    let tree = res.tree;
    let n = tree.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let inner = |x: usize| res.alive[x] && res.deg[x] == 2;
    for s in 0..n {
        if seen[s] || !inner(s) {
            continue;
        }
        // Walk to one end, then collect toward the other.
        let mut prev = usize::MAX;
        let mut cur = s;
        loop {
            let next = tree
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&u| u != prev && res.alive[u] && inner(u));
            match next {
                Some(u) if u != s => {
                    prev = cur;
                    cur = u;
                }
                _ => break,
            }
        }
        let mut path = vec![cur];
        seen[cur] = true;
        let mut prev = usize::MAX;
        loop {
            let next = tree
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&u| u != prev && inner(u) && !seen[u]);
            match next {
                Some(u) => {
                    seen[u] = true;
                    path.push(u);
                    prev = cur;
                    cur = u;
                }
                None => break,
            }
        }
        if path.len() >= ell + 2 {
            out.push(path);
        }
    }
    out
}

pub fn linial_distance_coloring(res: &Residual<'_>, ell: usize) -> PathColoring {
    let tree = res.tree;
    let palette = tree.max_id() as u128 + 1;
    let paths = degree2_paths(res, ell);
    let (steps, final_palette) = reduction_schedule(palette, ell);
    let colors = paths
        .iter()
        .map(|p| {
            let ids: Vec<u64> = p.iter().map(|&x| tree.id(x)).collect();
            apply_schedule(&ids, ell, &steps)
        })
        .collect();
    PathColoring {
        ell,
        paths,
        colors,
        iterations: steps.len(),
        palette: final_palette,
    }
}

/// Positions of a maximal set on a path of `len` nodes, restricted to
/// `[margin, len - 1 - margin]`, with pairwise distance at least `sep`.
/// Candidates are scanned in color order; `colors` must be proper on the
/// `(sep - 1)`-th power of the path.
pub fn ruling_set_with_margin(len: usize, sep: usize, margin: usize, colors: &[u64]) -> Vec<usize> {
    if len < 2 * margin + 1 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (margin..len - margin).collect();
    order.sort_by_key(|&p| (colors[p], p));
    let mut member = vec![false; len];
    for p in order {
        let lo = p.saturating_sub(sep.saturating_sub(1));
        let hi = (p + sep.saturating_sub(1)).min(len - 1);
        if !(lo..=hi).any(|o| member[o]) {
            member[p] = true;
        }
    }
    (0..len).filter(|&p| member[p]).collect()
}

/// An `(ell, 2 ell)`-ruling set of a path: members pairwise at distance at least
/// `ell`, every node within `2 ell` of a member.
pub fn ruling_set_on_path(len: usize, ell: usize, colors: &[u64]) -> Vec<usize> {
    ruling_set_with_margin(len, ell.max(1), 0, colors)
}

/// Compress into `C_j`: both extreme nodes of each qualifying path and a ruling
/// set of its inside go to `R_{j+1,1}`, the rest to `C_j`. Ruling nodes are more
/// than `ell` apart and leave at most `2 ell` nodes between them, so every
/// compress segment has between `ell` and `2 ell` nodes and touches rake nodes
/// only. Costs the coloring iterations plus one round for the ruling-set sweep.
pub fn compress(
    res: &mut Residual<'_>,
    j: u32,
    coloring: &PathColoring,
    meter: Option<&mut Meter>,
) -> usize {
    let ell = coloring.ell;
    let mut assigned = Vec::new();
    for (path, colors) in coloring.paths.iter().zip(&coloring.colors) {
        let len = path.len();
        let mut is_ruling = vec![false; len];
        is_ruling[0] = true;
        is_ruling[len - 1] = true;
        for p in ruling_set_with_margin(len, ell + 1, ell + 1, colors) {
            is_ruling[p] = true;
        }
        for (p, &x) in path.iter().enumerate() {
            let layer = if is_ruling[p] {
                Layer::Rake { i: j + 1, j: 1 }
            } else {
                Layer::Compress { i: j }
            };
            assigned.push((x, layer));
        }
    }
    for &(x, l) in &assigned {
        res.remove(x, l);
    }
    if let Some(m) = meter {
        m.charge(coloring.iterations + 1);
        for &(x, _) in &assigned {
            m.fix(x);
        }
    }
    assigned.len()
}
