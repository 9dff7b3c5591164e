use super::labeling::{DecompLabeling, Layer};
use super::ops::{compress, linial_distance_coloring, rake, Residual};
use crate::alpha::AlphaSchedule;
use crate::error::{Error, Result};
use crate::sim::{Knowledge, KnowledgeModel, Meter, SimTrace};
use crate::tree::Tree;

/// A decomposition together with its metered run.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub labeling: DecompLabeling,
    pub trace: SimTrace<Layer>,
    /// Alive nodes at the end of each phase.
    pub alive_after_phase: Vec<usize>,
    /// Alive nodes at the start of each phase.
    pub alive_before_phase: Vec<usize>,
    /// Rake budget of each phase (`None` for rake-until-empty).
    pub budgets: Vec<Option<usize>>,
    /// Rounds charged for compress steps.
    pub compress_cost: usize,
}

struct Runner<'a> {
    res: Residual<'a>,
    meter: Meter,
    ell: usize,
    before: Vec<usize>,
    after: Vec<usize>,
    budgets: Vec<Option<usize>>,
    compress_cost: usize,
}

impl<'a> Runner<'a> {
    fn new(tree: &'a Tree, ell: usize) -> Result<Self> {
        if ell < 2 {
            return Err(Error::Domain(format!("ell = {ell}, need ell >= 2")));
        }
        Ok(Runner {
            res: Residual::new(tree),
            meter: Meter::new(tree.n()),
            ell,
            before: Vec::new(),
            after: Vec::new(),
            budgets: Vec::new(),
            compress_cost: 0,
        })
    }

    /// Up to `budget` rakes into layer `i` (until empty when `None`).
    /// Returns whether the residual is empty afterwards.
    fn rakes(&mut self, i: u32, budget: Option<usize>) -> bool {
        let mut s = 0;
        while !self.res.is_empty() && budget.is_none_or(|b| s < b) {
            s += 1;
            rake(&mut self.res, i, s as u32, Some(&mut self.meter));
        }
        self.res.is_empty()
    }

    fn compress(&mut self, i: u32) {
        if self.res.is_empty() {
            return;
        }
        let coloring = linial_distance_coloring(&self.res, self.ell);
        self.compress_cost += coloring.iterations + 1;
        compress(&mut self.res, i, &coloring, Some(&mut self.meter));
    }

    fn phase(&mut self, i: u32, budget: Option<usize>, with_compress: bool) {
        self.before.push(self.res.alive_count());
        self.budgets.push(budget);
        self.rakes(i, budget);
        if with_compress {
            self.compress(i);
        }
        self.after.push(self.res.alive_count());
    }

    fn finish(self, seed: u64, knowledge: String) -> Result<Decomposition> {
        let layers = self
            .res
            .layers()
            .ok_or_else(|| Error::BudgetExceeded("residual not empty".into()))?;
        let rounds = self.meter.rounds()?;
        let n = layers.len();
        let trace = SimTrace::new(rounds, layers.clone(), vec![0; n], seed, knowledge);
        Ok(Decomposition {
            labeling: DecompLabeling::from_layers(layers, self.ell),
            trace,
            alive_after_phase: self.after,
            alive_before_phase: self.before,
            budgets: self.budgets,
            compress_cost: self.compress_cost,
        })
    }
}

/// `ceil(n^{1/k} (ell/2)^{1 - 1/k})`.
pub fn known_n_gamma(n: usize, k: usize, ell: usize) -> usize {
    let kf = k as f64;
    ((n as f64).powf(1.0 / kf) * (ell as f64 / 2.0).powf(1.0 - 1.0 / kf) - 1e-9)
        .ceil()
        .max(1.0) as usize
}

pub fn decompose_known_n(tree: &Tree, k: usize, ell: usize) -> Result<Decomposition> {
    if k < 1 {
        return Err(Error::Domain("k must be positive".into()));
    }
    let gamma = known_n_gamma(tree.n(), k, ell);
    let mut run = Runner::new(tree, ell)?;
    for i in 1..k {
        run.phase(i as u32, Some(gamma), true);
    }
    run.phase(k as u32, Some(gamma), false);
    if !run.res.is_empty() {
        return Err(Error::BudgetExceeded(format!(
            "{} nodes left after the final {gamma} rakes",
            run.res.alive_count()
        )));
    }
    run.finish(0, format!("exact-n:{}", tree.n()))
}

/// Constant-budget phases until the tree is empty; `L` is the number of layers used.
pub fn decompose_log(tree: &Tree, gamma: usize, ell: usize) -> Result<Decomposition> {
    if gamma == 0 {
        return Err(Error::Domain("gamma must be positive".into()));
    }
    let mut run = Runner::new(tree, ell)?;
    let mut i = 1;
    while !run.res.is_empty() {
        run.phase(i, Some(gamma), true);
        i += 1;
    }
    run.finish(0, "none".into())
}

fn upper_bound(model: &KnowledgeModel, tree: &Tree) -> Result<(u64, f64)> {
    model.check(tree)?;
    match model.knowledge {
        Knowledge::UpperBound { big_n, c } => Ok((big_n, c)),
        _ => Err(Error::KnowledgeViolation(
            "an upper bound N with n <= N <= n^c is required".into(),
        )),
    }
}

/// Phase `i < k`: `ceil(N^{alpha_i})` rakes and one compress; phase `k`: rake until empty.
pub fn decompose_poly_n(
    tree: &Tree,
    model: &KnowledgeModel,
    schedule: &AlphaSchedule,
    ell: usize,
) -> Result<Decomposition> {
    let (big_n, _) = upper_bound(model, tree)?;
    let k = schedule.k;
    let mut run = Runner::new(tree, ell)?;
    for i in 1..k {
        let budget = (big_n as f64).powf(schedule.alpha_at(i)).ceil() as usize;
        run.phase(i as u32, Some(budget.max(1)), true);
    }
    run.phase(k as u32, None, false);
    run.finish(0, model.to_string())
}

/// `s_1 = 2`, `s_i = s_{i-1}^{2c}`, listed while at most `limit`.
pub fn knuth_sequence(c: f64, limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut s = 2.0f64;
    while s <= limit as f64 {
        out.push(s.round() as u64);
        s = s.powf(2.0 * c);
    }
    out
}

/// The unique sequence element in `[floor(N^{1/c}), N]`, or `N` itself.
pub fn knuth_x(big_n: u64, c: f64) -> u64 {
    let lo = (big_n as f64).powf(1.0 / c).floor() as u64;
    knuth_sequence(c, big_n)
        .into_iter()
        .find(|&s| s >= lo && s <= big_n)
        .unwrap_or(big_n)
}

/// `k - 1` phases of `ceil(X^{1/k})` rakes and a compress, then rake until empty.
pub fn decompose_knuth_io(tree: &Tree, k: usize, model: &KnowledgeModel, ell: usize) -> Result<Decomposition> {
    let (big_n, c) = upper_bound(model, tree)?;
    let x = knuth_x(big_n, c);
    let budget = ((x as f64).powf(1.0 / k as f64) - 1e-9).ceil().max(1.0) as usize;
    let mut run = Runner::new(tree, ell)?;
    for i in 1..k {
        run.phase(i as u32, Some(budget), true);
    }
    run.phase(k as u32, None, false);
    run.finish(0, model.to_string())
}
