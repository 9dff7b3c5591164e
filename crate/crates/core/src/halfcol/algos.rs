use super::fast::evaluate;
use super::halflog::HalfLog;
use super::view::HalfColProgram;
use super::HalfLabel;
use crate::alpha::AlphaSchedule;
use crate::ceil_root;
use crate::error::{Error, Result};
use crate::sim::{run_sync, Knowledge, KnowledgeModel, SimTrace};
use crate::tree::{compute_levels, Levels, Tree};

/// What lets a candidate node of one level decline on its own.
#[derive(Debug, Clone, PartialEq)]
pub enum OwnRule {
    /// Never declines (the top level).
    Never,
    /// The visible segment has more than `bound` nodes.
    LongPath { bound: usize },
    /// Round `i` exceeds `(max id on the visible segment)^alpha1`.
    MaxIdRound { alpha1: f64 },
    /// `|P|^exponent` exceeds the sum of lower decline sizes on the segment.
    DeclineSum { exponent: f64 },
    /// Some node of the visible segment is marked.
    Mark,
    /// The segment contains a friendly subpath for `factor * f`.
    Friendly { factor: f64 },
}

/// When a candidate segment that did not decline commits to its 2-coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColorPolicy {
    /// As soon as both boundaries are known.
    Immediate,
    /// Once every node of the segment is known to be past its own deadline.
    Safe,
    /// After the friendliness scan of the whole segment.
    AfterScan,
}

#[derive(Debug, Clone)]
pub struct HalfColAlgo {
    pub name: &'static str,
    pub k: u32,
    /// `rules[j - 1]` governs level `j`.
    pub rules: Vec<OwnRule>,
    pub(crate) policy: Vec<ColorPolicy>,
    pub randomized: bool,
    pub knowledge: Knowledge,
    pub halflog: Option<HalfLog>,
}

/// A finished run: labels, decision rounds and the level structure used.
#[derive(Debug, Clone)]
pub struct HalfColRun {
    pub output: Vec<HalfLabel>,
    pub trace: SimTrace<HalfLabel>,
    pub levels: Levels,
}

/// `A_j / alpha_j`, the exponent in the level-`j` decline condition.
pub fn condition2_exponent(s: &AlphaSchedule, j: usize) -> f64 {
    s.prefix_at(j) / s.alpha_at(j)
}

impl HalfColAlgo {
    /// Segments longer than `ceil(n^{1/k})` decline; the top level always colors.
    pub fn known_n(k: u32, n: usize) -> Self {
        let bound = ceil_root(n as u128, k) as usize;
        let mut rules = vec![OwnRule::LongPath { bound }; k as usize];
        rules[k as usize - 1] = OwnRule::Never;
        HalfColAlgo {
            name: "halfcol-known-n",
            k,
            rules,
            policy: vec![ColorPolicy::Immediate; k as usize],
            randomized: false,
            knowledge: Knowledge::ExactN(n as u64),
            halflog: None,
        }
    }

    pub fn id_promise(schedule: &AlphaSchedule) -> Self {
        let k = schedule.k as u32;
        let rules = (1..=k as usize)
            .map(|j| {
                if j == k as usize {
                    OwnRule::Never
                } else if j == 1 {
                    OwnRule::MaxIdRound {
                        alpha1: schedule.alpha[0],
                    }
                } else {
                    OwnRule::DeclineSum {
                        exponent: condition2_exponent(schedule, j),
                    }
                }
            })
            .collect();
        HalfColAlgo {
            name: "halfcol-id",
            k,
            rules,
            policy: vec![ColorPolicy::Safe; k as usize],
            randomized: false,
            knowledge: Knowledge::IdRangePromise { c: schedule.c },
            halflog: None,
        }
    }

    pub fn rand_k2() -> Self {
        HalfColAlgo {
            name: "halfcol-rand-k2",
            k: 2,
            rules: vec![OwnRule::Mark, OwnRule::Never],
            policy: vec![ColorPolicy::Immediate; 2],
            randomized: true,
            knowledge: Knowledge::NoKnowledge,
            halflog: None,
        }
    }

    pub fn rand_k3(halflog: HalfLog) -> Self {
        HalfColAlgo {
            name: "halfcol-rand-k3",
            k: 3,
            rules: vec![
                OwnRule::Mark,
                OwnRule::Friendly { factor: 1.0 / 3.0 },
                OwnRule::Never,
            ],
            policy: vec![
                ColorPolicy::Immediate,
                ColorPolicy::AfterScan,
                ColorPolicy::Immediate,
            ],
            randomized: true,
            knowledge: Knowledge::NoKnowledge,
            halflog: Some(halflog),
        }
    }

    pub fn model(&self) -> KnowledgeModel {
        KnowledgeModel {
            knowledge: self.knowledge,
            randomized: self.randomized,
        }
    }

    /// The friendliness threshold function `factor * f`.
    pub(crate) fn friendly_f(&self, factor: f64) -> impl Fn(f64) -> f64 + '_ {
        let hl = self.halflog.as_ref().expect("friendly rule needs a half-log");
        move |x| factor * hl.f(x)
    }

    fn check(&self, tree: &Tree) -> Result<()> {
        if let Knowledge::IdRangePromise { c } = self.knowledge {
            let n = tree.n() as f64;
            let max_id = tree.max_id();
            if (max_id as f64).ln() > c * n.ln() + 1e-9 {
                return Err(Error::PromiseViolation {
                    max_id,
                    bound: n.powf(c),
                });
            }
        }
        self.model().check(tree)
    }

    /// Global evaluation of the same rules the node program applies.
    pub fn run(&self, tree: &Tree, seed: u64) -> Result<HalfColRun> {
        self.check(tree)?;
        let levels = compute_levels(tree, self.k);
        let (output, rounds, aux) = evaluate(self, tree, &levels, seed)?;
        let trace = SimTrace::new(rounds, output.clone(), aux, seed, self.model().to_string());
        Ok(HalfColRun {
            output,
            trace,
            levels,
        })
    }

    /// Runs the node program in the synchronous engine.
    pub fn run_sync(&self, tree: &Tree, seed: u64) -> Result<HalfColRun> {
        self.check(tree)?;
        let levels = compute_levels(tree, self.k);
        let program = HalfColProgram::new(self.clone());
        let trace = run_sync(tree, &program, &self.model(), seed)?;
        Ok(HalfColRun {
            output: trace.output.clone(),
            trace,
            levels,
        })
    }
}

pub fn algo_known_n(tree: &Tree, k: u32) -> Result<HalfColRun> {
    HalfColAlgo::known_n(k, tree.n()).run(tree, 0)
}

pub fn algo_id_promise(tree: &Tree, schedule: &AlphaSchedule) -> Result<HalfColRun> {
    HalfColAlgo::id_promise(schedule).run(tree, 0)
}

pub fn algo_rand_k2(tree: &Tree, seed: u64) -> Result<HalfColRun> {
    HalfColAlgo::rand_k2().run(tree, seed)
}

pub fn algo_rand_k3(tree: &Tree, seed: u64, halflog: &HalfLog) -> Result<HalfColRun> {
    HalfColAlgo::rand_k3(halflog.clone()).run(tree, seed)
}
