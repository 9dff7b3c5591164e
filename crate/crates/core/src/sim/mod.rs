//! Round-synchronous LOCAL simulation and a round-metered runner.

mod engine;
mod metered;

pub use engine::{run_sync, run_sync_capped, Ball, BallNode, Decision, NodeProgram, Published};
pub use metered::{run_metered, Meter};

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::fmt_float;
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Knowledge {
    ExactN(u64),
    /// Promise `n <= N <= n^c`.
    UpperBound { big_n: u64, c: f64 },
    /// Promise that every id is at most `n^c`.
    IdRangePromise { c: f64 },
    NoKnowledge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnowledgeModel {
    pub knowledge: Knowledge,
    pub randomized: bool,
}

impl KnowledgeModel {
    pub fn deterministic(knowledge: Knowledge) -> Self {
        KnowledgeModel {
            knowledge,
            randomized: false,
        }
    }

    pub fn randomized(knowledge: Knowledge) -> Self {
        KnowledgeModel {
            knowledge,
            randomized: true,
        }
    }

    pub fn ids_visible(&self) -> bool {
        !(self.randomized && self.knowledge == Knowledge::NoKnowledge)
    }

    /// Checks the promise against the actual instance.
    pub fn check(&self, tree: &Tree) -> Result<()> {
        let n = tree.n() as f64;
        match self.knowledge {
            Knowledge::ExactN(m) if m as usize != tree.n() => Err(Error::KnowledgeViolation(
                format!("told n = {m}, actual n = {}", tree.n()),
            )),
            Knowledge::UpperBound { big_n, c } => {
                if c < 1.0 {
                    return Err(Error::KnowledgeViolation(format!("c = {c} < 1")));
                }
                if (big_n as f64) < n {
                    return Err(Error::KnowledgeViolation(format!(
                        "N = {big_n} < n = {}",
                        tree.n()
                    )));
                }
                if (big_n as f64).ln() > c * n.ln() + 1e-9 {
                    return Err(Error::KnowledgeViolation(format!(
                        "N = {big_n} > n^c with n = {}, c = {c}",
                        tree.n()
                    )));
                }
                Ok(())
            }
            Knowledge::IdRangePromise { c } => {
                let max_id = tree.max_id();
                if (max_id as f64).ln() > c * n.ln() + 1e-9 {
                    Err(Error::PromiseViolation {
                        max_id,
                        bound: n.powf(c),
                    })
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KnowledgeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.knowledge {
            Knowledge::ExactN(n) => write!(f, "exact-n:{n}")?,
            Knowledge::UpperBound { big_n, c } => write!(f, "upper-bound:{big_n}:{}", fmt_float(c))?,
            Knowledge::IdRangePromise { c } => write!(f, "id-promise:{}", fmt_float(c))?,
            Knowledge::NoKnowledge => write!(f, "none")?,
        }
        if self.randomized {
            write!(f, ":rand")?;
        }
        Ok(())
    }
}

/// Outcome of a run: per-node decision rounds and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace<O> {
    pub decision_round: Vec<usize>,
    pub output: Vec<O>,
    pub aux: Vec<u64>,
    pub rounds_max: usize,
    pub rounds_avg: f64,
    pub seed: u64,
    pub knowledge: String,
}

impl<O> SimTrace<O> {
    pub fn new(
        decision_round: Vec<usize>,
        output: Vec<O>,
        aux: Vec<u64>,
        seed: u64,
        knowledge: String,
    ) -> Self {
        let rounds_max = decision_round.iter().copied().max().unwrap_or(0);
        let rounds_avg = if decision_round.is_empty() {
            0.0
        } else {
            decision_round.iter().sum::<usize>() as f64 / decision_round.len() as f64
        };
        SimTrace {
            decision_round,
            output,
            aux,
            rounds_max,
            rounds_avg,
            seed,
            knowledge,
        }
    }
}

impl<O: fmt::Display> SimTrace<O> {
    /// `node,id,level,decision_round,output` rows followed by a summary row
    /// `summary,<n>,<seed>,<knowledge>,<rounds_max>,<rounds_avg>`.
    pub fn to_csv(&self, tree: &Tree, levels: Option<&[u32]>) -> String {
        let mut s = String::from("node,id,level,decision_round,output\n");
        for v in 0..self.output.len() {
            let level = levels.map(|l| l[v].to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{v},{},{level},{},{}",
                tree.id(v),
                self.decision_round[v],
                self.output[v]
            );
        }
        let _ = writeln!(
            s,
            "summary,{},{},{},{},{}",
            self.output.len(),
            self.seed,
            self.knowledge,
            self.rounds_max,
            fmt_float(self.rounds_avg)
        );
        s
    }
}
