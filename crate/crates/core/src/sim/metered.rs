use super::SimTrace;
use crate::error::{Error, Result};
use crate::tree::Tree;

/// Round counter for globally executed procedures. Each primitive charges its
/// declared cost; a node's decision round is the counter value when it is fixed.
#[derive(Debug, Clone)]
pub struct Meter {
    round: usize,
    fixed: Vec<Option<usize>>,
}

impl Meter {
    pub fn new(n: usize) -> Self {
        Meter {
            round: 0,
            fixed: vec![None; n],
        }
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn charge(&mut self, cost: usize) {
        self.round += cost;
    }

    pub fn fix(&mut self, v: usize) {
        if self.fixed[v].is_none() {
            self.fixed[v] = Some(self.round);
        }
    }

    pub fn fixed_round(&self, v: usize) -> Option<usize> {
        self.fixed[v]
    }

    pub fn rounds(&self) -> Result<Vec<usize>> {
        self.fixed
            .iter()
            .map(|r| r.ok_or(Error::NonTermination(self.round)))
            .collect()
    }
}

/// Runs `procedure` on a fresh meter and collects per-node decision rounds.
pub fn run_metered<O, F>(tree: &Tree, procedure: F) -> Result<SimTrace<O>>
where
    F: FnOnce(&Tree, &mut Meter) -> Result<Vec<O>>,
{
    let mut meter = Meter::new(tree.n());
    let outputs = procedure(tree, &mut meter)?;
    let rounds = meter.rounds()?;
    let n = outputs.len();
    Ok(SimTrace::new(rounds, outputs, vec![0; n], 0, "metered".into()))
}
