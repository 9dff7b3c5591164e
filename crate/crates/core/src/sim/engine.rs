use std::collections::HashMap;

use super::{Knowledge, KnowledgeModel, SimTrace};
use crate::error::{Error, Result};
use crate::par;
use crate::tape::{random_tape, Tape};
use crate::tree::Tree;

/// Output and auxiliary state a decided node exposes to later views.
#[derive(Debug, Clone, PartialEq)]
pub struct Published<O> {
    pub round: usize,
    pub output: O,
    pub aux: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decision<O> {
    Undecided,
    Decided { output: O, aux: u64 },
}

#[derive(Debug, Clone)]
pub struct BallNode<O> {
    /// `None` when ids are withheld.
    pub id: Option<u64>,
    /// True degree in the whole tree.
    pub degree: usize,
    pub dist: usize,
    /// Neighbours inside the ball, as local indices.
    pub nbrs: Vec<usize>,
    pub tape: Option<Tape>,
    /// Visible annotation of a node that decided early enough for the news to arrive.
    pub published: Option<Published<O>>,
}

/// Everything a node knows after `radius` rounds.
#[derive(Debug, Clone)]
pub struct Ball<O> {
    pub center: usize,
    pub radius: usize,
    pub nodes: Vec<BallNode<O>>,
}

impl<O> Ball<O> {
    pub fn center_node(&self) -> &BallNode<O> {
        &self.nodes[self.center]
    }

    /// All neighbours of a node are inside the ball.
    pub fn complete(&self, x: usize) -> bool {
        self.nodes[x].dist < self.radius
    }
}

pub trait NodeProgram: Sync {
    type Output: Clone + Send + Sync + std::fmt::Debug;

    fn decide(
        &self,
        round: usize,
        ball: &Ball<Self::Output>,
        knowledge: &Knowledge,
    ) -> Decision<Self::Output>;
}

/// BFS layers around one node, grown by one layer per round.
struct View {
    members: Vec<(usize, usize, usize)>,
    layer_start: usize,
}

impl View {
    fn new(v: usize) -> Self {
        View {
            members: vec![(v, 0, usize::MAX)],
            layer_start: 0,
        }
    }

    fn grow(&mut self, tree: &Tree) {
        let end = self.members.len();
        for i in self.layer_start..end {
            let (x, d, parent) = self.members[i];
            for &u in tree.neighbors(x) {
                if u != parent {
                    self.members.push((u, d + 1, x));
                }
            }
        }
        self.layer_start = end;
    }
}

struct Ctx<'a, O> {
    tree: &'a Tree,
    model: &'a KnowledgeModel,
    seed: u64,
    published: &'a [Option<Published<O>>],
}

fn build_ball<O: Clone>(ctx: &Ctx<'_, O>, view: &View, radius: usize) -> Ball<O> {
    let tree = ctx.tree;
    let tape_of = |x: usize| random_tape(ctx.seed, tree.id(x));
    let mut order: Vec<usize> = (0..view.members.len()).collect();
    if ctx.model.ids_visible() {
        order.sort_unstable_by_key(|&i| tree.id(view.members[i].0));
    } else {
        order.sort_unstable_by_key(|&i| (view.members[i].1, tape_of(view.members[i].0).key()));
    }
    let local: HashMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (view.members[i].0, pos))
        .collect();
    let nodes = order
        .iter()
        .map(|&i| {
            let (x, d, _) = view.members[i];
            let published = ctx.published[x]
                .as_ref()
                .filter(|p| p.round + d <= radius)
                .cloned();
            BallNode {
                id: ctx.model.ids_visible().then(|| tree.id(x)),
                degree: tree.degree(x),
                dist: d,
                nbrs: tree
                    .neighbors(x)
                    .iter()
                    .filter_map(|u| local.get(u).copied())
                    .collect(),
                tape: ctx.model.randomized.then(|| tape_of(x)),
                published,
            }
        })
        .collect();
    Ball {
        center: local[&view.members[0].0],
        radius,
        nodes,
    }
}

pub fn run_sync<P: NodeProgram>(
    tree: &Tree,
    program: &P,
    model: &KnowledgeModel,
    seed: u64,
) -> Result<SimTrace<P::Output>> {
    run_sync_capped(tree, program, model, seed, 4 * tree.n().max(4))
}

pub fn run_sync_capped<P: NodeProgram>(
    tree: &Tree,
    program: &P,
    model: &KnowledgeModel,
    seed: u64,
    cap: usize,
) -> Result<SimTrace<P::Output>> {
    model.check(tree)?;
    let n = tree.n();
    let mut views: Vec<Option<View>> = (0..n).map(|v| Some(View::new(v))).collect();
    let mut published: Vec<Option<Published<P::Output>>> = vec![None; n];
    let mut undecided: Vec<usize> = (0..n).collect();
    let mut round = 0;
    while !undecided.is_empty() {
        if round > cap {
            return Err(Error::NonTermination(cap));
        }
        if round > 0 {
            for &v in &undecided {
                views[v].as_mut().expect("live view").grow(tree);
            }
        }
        let ctx = Ctx {
            tree,
            model,
            seed,
            published: &published,
        };
        let decisions = par::map(&undecided, |&v| {
            let ball = build_ball(&ctx, views[v].as_ref().expect("live view"), round);
            program.decide(round, &ball, &model.knowledge)
        });
        let mut still = Vec::new();
        for (&v, d) in undecided.iter().zip(decisions) {
            match d {
                Decision::Undecided => still.push(v),
                Decision::Decided { output, aux } => {
                    published[v] = Some(Published { round, output, aux });
                    views[v] = None;
                }
            }
        }
        undecided = still;
        round += 1;
    }
    let mut rounds = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);
    let mut aux = Vec::with_capacity(n);
    for p in published {
        let p = p.expect("all decided");
        rounds.push(p.round);
        outputs.push(p.output);
        aux.push(p.aux);
    }
    Ok(SimTrace::new(rounds, outputs, aux, seed, model.to_string()))
}
