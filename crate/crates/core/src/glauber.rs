//! Glauber dynamics on bounded contiguous partitions.
//!
//! One step picks a uniform vertex and a uniform target, then moves the
//! vertex if the result is still a valid state. The three variants differ in
//! what a "target" is:
//!
//! * [`ChainVariant::ColoringMultiplicity`]: one of the `q` slots, so every
//!   empty slot is a separate target. Uniform on labeled colorings.
//! * [`ChainVariant::PartitionNaive`]: one of the `kappa` nonempty classes or a
//!   single empty representative (`kappa + 1` targets when `kappa < q`).
//! * [`ChainVariant::PartitionMetropolis`]: as `PartitionNaive`, but a move
//!   that changes `kappa` is accepted with probability
//!   `min(1, c(from) / c(to))` where `c` is the target count. Uniform on
//!   unlabeled partitions.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{canonical_form, is_legal_move, removal_keeps_connected, validate, Move, Partition, StateParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainVariant {
    ColoringMultiplicity,
    PartitionNaive,
    PartitionMetropolis,
}

impl ChainVariant {
    pub const ALL: [ChainVariant; 3] =
        [ChainVariant::ColoringMultiplicity, ChainVariant::PartitionNaive, ChainVariant::PartitionMetropolis];

    pub fn name(self) -> &'static str {
        match self {
            ChainVariant::ColoringMultiplicity => "coloring-multiplicity",
            ChainVariant::PartitionNaive => "partition-naive",
            ChainVariant::PartitionMetropolis => "partition-metropolis",
        }
    }

    /// True when states are compared up to relabelling.
    pub fn is_unlabeled(self) -> bool {
        self != ChainVariant::ColoringMultiplicity
    }
}

impl FromStr for ChainVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<ChainVariant> {
        ChainVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown chain variant {s:?}")))
    }
}

impl std::fmt::Display for ChainVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub params: StateParams,
    pub variant: ChainVariant,
    pub seed: u64,
    pub steps: u64,
}

/// Generator for replica `replica` of a run seeded with `seed`: ChaCha8 keyed
/// by the seed, with the replica index as its stream id.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Number of targets offered to the chosen vertex.
pub fn target_count(variant: ChainVariant, q: usize, kappa: usize) -> usize {
    match variant {
        ChainVariant::ColoringMultiplicity => q,
        _ if kappa < q => kappa + 1,
        _ => kappa,
    }
}

/// Unnormalized stationary mass of the unlabeled partition underlying `p`:
/// the falling factorial `q!/(q-kappa)!` for the coloring chain, 1 otherwise.
pub fn target_weight(p: &Partition, variant: ChainVariant) -> f64 {
    match variant {
        ChainVariant::ColoringMultiplicity => falling_factorial(p.q(), p.kappa()),
        _ => 1.0,
    }
}

pub fn falling_factorial(q: usize, k: usize) -> f64 {
    (0..k).map(|i| (q - i) as f64).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    /// The chosen target was the vertex's own class, or an equivalent relabelling.
    SelfLoop,
    /// The move would leave the state space.
    Illegal,
    /// Proposal legal but rejected by the Metropolis filter.
    Rejected,
    Moved,
}

/// Target index `i` in `0..target_count` mapped to a slot. Unlabeled variants
/// list nonempty slots in increasing order, then the lowest empty slot.
pub(crate) fn target_slot(p: &Partition, variant: ChainVariant, i: usize) -> usize {
    match variant {
        ChainVariant::ColoringMultiplicity => i,
        _ => {
            let mut seen = 0;
            let mut first_empty = None;
            for s in 0..p.q() {
                if p.size(s) > 0 {
                    if seen == i {
                        return s;
                    }
                    seen += 1;
                } else if first_empty.is_none() {
                    first_empty = Some(s);
                }
            }
            first_empty.expect("index kappa only offered when an empty slot exists")
        }
    }
}

/// Decides a proposed move. Returns the acceptance probability (0 when the
/// proposal does not change the state).
fn proposal(g: &Graph, p: &Partition, params: &StateParams, variant: ChainVariant, mv: Move) -> (StepOutcome, f64) {
    proposal_with(p, params, variant, mv, |p, mv| is_legal_move(g, p, mv, params))
}

/// [`proposal`] with the state-space membership test supplied by the caller,
/// for chains run on sets other than the valid partitions.
pub(crate) fn proposal_with(
    p: &Partition,
    params: &StateParams,
    variant: ChainVariant,
    mv: Move,
    legal: impl Fn(&Partition, Move) -> bool,
) -> (StepOutcome, f64) {
    let from = p.slot_of(mv.vertex);
    if from == mv.target {
        return (StepOutcome::SelfLoop, 0.0);
    }
    let to_empty = p.size(mv.target) == 0;
    if variant.is_unlabeled() && to_empty && p.size(from) == 1 {
        return (StepOutcome::SelfLoop, 0.0);
    }
    if !legal(p, mv) {
        return (StepOutcome::Illegal, 0.0);
    }
    if variant != ChainVariant::PartitionMetropolis {
        return (StepOutcome::Moved, 1.0);
    }
    let new_kappa = p.kappa() + usize::from(to_empty) - usize::from(p.size(from) == 1);
    let c_from = target_count(variant, params.q, p.kappa());
    let c_to = target_count(variant, params.q, new_kappa);
    (StepOutcome::Moved, (c_from as f64 / c_to as f64).min(1.0))
}

/// Single chain instance: a graph, parameters and a private generator.
pub struct Chain<'g> {
    graph: &'g Graph,
    params: StateParams,
    variant: ChainVariant,
    rng: ChaCha8Rng,
}

impl<'g> Chain<'g> {
    pub fn new(graph: &'g Graph, params: StateParams, variant: ChainVariant, rng: ChaCha8Rng) -> Chain<'g> {
        Chain { graph, params, variant, rng }
    }

    pub fn from_config(graph: &'g Graph, cfg: &ChainConfig) -> Chain<'g> {
        Chain::new(graph, cfg.params, cfg.variant, replica_rng(cfg.seed, 0))
    }

    /// One transition, in place.
    pub fn step(&mut self, p: &mut Partition) -> StepOutcome {
        let v = self.rng.gen_range(0..p.n());
        let c = target_count(self.variant, self.params.q, p.kappa());
        let i = self.rng.gen_range(0..c);
        let mv = Move { vertex: v, target: target_slot(p, self.variant, i) };
        let (outcome, accept) = proposal(self.graph, p, &self.params, self.variant, mv);
        if outcome != StepOutcome::Moved {
            return outcome;
        }
        if accept < 1.0 && self.rng.gen::<f64>() >= accept {
            return StepOutcome::Rejected;
        }
        p.apply_unchecked(mv);
        StepOutcome::Moved
    }
}

/// One transition from `p` using `rng`; returns the next state.
pub fn step(g: &Graph, p: &Partition, params: &StateParams, variant: ChainVariant, rng: &mut ChaCha8Rng) -> Partition {
    let mut chain = Chain::new(g, *params, variant, rng.clone());
    let mut next = p.clone();
    chain.step(&mut next);
    *rng = chain.rng;
    next
}

fn check_start(g: &Graph, p0: &Partition, params: &StateParams) -> Result<()> {
    validate(g, p0, params).map_err(|v| Error::InvalidPartition(format!("start state rejected: {v:?}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunOptions {
    /// Record every `thin`-th state (0 records only the start).
    pub thin: u64,
    /// Histograms ignore times before this step.
    pub burn_in: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MoveCounts {
    pub moved: u64,
    pub self_loop: u64,
    pub illegal: u64,
    pub rejected: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSample {
    pub step: u64,
    pub kappa: usize,
    pub state: Partition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSummary {
    pub steps: u64,
    pub moves: MoveCounts,
    /// `kappa_histogram[k]` counts recorded times with `k` nonempty classes.
    pub kappa_histogram: Vec<u64>,
    /// `class_size_histogram[s]` counts classes of size `s` over thinned samples.
    pub class_size_histogram: Vec<u64>,
    pub final_state: Partition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub samples: Vec<TraceSample>,
    pub summary: TraceSummary,
}

impl Trace {
    /// One JSON object per sample, then the summary object.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for s in &self.samples {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut out, &serde_json::json!({ "summary": &self.summary }))?;
        out.write_all(b"\n")
    }
}

/// Runs `cfg.steps` transitions from `p0` on replica stream 0.
pub fn run(g: &Graph, p0: &Partition, cfg: &ChainConfig, opts: RunOptions) -> Result<Trace> {
    run_replica(g, p0, cfg, opts, 0)
}

pub fn run_replica(g: &Graph, p0: &Partition, cfg: &ChainConfig, opts: RunOptions, replica: u64) -> Result<Trace> {
    check_start(g, p0, &cfg.params)?;
    let mut chain = Chain::new(g, cfg.params, cfg.variant, replica_rng(cfg.seed, replica));
    let mut p = p0.clone();
    let mut moves = MoveCounts::default();
    let mut kappa_histogram = vec![0u64; cfg.params.q + 1];
    let mut class_size_histogram = vec![0u64; cfg.params.b + 1];
    let mut samples = Vec::new();
    let mut record = |t: u64, p: &Partition, samples: &mut Vec<TraceSample>| {
        if t >= opts.burn_in {
            kappa_histogram[p.kappa()] += 1;
        }
        let due = if opts.thin == 0 { t == 0 } else { t % opts.thin == 0 };
        if due {
            if t >= opts.burn_in {
                for &s in p.sizes().iter().filter(|&&s| s > 0) {
                    class_size_histogram[s] += 1;
                }
            }
            samples.push(TraceSample { step: t, kappa: p.kappa(), state: p.clone() });
        }
    };
    record(0, &p, &mut samples);
    for t in 1..=cfg.steps {
        match chain.step(&mut p) {
            StepOutcome::Moved => moves.moved += 1,
            StepOutcome::SelfLoop => moves.self_loop += 1,
            StepOutcome::Illegal => moves.illegal += 1,
            StepOutcome::Rejected => moves.rejected += 1,
        }
        record(t, &p, &mut samples);
    }
    Ok(Trace {
        samples,
        summary: TraceSummary { steps: cfg.steps, moves, kappa_histogram, class_size_histogram, final_state: p },
    })
}

/// Final states of `count` independent replicas (streams `0..count`), each
/// run for `cfg.steps` transitions from `p0`.
pub fn sample_states(g: &Graph, p0: &Partition, cfg: &ChainConfig, count: usize) -> Result<Vec<Partition>> {
    (0..count as u64)
        .into_par_iter()
        .map(|r| run_replica(g, p0, cfg, RunOptions::default(), r).map(|t| t.summary.final_state))
        .collect()
}

/// Exact one-step distribution from `p`, including self-loop mass. For
/// unlabeled variants, or when `lumped` is set, successor states are reported
/// in canonical form and merged; otherwise labeled successors are kept.
/// Entries are sorted by state.
pub fn transition_row(
    g: &Graph,
    p: &Partition,
    params: &StateParams,
    variant: ChainVariant,
    lumped: bool,
) -> Vec<(Partition, f64)> {
    transition_row_with(p, params, variant, lumped, |p, mv| is_legal_move(g, p, mv, params))
}

/// [`transition_row`] with a caller-supplied legality test.
pub fn transition_row_with(
    p: &Partition,
    params: &StateParams,
    variant: ChainVariant,
    lumped: bool,
    legal: impl Fn(&Partition, Move) -> bool,
) -> Vec<(Partition, f64)> {
    let lumped = lumped || variant.is_unlabeled();
    let n = p.n();
    let c = target_count(variant, params.q, p.kappa());
    let base = 1.0 / (n as f64 * c as f64);
    let mut row: HashMap<Partition, f64> = HashMap::new();
    let key = |x: &Partition| if lumped { canonical_form(x) } else { x.clone() };
    let mut stay = 0.0;
    for v in 0..n {
        for i in 0..c {
            let mv = Move { vertex: v, target: target_slot(p, variant, i) };
            let (outcome, accept) = proposal_with(p, params, variant, mv, &legal);
            if outcome != StepOutcome::Moved {
                stay += base;
                continue;
            }
            let mut next = p.clone();
            next.apply_unchecked(mv);
            *row.entry(key(&next)).or_default() += base * accept;
            stay += base * (1.0 - accept);
        }
    }
    *row.entry(key(p)).or_default() += stay;
    let mut out: Vec<(Partition, f64)> = row.into_iter().collect();
    out.sort_by(|a, b| a.0.assignment().cmp(b.0.assignment()));
    out
}

/// Exact probability of moving from `p1` to a state equal to `p2` (up to
/// relabelling for unlabeled variants, and for the coloring chain on its
/// lumped partition chain).
pub fn transition_prob(g: &Graph, p1: &Partition, p2: &Partition, params: &StateParams, variant: ChainVariant) -> f64 {
    let target = canonical_form(p2);
    transition_row(g, p1, params, variant, true)
        .into_iter()
        .filter(|(s, _)| *s == target)
        .map(|(_, w)| w)
        .sum()
}

/// Labeled one-step probability for the coloring chain.
pub fn transition_prob_labeled(g: &Graph, p1: &Partition, p2: &Partition, params: &StateParams) -> f64 {
    transition_row(g, p1, params, ChainVariant::ColoringMultiplicity, false)
        .into_iter()
        .filter(|(s, _)| s == p2)
        .map(|(_, w)| w)
        .sum()
}

/// Whether any vertex can move at all (ignoring relabellings).
pub fn is_frozen(g: &Graph, p: &Partition, params: &StateParams) -> bool {
    let has_empty = p.kappa() < params.q;
    (0..p.n()).all(|v| {
        let from = p.slot_of(v);
        if !removal_keeps_connected(g, p, v) {
            return true;
        }
        if has_empty && p.size(from) > 1 {
            return false;
        }
        !g.neighbors(v).iter().any(|&w| p.slot_of(w) != from && p.size(p.slot_of(w)) < params.b)
    })
}
