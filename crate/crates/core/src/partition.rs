//! Bounded contiguous partitions: the state space of the chain, single-vertex
//! moves and their legality, canonical relabelling.

use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{HashMap, VecDeque};

/// Chain parameters: `q` class slots, class size bound `b`, locality radius `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateParams {
    pub q: usize,
    pub b: usize,
    pub k: usize,
}

impl StateParams {
    pub fn new(q: usize, b: usize, k: usize) -> Result<StateParams> {
        if q == 0 || b == 0 {
            return Err(Error::InvalidParams(format!("need q >= 1 and B >= 1, got q={q}, B={b}")));
        }
        Ok(StateParams { q, b, k })
    }
}

/// Assignment of every vertex to one of `q` slots, with cached slot sizes and
/// the number of nonempty slots (`kappa`).
///
/// Serializes as the JSON array of slot ids indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    kappa: usize,
}

/// Moves `vertex` into slot `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub vertex: usize,
    pub target: usize,
}

/// Why a partition failed validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Violation {
    Length { expected: usize, got: usize },
    SlotCount { expected: usize, got: usize },
    Oversize { slot: usize, size: usize },
    Disconnected { slot: usize },
}

impl Partition {
    /// Builds a partition with `q` slots. Every entry must be `< q`.
    pub fn from_assignment(assignment: Vec<usize>, q: usize) -> Result<Partition> {
        let mut sizes = vec![0; q];
        for (v, &s) in assignment.iter().enumerate() {
            if s >= q {
                return Err(Error::InvalidPartition(format!("vertex {v} assigned to slot {s} >= q={q}")));
            }
            sizes[s] += 1;
        }
        let kappa = sizes.iter().filter(|&&c| c > 0).count();
        Ok(Partition { assignment, sizes, kappa })
    }

    /// Builds a partition from a list of disjoint classes covering `0..n`.
    pub fn from_classes(n: usize, classes: &[Vec<usize>], q: usize) -> Result<Partition> {
        if classes.len() > q {
            return Err(Error::InvalidPartition(format!("{} classes exceed q={q}", classes.len())));
        }
        let mut assignment = vec![usize::MAX; n];
        for (slot, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n || assignment[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range or repeated")));
                }
                assignment[v] = slot;
            }
        }
        if let Some(v) = assignment.iter().position(|&s| s == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        Partition::from_assignment(assignment, q)
    }

    /// Every vertex in its own slot (`q >= n`).
    pub fn singletons(n: usize, q: usize) -> Result<Partition> {
        Partition::from_assignment((0..n).collect(), q)
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn q(&self) -> usize {
        self.sizes.len()
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn slot_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn size(&self, slot: usize) -> usize {
        self.sizes[slot]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Vertices of `slot` in increasing order.
    pub fn members(&self, slot: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.assignment[v] == slot).collect()
    }

    /// Nonempty classes, in slot order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut by_slot = vec![Vec::new(); self.q()];
        for (v, &s) in self.assignment.iter().enumerate() {
            by_slot[s].push(v);
        }
        by_slot.into_iter().filter(|c| !c.is_empty()).collect()
    }

    pub fn nonempty_slots(&self) -> Vec<usize> {
        (0..self.q()).filter(|&s| self.sizes[s] > 0).collect()
    }

    pub fn first_empty_slot(&self) -> Option<usize> {
        self.sizes.iter().position(|&c| c == 0)
    }

    /// Same assignment with a different number of slots.
    pub fn with_q(&self, q: usize) -> Result<Partition> {
        Partition::from_assignment(self.assignment.clone(), q)
    }

    /// Applies a move without any legality check. Single-owner in-place
    /// variant of [`apply_move`]; the caller is responsible for validity.
    pub fn apply_unchecked(&mut self, mv: Move) {
        let from = self.assignment[mv.vertex];
        if from == mv.target {
            return;
        }
        self.sizes[from] -= 1;
        if self.sizes[from] == 0 {
            self.kappa -= 1;
        }
        if self.sizes[mv.target] == 0 {
            self.kappa += 1;
        }
        self.sizes[mv.target] += 1;
        self.assignment[mv.vertex] = mv.target;
    }

    /// Relabels slots through `perm` (`new_slot = perm[old_slot]`).
    pub fn relabel(&self, perm: &[usize]) -> Partition {
        let assignment = self.assignment.iter().map(|&s| perm[s]).collect();
        Partition::from_assignment(assignment, self.q()).expect("permutation keeps slots in range")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.assignment.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    /// The slot count is taken as `max slot + 1`; use [`Partition::with_q`] to widen it.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let assignment = Vec::<usize>::deserialize(d)?;
        let q = assignment.iter().max().map_or(1, |&m| m + 1);
        Partition::from_assignment(assignment, q).map_err(serde::de::Error::custom)
    }
}

/// Checks membership in the state space: right length and slot count, every
/// nonempty class connected and of size at most `B`.
pub fn validate(g: &Graph, p: &Partition, params: &StateParams) -> std::result::Result<(), Violation> {
    if p.n() != g.n() {
        return Err(Violation::Length { expected: g.n(), got: p.n() });
    }
    if p.q() != params.q {
        return Err(Violation::SlotCount { expected: params.q, got: p.q() });
    }
    for slot in 0..p.q() {
        let size = p.size(slot);
        if size > params.b {
            return Err(Violation::Oversize { slot, size });
        }
    }
    let mut by_slot = vec![Vec::new(); p.q()];
    for v in 0..p.n() {
        by_slot[p.slot_of(v)].push(v);
    }
    for (slot, members) in by_slot.iter().enumerate() {
        if members.len() > 1 && !class_connected(g, p, slot, members[0], None) {
            return Err(Violation::Disconnected { slot });
        }
    }
    Ok(())
}

pub fn is_valid(g: &Graph, p: &Partition, params: &StateParams) -> bool {
    validate(g, p, params).is_ok()
}

/// BFS inside `slot` from `start`, optionally skipping `excluded`; true when
/// every member (other than `excluded`) is reached.
fn class_connected(g: &Graph, p: &Partition, slot: usize, start: usize, excluded: Option<usize>) -> bool {
    let target = p.size(slot) - usize::from(excluded.is_some());
    if target == 0 {
        return true;
    }
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if p.slot_of(w) == slot && Some(w) != excluded && !seen.contains(&w) {
                seen.push(w);
                queue.push_back(w);
            }
        }
    }
    seen.len() == target
}

/// True when removing `v` leaves the rest of its class connected (or empty).
pub fn removal_keeps_connected(g: &Graph, p: &Partition, v: usize) -> bool {
    let slot = p.slot_of(v);
    if p.size(slot) <= 2 {
        return true;
    }
    match g.neighbors(v).iter().find(|&&w| p.slot_of(w) == slot) {
        Some(&start) => class_connected(g, p, slot, start, Some(v)),
        None => false,
    }
}

/// Legality of a move from a valid state: the source class minus the vertex
/// stays connected (or becomes empty) and the target is either empty or
/// contains a neighbour of the vertex and has room. Moving to the vertex's
/// own slot is a legal self-loop.
pub fn is_legal_move(g: &Graph, p: &Partition, mv: Move, params: &StateParams) -> bool {
    if mv.vertex >= p.n() || mv.target >= p.q() {
        return false;
    }
    let from = p.slot_of(mv.vertex);
    if from == mv.target {
        return true;
    }
    let target_size = p.size(mv.target);
    if target_size > 0 {
        if target_size + 1 > params.b {
            return false;
        }
        if !g.neighbors(mv.vertex).iter().any(|&w| p.slot_of(w) == mv.target) {
            return false;
        }
    }
    removal_keeps_connected(g, p, mv.vertex)
}

/// All non-self-loop legal moves. With `distinct_empty` only the lowest empty
/// slot is offered, and a singleton moving into it is treated as a self-loop
/// (the resulting partition is the same up to labels).
pub fn legal_moves(g: &Graph, p: &Partition, params: &StateParams, distinct_empty: bool) -> Vec<Move> {
    let first_empty = p.first_empty_slot();
    let mut moves = Vec::new();
    for v in 0..p.n() {
        let from = p.slot_of(v);
        let keeps = removal_keeps_connected(g, p, v);
        if !keeps {
            continue;
        }
        let mut neighbor_slots: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&w| p.slot_of(w))
            .filter(|&s| s != from && p.size(s) < params.b)
            .collect();
        neighbor_slots.sort_unstable();
        neighbor_slots.dedup();
        moves.extend(neighbor_slots.into_iter().map(|target| Move { vertex: v, target }));
        if distinct_empty {
            if let Some(e) = first_empty {
                if p.size(from) > 1 {
                    moves.push(Move { vertex: v, target: e });
                }
            }
        } else {
            moves.extend((0..p.q()).filter(|&s| p.size(s) == 0).map(|target| Move { vertex: v, target }));
        }
    }
    moves.sort_unstable_by_key(|m| (m.vertex, m.target));
    moves
}

/// Applies a legal move, returning the new state.
pub fn apply_move(g: &Graph, p: &Partition, mv: Move, params: &StateParams) -> Result<Partition> {
    if !is_legal_move(g, p, mv, params) {
        return Err(Error::IllegalMove { vertex: mv.vertex, slot: mv.target });
    }
    let mut next = p.clone();
    next.apply_unchecked(mv);
    Ok(next)
}

/// Relabels slots so that nonempty classes are numbered `0..kappa` in order
/// of their minimum vertex; empty slots come last.
pub fn canonical_form(p: &Partition) -> Partition {
    let mut perm = vec![usize::MAX; p.q()];
    let mut next = 0;
    for &s in &p.assignment {
        if perm[s] == usize::MAX {
            perm[s] = next;
            next += 1;
        }
    }
    for slot in perm.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    p.relabel(&perm)
}

pub fn is_canonical(p: &Partition) -> bool {
    canonical_form(p).assignment == p.assignment
}

/// Vertices whose containing class, as a vertex set, differs between the two
/// partitions. Label independent.
pub fn hamming_agree(p1: &Partition, p2: &Partition) -> Vec<usize> {
    let c1 = canonical_form(p1);
    let c2 = canonical_form(p2);
    // a vertex agrees iff its class is identical in both; classes are
    // identical iff they map to each other one-to-one on every member
    let mut pair_count: HashMap<(usize, usize), usize> = HashMap::new();
    for v in 0..c1.n() {
        *pair_count.entry((c1.slot_of(v), c2.slot_of(v))).or_default() += 1;
    }
    (0..c1.n())
        .filter(|&v| {
            let (a, b) = (c1.slot_of(v), c2.slot_of(v));
            let shared = pair_count[&(a, b)];
            !(shared == c1.size(a) && shared == c2.size(b))
        })
        .collect()
}

/// Certificate that `state` lies in the `K`-local enlargement of the state
/// space: `witness` is a valid state agreeing with it outside `differing`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaKWitness {
    pub state: Partition,
    pub witness: Partition,
    pub differing: Vec<usize>,
}

impl OmegaKWitness {
    pub fn new(state: Partition, witness: Partition) -> OmegaKWitness {
        let differing = hamming_agree(&state, &witness);
        OmegaKWitness { state, witness, differing }
    }

    /// Re-checks the certificate from scratch.
    pub fn verify(&self, g: &Graph, params: &StateParams) -> bool {
        self.differing.len() <= params.k
            && is_valid(g, &self.witness, params)
            && hamming_agree(&self.state, &self.witness) == self.differing
    }
}
