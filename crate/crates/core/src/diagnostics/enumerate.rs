use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{canonical_form, hamming_agree, validate, OmegaKWitness, Partition, StateParams};
use rayon::prelude::*;
use std::sync::atomic::{AtomicUsize, Ordering};

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

/// Deduplicated canonical partitions, sorted by assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    params: StateParams,
    states: Vec<Partition>,
}

impl StateSpace {
    /// Wraps a list of states; they are canonicalized, sorted and deduplicated.
    pub fn from_states(params: StateParams, states: Vec<Partition>) -> StateSpace {
        let mut states: Vec<Partition> = states.iter().map(canonical_form).collect();
        states.sort_by(|a, b| a.assignment().cmp(b.assignment()));
        states.dedup();
        StateSpace { params, states }
    }

    pub fn params(&self) -> &StateParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Partition] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Partition {
        &self.states[i]
    }

    /// Index of the canonical form of `p`.
    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        let c = canonical_form(p);
        self.states.binary_search_by(|s| s.assignment().cmp(c.assignment())).ok()
    }

    /// Number of states with each class count.
    pub fn kappa_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.params.q + 1];
        for s in &self.states {
            counts[s.kappa()] += 1;
        }
        counts
    }
}

/// Backtracking over restricted-growth strings in vertex order.
#[derive(Clone)]
struct Search<'a> {
    g: &'a Graph,
    params: StateParams,
    assign: Vec<usize>,
    members: Vec<Vec<usize>>,
    pos: usize,
}

const NONE: usize = usize::MAX;

impl<'a> Search<'a> {
    fn new(g: &'a Graph, params: StateParams) -> Search<'a> {
        Search { g, params, assign: vec![NONE; g.n()], members: Vec::new(), pos: 0 }
    }

    /// A class whose assigned part is split must be able to reconnect: every
    /// piece needs an unassigned neighbour and the class needs room to grow.
    fn class_viable(&self, c: usize) -> bool {
        let members = &self.members[c];
        if members.len() <= 1 {
            return true;
        }
        let mut seen = vec![members[0]];
        let mut stack = vec![members[0]];
        while let Some(u) = stack.pop() {
            for &w in self.g.neighbors(u) {
                if self.assign[w] == c && !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        if seen.len() == members.len() {
            return true;
        }
        if members.len() >= self.params.b {
            return false;
        }
        // each component must touch an unassigned vertex
        let mut done = vec![false; members.len()];
        for (i, &start) in members.iter().enumerate() {
            if done[i] {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            let mut open = false;
            while let Some(u) = stack.pop() {
                for &w in self.g.neighbors(u) {
                    if self.assign[w] == NONE {
                        open = true;
                    } else if self.assign[w] == c && !comp.contains(&w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            if !open {
                return false;
            }
            for (j, m) in members.iter().enumerate() {
                if comp.contains(m) {
                    done[j] = true;
                }
            }
        }
        true
    }

    fn place(&mut self, c: usize) -> bool {
        let v = self.pos;
        if c == self.members.len() {
            self.members.push(Vec::new());
        }
        self.assign[v] = c;
        self.members[c].push(v);
        self.pos += 1;
        let mut touched = vec![c];
        for &w in self.g.neighbors(v) {
            let cw = self.assign[w];
            if cw != NONE && !touched.contains(&cw) {
                touched.push(cw);
            }
        }
        touched.iter().all(|&x| self.class_viable(x))
    }

    fn unplace(&mut self) {
        self.pos -= 1;
        let v = self.pos;
        let c = self.assign[v];
        self.members[c].pop();
        if self.members[c].is_empty() {
            self.members.pop();
        }
        self.assign[v] = NONE;
    }

    fn choices(&self) -> std::ops::Range<usize> {
        let count = self.members.len();
        0..(count + usize::from(count < self.params.q))
    }

    fn admits(&self, c: usize) -> bool {
        c == self.members.len() || self.members[c].len() < self.params.b
    }

    fn run(&mut self, out: &mut Vec<Partition>, counter: &AtomicUsize, cap: usize) -> bool {
        if self.pos == self.g.n() {
            if counter.fetch_add(1, Ordering::Relaxed) >= cap {
                return false;
            }
            out.push(Partition::from_assignment(self.assign.clone(), self.params.q).expect("slots below q"));
            return true;
        }
        for c in self.choices() {
            if !self.admits(c) {
                continue;
            }
            let ok = self.place(c);
            let keep_going = !ok || self.run(out, counter, cap);
            self.unplace();
            if !keep_going {
                return false;
            }
        }
        true
    }

    /// Viable partial assignments of the first `depth` vertices.
    fn prefixes(&mut self, depth: usize, out: &mut Vec<Search<'a>>) {
        if self.pos == depth {
            out.push(self.clone());
            return;
        }
        for c in self.choices() {
            if !self.admits(c) {
                continue;
            }
            if self.place(c) {
                self.prefixes(depth, out);
            }
            self.unplace();
        }
    }
}

/// All valid states up to relabelling, via backtracking in vertex-index order
/// with pruning on class size, class count and classes that can no longer be
/// connected. Work is split across threads by prefix; the output order is
/// independent of the thread count.
pub fn enumerate_states(g: &Graph, params: &StateParams, cap: usize) -> Result<StateSpace> {
    g.require_connected()?;
    let n = g.n();
    let mut root = Search::new(g, *params);
    let depth = n.min(8);
    let mut prefixes = Vec::new();
    root.prefixes(depth, &mut prefixes);
    let counter = AtomicUsize::new(0);
    let parts: Vec<Option<Vec<Partition>>> = prefixes
        .into_par_iter()
        .map(|mut s| {
            let mut out = Vec::new();
            s.run(&mut out, &counter, cap).then_some(out)
        })
        .collect();
    let mut states = Vec::new();
    for part in parts {
        states.extend(part.ok_or_else(|| Error::TooLarge(format!("more than {cap} states")))?);
    }
    debug_assert!(states.iter().all(|s| validate(g, s, params).is_ok()));
    // vertex-index restricted-growth strings are already canonical and sorted
    Ok(StateSpace { params: *params, states })
}

/// Number of set partitions of `n` items into at most `q` blocks.
pub fn set_partition_count(n: usize, q: usize) -> u128 {
    // Stirling numbers of the second kind, row by row
    let mut row = vec![0u128; q + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..=q).rev() {
            row[j] = row[j].saturating_mul(j as u128).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// All set partitions of `0..n` into at most `q` blocks, canonical and sorted.
pub fn all_set_partitions(n: usize, q: usize, cap: usize) -> Result<Vec<Partition>> {
    if set_partition_count(n, q) > cap as u128 {
        return Err(Error::TooLarge(format!("more than {cap} set partitions")));
    }
    fn rec(assign: &mut Vec<usize>, blocks: usize, n: usize, q: usize, out: &mut Vec<Partition>) {
        if assign.len() == n {
            out.push(Partition::from_assignment(assign.clone(), q).expect("blocks below q"));
            return;
        }
        for c in 0..(blocks + usize::from(blocks < q)) {
            assign.push(c);
            rec(assign, blocks.max(c + 1), n, q, out);
            assign.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), 0, n, q, &mut out);
    Ok(out)
}

/// States of the `K`-local enlargement: every `q`-slot partition whose class
/// contents differ from some valid state on at most `k` vertices, each with a
/// witness (the first valid state at minimal distance).
#[derive(Clone, Debug)]
pub struct Closure {
    pub space: StateSpace,
    pub witnesses: Vec<OmegaKWitness>,
}

pub fn omega_k_closure(base: &StateSpace, n: usize, k: usize, cap: usize) -> Result<Closure> {
    let params = StateParams { k, ..*base.params() };
    if k == 0 {
        let witnesses = base.states().iter().map(|s| OmegaKWitness::new(s.clone(), s.clone())).collect();
        return Ok(Closure { space: StateSpace { params, states: base.states().to_vec() }, witnesses });
    }
    let candidates = all_set_partitions(n, params.q, cap)?;
    let found: Vec<Option<OmegaKWitness>> = candidates
        .into_par_iter()
        .map(|c| {
            let mut best: Option<(usize, &Partition)> = None;
            for b in base.states() {
                let d = hamming_agree(&c, b).len();
                if d <= k && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, b));
                    if d == 0 {
                        break;
                    }
                }
            }
            best.map(|(_, b)| OmegaKWitness::new(c.clone(), b.clone()))
        })
        .collect();
    let witnesses: Vec<OmegaKWitness> = found.into_iter().flatten().collect();
    let states = witnesses.iter().map(|w| w.state.clone()).collect();
    Ok(Closure { space: StateSpace { params, states }, witnesses })
}
