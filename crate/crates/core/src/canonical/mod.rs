//! Canonical paths between two states as explicit sequences of single-vertex
//! moves, and the congestion they induce.
//!
//! A path first reduces both endpoints until enough slots are free, then
//! swaps the classes of one reduced state for those of the other one interval
//! at a time, in the order given by an arc sequence from [`crate::mountain`].

mod congestion;
mod theta;

pub use congestion::{all_pairs_paths, congestion, path_state_indices, transition_edge_count, CongestionReport};
pub use theta::{build_theta, differs_on_connected, greedy_assign, reduction_neighbors, ThetaMap};

use crate::error::{Error, Result};
use crate::graph::{make_intervals, Graph, IntervalDecomposition, VertexOrdering};
use crate::mountain::{climb, Arc, ArcSequence, CycleLabels};
use crate::partition::{canonical_form, is_legal_move, is_valid, Move, Partition, StateParams};
use crate::seed::{find_local_reduction_where, ReductionSearch};
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

/// Classes grouped by the lowest interval they touch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiDecomposition {
    /// `classes_by_interval[i]`: classes whose minimum interval index is `i`,
    /// each sorted, ordered by minimum vertex.
    pub classes_by_interval: Vec<Vec<Vec<usize>>>,
    pub counts: Vec<usize>,
    pub total: usize,
    /// Intervals `i` whose classes reach beyond `V_i ∪ V_{i+1}`.
    pub cover_violations: Vec<usize>,
}

impl PhiDecomposition {
    /// Vertices covered by the classes of interval `i`, sorted.
    pub fn vertices(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.classes_by_interval[i].iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }
}

pub fn phi_decompose(p: &Partition, iv: &IntervalDecomposition) -> PhiDecomposition {
    let m = iv.m();
    let mut classes = p.classes();
    classes.sort_by_key(|c| c[0]);
    let mut by = vec![Vec::new(); m];
    let mut bad = vec![false; m];
    for c in classes {
        let i = c.iter().map(|&v| iv.index_of(v)).min().expect("classes are nonempty");
        if c.iter().any(|&v| iv.index_of(v) > i + 1) {
            bad[i] = true;
        }
        by[i].push(c);
    }
    let counts: Vec<usize> = by.iter().map(Vec::len).collect();
    PhiDecomposition {
        total: counts.iter().sum(),
        counts,
        classes_by_interval: by,
        cover_violations: (0..m).filter(|&i| bad[i]).collect(),
    }
}

/// Intervals of length `2 B band` along `ord`, the blocks the paths are cut on.
pub fn path_intervals(g: &Graph, ord: &VertexOrdering, b: usize) -> Result<IntervalDecomposition> {
    make_intervals(g, ord, 2 * b * ord.bandwidth().max(1))
}

/// Headroom kept free of classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Slack {
    /// Reduce below `q - 10t` and expect checkpoints at most `q - 6t`.
    Strict,
    /// Reduce to at most `q - spare`; checkpoints only need `q`.
    Relaxed { spare: usize },
}

impl Slack {
    /// Largest class count accepted at the end of the reduction phase.
    pub fn phase0_target(&self, q: usize, t: usize) -> Result<usize> {
        match *self {
            Slack::Strict => {
                if q <= 10 * t {
                    return Err(Error::Infeasible(format!("q={q} leaves no room below q-10t with t={t}")));
                }
                Ok(q - 10 * t - 1)
            }
            Slack::Relaxed { spare } => {
                if spare == 0 || spare >= q {
                    return Err(Error::InvalidParams(format!("spare must lie in 1..q, got {spare}")));
                }
                Ok(q - spare)
            }
        }
    }

    pub fn checkpoint_bound(&self, q: usize, t: usize) -> usize {
        match self {
            Slack::Strict => q.saturating_sub(6 * t),
            Slack::Relaxed { .. } => q,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PathConfig {
    pub slack: Slack,
    pub search: ReductionSearch,
}

impl Default for PathConfig {
    fn default() -> PathConfig {
        PathConfig { slack: Slack::Relaxed { spare: 1 }, search: ReductionSearch::default() }
    }
}

/// Move sequence under construction, with the slot each move vacated.
struct Walk<'a> {
    g: &'a Graph,
    state: Partition,
    moves: Vec<Move>,
    from: Vec<usize>,
    peak: usize,
}

impl<'a> Walk<'a> {
    fn new(g: &'a Graph, state: Partition) -> Walk<'a> {
        let peak = state.kappa();
        Walk { g, state, moves: Vec::new(), from: Vec::new(), peak }
    }

    fn push(&mut self, mv: Move) {
        self.from.push(self.state.slot_of(mv.vertex));
        self.state.apply_unchecked(mv);
        self.moves.push(mv);
        self.peak = self.peak.max(self.state.kappa());
    }

    /// Splits the class in `slot` into singletons, removing the largest leaf
    /// of a BFS tree rooted at the minimum vertex each time.
    fn shatter(&mut self, slot: usize) -> Result<()> {
        let members = self.state.members(slot);
        if members.len() <= 1 {
            return Ok(());
        }
        let root = members[0];
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut children: HashMap<usize, usize> = members.iter().map(|&v| (v, 0)).collect();
        let mut queue = VecDeque::from([root]);
        parent.insert(root, root);
        while let Some(u) = queue.pop_front() {
            for &w in self.g.neighbors(u) {
                if self.state.slot_of(w) == slot && !parent.contains_key(&w) {
                    parent.insert(w, u);
                    *children.get_mut(&u).unwrap() += 1;
                    queue.push_back(w);
                }
            }
        }
        let mut alive = members;
        while alive.len() > 1 {
            let pos = alive
                .iter()
                .rposition(|&v| v != root && children[&v] == 0)
                .ok_or_else(|| Error::Internal("class is not connected".into()))?;
            let leaf = alive.remove(pos);
            *children.get_mut(&parent[&leaf]).unwrap() -= 1;
            let empty = self.state.first_empty_slot().ok_or_else(|| {
                Error::Infeasible(format!("shattering needs more than q={} classes", self.state.q()))
            })?;
            self.push(Move { vertex: leaf, target: empty });
        }
        Ok(())
    }

    /// Joins the singletons of `class` into the slot of its minimum vertex,
    /// in BFS order.
    fn merge(&mut self, class: &[usize]) {
        let root = class[0];
        let anchor = self.state.slot_of(root);
        let mut seen = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in self.g.neighbors(u) {
                if class.binary_search(&w).is_ok() && !seen.contains(&w) {
                    seen.push(w);
                    queue.push_back(w);
                    self.push(Move { vertex: w, target: anchor });
                }
            }
        }
    }

    fn has_class(&self, class: &[usize]) -> bool {
        let s = self.state.slot_of(class[0]);
        self.state.size(s) == class.len() && class.iter().all(|&v| self.state.slot_of(v) == s)
    }

    /// Shatters every class absent from `target`, then builds the missing
    /// target classes. `target` classes are sorted and ordered by minimum.
    fn transform_to(&mut self, target: &[Vec<usize>]) -> Result<()> {
        let n = self.state.n();
        let mut id = vec![usize::MAX; n];
        for (i, c) in target.iter().enumerate() {
            for &v in c {
                id[v] = i;
            }
        }
        let mut slots = self.state.nonempty_slots();
        let firsts: Vec<usize> = slots.iter().map(|&s| self.state.members(s)[0]).collect();
        let mut order: Vec<usize> = (0..slots.len()).collect();
        order.sort_by_key(|&i| firsts[i]);
        slots = order.into_iter().map(|i| slots[i]).collect();
        for s in slots {
            let members = self.state.members(s);
            let c = &target[id[members[0]]];
            if c.as_slice() != members.as_slice() {
                self.shatter(s)?;
            }
        }
        for c in target {
            if c.len() > 1 && !self.has_class(c) {
                self.merge(c);
            }
        }
        Ok(())
    }
}

/// Result of reducing a state below a class-count target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phase0 {
    pub reduced: Partition,
    pub moves: Vec<Move>,
    /// Slot vacated by each move, parallel to `moves`.
    pub from_slots: Vec<usize>,
    pub reductions: usize,
    pub peak_kappa: usize,
}

/// Applies local reductions until at most `target` classes remain. Each
/// reduction is expanded into single moves: the region is shattered leaf
/// first, then the replacement classes are grown back. Only reductions whose
/// shattered peak fits in `q` slots are used.
pub fn phase0_reduce(
    g: &Graph,
    p: &Partition,
    params: &StateParams,
    target: usize,
    search: &ReductionSearch,
) -> Result<Phase0> {
    let mut walk = Walk::new(g, p.clone());
    let mut reductions = 0;
    while walk.state.kappa() > target {
        let k = walk.state.kappa();
        let q = params.q.min(p.q());
        let lr = find_local_reduction_where(g, &walk.state, params.b, search, |j, h| k - j + h <= q)
            .ok_or(Error::ReductionUnavailable { kappa: k })?;
        for &slot in &lr.before {
            walk.shatter(slot)?;
        }
        let mut after = lr.after.clone();
        for c in &mut after {
            c.sort_unstable();
        }
        after.sort_by_key(|c| c[0]);
        for c in &after {
            walk.merge(c);
        }
        reductions += 1;
    }
    Ok(Phase0 { peak_kappa: walk.peak, reduced: walk.state, moves: walk.moves, from_slots: walk.from, reductions })
}

/// Interval indices inside the arc, strictly outside it, and the boundary
/// vertices `(b+, b-)` following and preceding it.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ArcSplit {
    inside: Vec<bool>,
    outside: Vec<bool>,
    b_plus: Option<usize>,
    b_minus: Option<usize>,
}

fn split_arc(arc: Arc, m: usize) -> ArcSplit {
    let mut inside = vec![false; m];
    let mut outside = vec![false; m];
    for v in arc.vertices(m) {
        inside[v] = true;
    }
    if arc.len == 0 {
        return ArcSplit { inside, outside: vec![true; m], b_plus: None, b_minus: None };
    }
    if arc.len == m {
        return ArcSplit { inside, outside, b_plus: None, b_minus: None };
    }
    let rest = m - arc.len;
    let b_plus = (arc.start + arc.len) % m;
    let b_minus = (arc.start + m - 1) % m;
    for j in 1..rest.saturating_sub(1) {
        outside[(b_plus + j) % m] = true;
    }
    ArcSplit { inside, outside, b_plus: Some(b_plus), b_minus: Some(b_minus) }
}

/// Classes required at a checkpoint: those of `phi2` on inside intervals and
/// of `phi` on outside intervals; every other vertex is a singleton.
fn checkpoint_target(n: usize, phi: &PhiDecomposition, phi2: &PhiDecomposition, split: &ArcSplit) -> Result<Vec<Vec<usize>>> {
    let mut covered = vec![false; n];
    let mut out = Vec::new();
    for i in 0..split.inside.len() {
        let source = if split.inside[i] {
            phi2
        } else if split.outside[i] {
            phi
        } else {
            continue;
        };
        for c in &source.classes_by_interval[i] {
            for &v in c {
                if covered[v] {
                    return Err(Error::Internal(format!("vertex {v} claimed by two checkpoint classes")));
                }
                covered[v] = true;
            }
            out.push(c.clone());
        }
    }
    out.extend((0..n).filter(|&v| !covered[v]).map(|v| vec![v]));
    out.sort_by_key(|c| c[0]);
    Ok(out)
}

/// Audit of one phase boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub phase: usize,
    pub arc: Arc,
    pub kappa: usize,
    /// Moves spent in this phase.
    pub moves: usize,
    /// Largest class count reached within the phase minus the count at its start.
    pub rise: usize,
    /// Condition (a): target classes present on every inside interval.
    pub agrees_inside: bool,
    /// Condition (b): source classes present on every outside interval.
    pub agrees_outside: bool,
    /// Vertices near the boundary required to be singletons that are not.
    pub boundary_violations: usize,
    /// Those among them not already forced into a larger class by (a) or (b).
    pub unforced_violations: usize,
    /// Class count minus the count predicted from the inside and outside intervals.
    pub error_term: i64,
    pub within_bound: bool,
}

fn class_present(p: &Partition, class: &[usize]) -> bool {
    let s = p.slot_of(class[0]);
    p.size(s) == class.len() && class.iter().all(|&v| p.slot_of(v) == s)
}

/// Checks conditions (a), (b) and the boundary singleton condition on
/// `state`, reading the sets off the two decompositions directly.
fn audit(state: &Partition, phi: &PhiDecomposition, phi2: &PhiDecomposition, split: &ArcSplit) -> (bool, bool, usize, usize, i64) {
    let m = split.inside.len();
    let inside: Vec<usize> = (0..m).filter(|&i| split.inside[i]).collect();
    let outside: Vec<usize> = (0..m).filter(|&i| split.outside[i]).collect();
    let a = inside.iter().all(|&i| phi2.classes_by_interval[i].iter().all(|c| class_present(state, c)));
    let b = outside.iter().all(|&i| phi.classes_by_interval[i].iter().all(|c| class_present(state, c)));
    let mut forced = vec![false; state.n()];
    for &i in &inside {
        for v in phi2.vertices(i) {
            forced[v] = true;
        }
    }
    for &i in &outside {
        for v in phi.vertices(i) {
            forced[v] = true;
        }
    }
    let mut must_be_single: Vec<usize> = Vec::new();
    if let Some(i) = split.b_plus {
        let j = (i + m - 1) % m;
        let exclude = phi2.vertices(j);
        must_be_single.extend(phi.vertices(i).into_iter().chain(phi.vertices(j)).filter(|v| exclude.binary_search(v).is_err()));
    }
    if let Some(i) = split.b_minus {
        let j = (i + 1) % m;
        let exclude = phi2.vertices(j);
        must_be_single.extend(phi.vertices(i).into_iter().chain(phi.vertices(j)).filter(|v| exclude.binary_search(v).is_err()));
    }
    must_be_single.sort_unstable();
    must_be_single.dedup();
    let bad: Vec<usize> = must_be_single.into_iter().filter(|&v| state.size(state.slot_of(v)) > 1).collect();
    let unforced = bad.iter().filter(|&&v| !forced[v]).count();
    let predicted: usize =
        outside.iter().map(|&i| phi.counts[i]).sum::<usize>() + inside.iter().map(|&i| phi2.counts[i]).sum::<usize>();
    (a, b, bad.len(), unforced, state.kappa() as i64 - predicted as i64)
}

/// A path from `start` through `moves`, with its construction record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonicalPath {
    pub start: Partition,
    pub moves: Vec<Move>,
    /// Moves reducing the first endpoint.
    pub prefix_len: usize,
    /// Trailing moves undoing the reduction of the second endpoint.
    pub suffix_len: usize,
    pub t: usize,
    pub m: usize,
    pub labels: Vec<i64>,
    pub arcs: Option<ArcSequence>,
    pub checkpoints: Vec<Checkpoint>,
    pub peak_kappa: usize,
    pub max_phase_rise: usize,
}

impl CanonicalPath {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Every state along the path, starting with `start`.
    pub fn states(&self) -> Vec<Partition> {
        let mut cur = self.start.clone();
        let mut out = vec![cur.clone()];
        for &mv in &self.moves {
            cur.apply_unchecked(mv);
            out.push(cur.clone());
        }
        out
    }

    pub fn end(&self) -> Partition {
        let mut cur = self.start.clone();
        for &mv in &self.moves {
            cur.apply_unchecked(mv);
        }
        cur
    }

    /// `len <= 2 n^2`.
    pub fn within_length_bound(&self) -> bool {
        let n = self.start.n();
        self.len() <= 2 * n * n
    }

    pub fn checkpoints_hold(&self) -> bool {
        self.checkpoints.iter().all(|c| c.agrees_inside && c.agrees_outside && c.unforced_violations == 0)
    }
}

/// Builds the canonical path from `w` to `w2`. The end state equals `w2` up
/// to relabeling of slots.
pub fn build_path(
    g: &Graph,
    w: &Partition,
    w2: &Partition,
    params: &StateParams,
    iv: &IntervalDecomposition,
    cfg: &PathConfig,
) -> Result<CanonicalPath> {
    for p in [w, w2] {
        if p.q() != params.q || !is_valid(g, p, params) {
            return Err(Error::InvalidPartition("path endpoint is not a valid state".into()));
        }
    }
    let (t, m) = (iv.t(), iv.m());
    let mut path = CanonicalPath {
        start: w.clone(),
        moves: Vec::new(),
        prefix_len: 0,
        suffix_len: 0,
        t,
        m,
        labels: Vec::new(),
        arcs: None,
        checkpoints: Vec::new(),
        peak_kappa: w.kappa(),
        max_phase_rise: 0,
    };
    if canonical_form(w) == canonical_form(w2) {
        return Ok(path);
    }
    let target = cfg.slack.phase0_target(params.q, t)?;
    let bound = cfg.slack.checkpoint_bound(params.q, t);
    let first = phase0_reduce(g, w, params, target, &cfg.search)?;
    let second = phase0_reduce(g, w2, params, target, &cfg.search)?;
    let phi = phi_decompose(&first.reduced, iv);
    let phi2 = phi_decompose(&second.reduced, iv);
    if !phi.cover_violations.is_empty() || !phi2.cover_violations.is_empty() {
        return Err(Error::InvalidParams(format!("interval length t={t} is too short for classes of size {}", params.b)));
    }
    let labels: Vec<i64> = (0..m).map(|i| phi2.counts[i] as i64 - phi.counts[i] as i64).collect();
    let arcs = climb(&CycleLabels::tight(labels.clone())?)?;

    let mut walk = Walk::new(g, w.clone());
    walk.moves = first.moves;
    walk.from = first.from_slots;
    walk.state = first.reduced;
    walk.peak = first.peak_kappa;
    let prefix_len = walk.moves.len();
    for (k, &arc) in arcs.arcs.iter().enumerate() {
        let split = split_arc(arc, m);
        let before = walk.moves.len();
        let start_kappa = walk.state.kappa();
        let outer_peak = walk.peak;
        walk.peak = start_kappa;
        if k > 0 {
            walk.transform_to(&checkpoint_target(g.n(), &phi, &phi2, &split)?)?;
        }
        let rise = walk.peak - start_kappa;
        walk.peak = walk.peak.max(outer_peak);
        let (agrees_inside, agrees_outside, boundary_violations, unforced_violations, error_term) =
            audit(&walk.state, &phi, &phi2, &split);
        path.checkpoints.push(Checkpoint {
            phase: k,
            arc,
            kappa: walk.state.kappa(),
            moves: walk.moves.len() - before,
            rise,
            agrees_inside,
            agrees_outside,
            boundary_violations,
            unforced_violations,
            error_term,
            within_bound: walk.state.kappa() <= bound,
        });
    }
    if canonical_form(&walk.state) != canonical_form(&second.reduced) {
        return Err(Error::Internal("phases did not reach the reduced target".into()));
    }

    // replay the second reduction backwards, renaming its slots to match
    let reduced = &second.reduced;
    let mut perm = vec![usize::MAX; params.q];
    for v in 0..g.n() {
        perm[reduced.slot_of(v)] = walk.state.slot_of(v);
    }
    let mut free = (0..params.q).filter(|&s| walk.state.size(s) == 0);
    for s in 0..params.q {
        if perm[s] == usize::MAX {
            perm[s] = free.next().expect("equal class counts leave equal free slots");
        }
    }
    for j in (0..second.moves.len()).rev() {
        walk.push(Move { vertex: second.moves[j].vertex, target: perm[second.from_slots[j]] });
    }
    debug_assert_eq!(canonical_form(&walk.state), canonical_form(w2));

    path.max_phase_rise = path.checkpoints.iter().map(|c| c.rise).max().unwrap_or(0);
    path.prefix_len = prefix_len;
    path.suffix_len = second.moves.len();
    path.moves = walk.moves;
    path.peak_kappa = walk.peak;
    path.labels = labels;
    path.arcs = Some(arcs);
    Ok(path)
}

/// Result of replaying a path move by move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCheck {
    pub steps: usize,
    /// Indices of moves that were not legal chain moves.
    pub illegal: Vec<usize>,
    pub max_kappa: usize,
    pub start_matches: bool,
    pub end_matches: bool,
}

impl PathCheck {
    pub fn ok(&self) -> bool {
        self.illegal.is_empty() && self.start_matches && self.end_matches
    }
}

/// Replays `path`, checking every move for legality and the endpoints
/// against `w` and `w2` up to relabeling.
pub fn check_path(g: &Graph, path: &CanonicalPath, params: &StateParams, w: &Partition, w2: &Partition) -> PathCheck {
    let mut cur = path.start.clone();
    let mut illegal = Vec::new();
    let mut max_kappa = cur.kappa();
    for (i, &mv) in path.moves.iter().enumerate() {
        if !is_legal_move(g, &cur, mv, params) {
            illegal.push(i);
        }
        cur.apply_unchecked(mv);
        max_kappa = max_kappa.max(cur.kappa());
    }
    PathCheck {
        steps: path.moves.len(),
        illegal,
        max_kappa,
        start_matches: canonical_form(&path.start) == canonical_form(w),
        end_matches: canonical_form(&cur) == canonical_form(w2),
    }
}
