//! Building valid starting partitions, and finding local moves that lower the
//! number of classes.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{hamming_agree, Partition};
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeBreakResult {
    /// Split-off subtree, sorted.
    pub piece: Vec<usize>,
    /// What is left, containing the root, sorted.
    pub remainder: Vec<usize>,
}

/// Rooted view of a tree restricted to `alive` vertices.
struct Rooted {
    parent: Vec<usize>,
    order: Vec<usize>,
    size: Vec<usize>,
}

fn root_tree(tree: &Graph, root: usize, alive: &[bool]) -> Rooted {
    let n = tree.n();
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for &w in tree.neighbors(u) {
            if alive[w] && parent[w] == usize::MAX {
                parent[w] = u;
                order.push(w);
            }
        }
    }
    let mut size = vec![0; n];
    for &u in order.iter().rev() {
        size[u] += 1;
        if u != root {
            size[parent[u]] += size[u];
        }
    }
    Rooted { parent, order, size }
}

/// Descent on an already-rooted tree: from the root, repeatedly step into the
/// lowest-indexed child whose subtree has more than `(b-1)/(delta-1)`
/// vertices, stopping at the first one with at most `b`.
fn descend(tree: &Graph, r: &Rooted, root: usize, b: usize, delta: usize) -> Result<usize> {
    let qualifies = |s: usize| s * (delta - 1) > b - 1;
    let mut u = root;
    loop {
        let child = tree
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&w| w != root && r.parent[w] == u && r.size[w] > 0)
            .find(|&w| qualifies(r.size[w]))
            .ok_or_else(|| Error::Internal(format!("no qualifying child below vertex {u}")))?;
        if r.size[child] <= b {
            return Ok(child);
        }
        u = child;
    }
}

fn check_tree(tree: &Graph) -> Result<()> {
    if !tree.is_connected() || tree.num_edges() + 1 != tree.n() {
        return Err(Error::InvalidGraph("expected a tree".into()));
    }
    Ok(())
}

/// Splits a subtree `T''` off `tree` with `(b-1)/(delta-1) < |T''| <= b`,
/// leaving a subtree that still contains `root`.
///
/// Requires `n >= 2`, max degree `<= delta`, root degree `<= delta - 1`,
/// `b < n`.
pub fn tree_break(tree: &Graph, root: usize, b: usize, delta: usize) -> Result<TreeBreakResult> {
    check_tree(tree)?;
    let n = tree.n();
    if n < 2 || root >= n || b == 0 || b >= n || delta < 2 {
        return Err(Error::InvalidParams(format!("need n >= 2, 1 <= B < n, delta >= 2 (n={n}, B={b}, delta={delta})")));
    }
    if tree.max_degree() > delta || tree.degree(root) > delta - 1 {
        return Err(Error::InvalidParams("degree bound violated".into()));
    }
    let alive = vec![true; n];
    let rooted = root_tree(tree, root, &alive);
    let top = descend(tree, &rooted, root, b, delta)?;
    let mut in_piece = vec![false; n];
    for &u in &rooted.order {
        if u == top || (u != root && in_piece[rooted.parent[u]]) {
            in_piece[u] = true;
        }
    }
    let (piece, remainder): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| in_piece[v]);
    Ok(TreeBreakResult { piece, remainder })
}

/// BFS spanning tree from `start`, returned as a graph on the same vertices
/// together with the BFS visiting order.
pub fn bfs_spanning_tree(g: &Graph, start: usize) -> Result<(Graph, Vec<usize>)> {
    g.require_connected()?;
    let n = g.n();
    let mut seen = vec![false; n];
    let mut order = vec![start];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                edges.push((u, w));
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    Ok((Graph::from_edges(n, &edges)?, order))
}

/// Partitions a connected graph into connected classes of size at most `b` by
/// repeatedly breaking a BFS spanning tree (from vertex 0, rooted at the last
/// vertex BFS reaches). Every class except the last has more than
/// `(b-1)/(delta-1)` vertices. Slots follow extraction order.
pub fn partition_connected(g: &Graph, b: usize) -> Result<Partition> {
    if b == 0 {
        return Err(Error::InvalidParams("B must be positive".into()));
    }
    let n = g.n();
    if n == 0 {
        return Partition::from_assignment(Vec::new(), 1);
    }
    let (tree, order) = bfs_spanning_tree(g, 0)?;
    let root = *order.last().expect("nonempty graph");
    let delta = tree.max_degree().max(2);
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut classes = Vec::new();
    while remaining > b {
        let rooted = root_tree(&tree, root, &alive);
        let top = descend(&tree, &rooted, root, b, delta)?;
        let mut piece = Vec::with_capacity(rooted.size[top]);
        let mut in_piece = vec![false; n];
        for &u in &rooted.order {
            if u == top || (u != root && in_piece[rooted.parent[u]]) {
                in_piece[u] = true;
                piece.push(u);
            }
        }
        for &u in &piece {
            alive[u] = false;
        }
        remaining -= piece.len();
        piece.sort_unstable();
        classes.push(piece);
    }
    classes.push((0..n).filter(|&v| alive[v]).collect());
    let q = classes.len();
    Partition::from_classes(n, &classes, q)
}

/// Serpentine Hamiltonian path of the `k x l` grid (vertex `r*l + c`): row 0
/// left to right, row 1 right to left, and so on.
pub fn grid_hamiltonian_path(k: usize, l: usize) -> Vec<usize> {
    (0..k)
        .flat_map(|r| {
            let row: Vec<usize> = if r % 2 == 0 { (0..l).collect() } else { (0..l).rev().collect() };
            row.into_iter().map(move |c| r * l + c)
        })
        .collect()
}

/// Cuts the serpentine path of the `k x l` grid into consecutive segments of
/// the given sizes, one class per segment.
pub fn partition_grid(k: usize, l: usize, sizes: &[usize]) -> Result<Partition> {
    if sizes.iter().sum::<usize>() != k * l || sizes.contains(&0) {
        return Err(Error::InvalidParams(format!("sizes must be positive and sum to {}", k * l)));
    }
    let path = grid_hamiltonian_path(k, l);
    let mut assignment = vec![0; k * l];
    let mut pos = 0;
    for (slot, &s) in sizes.iter().enumerate() {
        for &v in &path[pos..pos + s] {
            assignment[v] = slot;
        }
        pos += s;
    }
    Partition::from_assignment(assignment, sizes.len())
}

/// Bounds for the reduction search: at most `max_classes` classes per region
/// and at most `max_region` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionSearch {
    pub max_classes: usize,
    pub max_region: usize,
    /// Node budget for the exact repartitioning fallback (0 disables it).
    pub exact_budget: u64,
}

impl ReductionSearch {
    pub fn new(max_classes: usize, max_region: usize) -> ReductionSearch {
        ReductionSearch { max_classes, max_region, exact_budget: 200_000 }
    }

    /// `max_classes = ceil(2 / eps)`.
    pub fn from_epsilon(eps: f64, max_region: usize) -> Result<ReductionSearch> {
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(Error::InvalidParams(format!("epsilon must lie in (0, 2], got {eps}")));
        }
        Ok(ReductionSearch::new(((2.0 / eps).ceil() as usize).max(2), max_region))
    }
}

impl Default for ReductionSearch {
    fn default() -> ReductionSearch {
        ReductionSearch::new(3, usize::MAX)
    }
}

/// A repartition of a connected region `H` (a union of classes) into fewer
/// classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalRepartition {
    pub region: Vec<usize>,
    /// Slots whose classes make up the region, increasing.
    pub before: Vec<usize>,
    /// Replacement classes covering the region.
    pub after: Vec<Vec<usize>>,
}

impl LocalRepartition {
    /// Writes the replacement classes into the lowest freed slots.
    pub fn apply(&self, p: &Partition) -> Partition {
        let mut assignment = p.assignment().to_vec();
        for (class, &slot) in self.after.iter().zip(&self.before) {
            for &v in class {
                assignment[v] = slot;
            }
        }
        Partition::from_assignment(assignment, p.q()).expect("slots reused from the input")
    }

    pub fn kappa_drop(&self) -> usize {
        self.before.len() - self.after.len()
    }
}

/// Class adjacency: `adj[s]` lists slots touching slot `s`, increasing.
pub fn quotient_adjacency(g: &Graph, p: &Partition) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); p.q()];
    for &(u, v) in g.edges() {
        let (a, b) = (p.slot_of(u), p.slot_of(v));
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Connected class sets of size `2..=r` whose lowest-ranked class is `root`
/// (ranked by minimum vertex), found by extension enumeration.
fn class_sets_rooted(adj: &[Vec<usize>], rank: &[usize], root: usize, r: usize) -> Vec<Vec<usize>> {
    fn extend(
        adj: &[Vec<usize>],
        rank: &[usize],
        root: usize,
        r: usize,
        current: &mut Vec<usize>,
        frontier: Vec<usize>,
        banned: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() >= 2 {
            let mut set = current.clone();
            set.sort_unstable();
            out.push(set);
        }
        if current.len() == r {
            return;
        }
        let mut frontier = frontier;
        while let Some(next) = frontier.pop() {
            let mut grown = frontier.clone();
            for &w in &adj[next] {
                if rank[w] > rank[root] && !current.contains(&w) && !banned.contains(&w) && !grown.contains(&w) && w != next {
                    grown.push(w);
                }
            }
            current.push(next);
            extend(adj, rank, root, r, current, grown, banned, out);
            current.pop();
            banned.push(next);
        }
    }
    let frontier: Vec<usize> = adj[root].iter().copied().filter(|&w| rank[w] > rank[root]).rev().collect();
    let mut out = Vec::new();
    let mut banned = Vec::new();
    extend(adj, rank, root, r, &mut vec![root], frontier, &mut banned, &mut out);
    out
}

/// Partitions connected `region` into at most `max_classes` connected classes
/// of size at most `b`: first by tree breaking, then by exact search within
/// the node budget.
pub fn repartition_region(g: &Graph, region: &[usize], b: usize, max_classes: usize, budget: u64) -> Option<Vec<Vec<usize>>> {
    if region.len() > max_classes * b {
        return None;
    }
    let sub = g.induced_subgraph(region);
    if let Ok(p) = partition_connected(&sub, b) {
        if p.kappa() <= max_classes {
            return Some(p.classes().into_iter().map(|c| c.into_iter().map(|i| region[i]).collect()).collect());
        }
    }
    if budget == 0 {
        return None;
    }
    let mut search = ExactSearch { g: &sub, b, budget, assigned: vec![false; sub.n()], classes: Vec::new() };
    if search.solve(max_classes) {
        let mut out: Vec<Vec<usize>> =
            search.classes.into_iter().map(|c| c.into_iter().map(|i| region[i]).collect()).collect();
        for c in &mut out {
            c.sort_unstable();
        }
        return Some(out);
    }
    None
}

struct ExactSearch<'a> {
    g: &'a Graph,
    b: usize,
    budget: u64,
    assigned: Vec<bool>,
    classes: Vec<Vec<usize>>,
}

impl ExactSearch<'_> {
    fn solve(&mut self, classes_left: usize) -> bool {
        let Some(v) = self.assigned.iter().position(|&a| !a) else {
            return true;
        };
        let unassigned = self.assigned.iter().filter(|&&a| !a).count();
        if classes_left == 0 || unassigned > classes_left * self.b {
            return false;
        }
        let mut sets = Vec::new();
        self.connected_sets(v, &mut sets);
        // larger pieces first
        sets.sort_by_key(|s| std::cmp::Reverse(s.len()));
        for set in sets {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            for &u in &set {
                self.assigned[u] = true;
            }
            self.classes.push(set.clone());
            if self.solve(classes_left - 1) {
                return true;
            }
            self.classes.pop();
            for &u in &set {
                self.assigned[u] = false;
            }
        }
        false
    }

    /// Connected unassigned sets containing `v`, of size at most `b`.
    fn connected_sets(&self, v: usize, out: &mut Vec<Vec<usize>>) {
        fn grow(s: &ExactSearch, current: &mut Vec<usize>, mut frontier: Vec<usize>, banned: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(current.clone());
            if current.len() == s.b {
                return;
            }
            while let Some(next) = frontier.pop() {
                let mut grown = frontier.clone();
                for &w in s.g.neighbors(next) {
                    if !s.assigned[w] && !current.contains(&w) && !banned.contains(&w) && !grown.contains(&w) && w != next {
                        grown.push(w);
                    }
                }
                current.push(next);
                grow(s, current, grown, banned, out);
                current.pop();
                banned.push(next);
            }
        }
        let frontier: Vec<usize> = self.g.neighbors(v).iter().copied().filter(|&w| !self.assigned[w]).collect();
        let mut banned = Vec::new();
        grow(self, &mut vec![v], frontier, &mut banned, out);
    }
}

fn reductions_for_root(
    g: &Graph,
    p: &Partition,
    b: usize,
    search: &ReductionSearch,
    adj: &[Vec<usize>],
    members: &[Vec<usize>],
    rank: &[usize],
    root: usize,
    first_only: bool,
    fits: &dyn Fn(usize, usize) -> bool,
) -> Vec<LocalRepartition> {
    let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = class_sets_rooted(adj, rank, root, search.max_classes)
        .into_iter()
        .map(|set| {
            let mut region: Vec<usize> = set.iter().flat_map(|&s| members[s].iter().copied()).collect();
            region.sort_unstable();
            (set, region)
        })
        .filter(|(set, region)| {
            region.len() <= search.max_region && region.len() <= (set.len() - 1) * b && fits(set.len(), region.len())
        })
        .collect();
    candidates.sort_by(|a, b| (a.0.len(), &a.1).cmp(&(b.0.len(), &b.1)));
    let mut out = Vec::new();
    for (set, region) in candidates {
        if let Some(after) = repartition_region(g, &region, b, set.len() - 1, search.exact_budget) {
            let lr = LocalRepartition { region, before: set, after };
            debug_assert!(hamming_agree(p, &lr.apply(p)).iter().all(|v| lr.region.binary_search(v).is_ok()));
            out.push(lr);
            if first_only {
                break;
            }
        }
    }
    out
}

struct ClassIndex {
    adj: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
    rank: Vec<usize>,
    roots: Vec<usize>,
}

fn class_index(g: &Graph, p: &Partition) -> ClassIndex {
    let adj = quotient_adjacency(g, p);
    let mut members = vec![Vec::new(); p.q()];
    for v in 0..p.n() {
        members[p.slot_of(v)].push(v);
    }
    let mut roots: Vec<usize> = (0..p.q()).filter(|&s| !members[s].is_empty()).collect();
    roots.sort_by_key(|&s| members[s][0]);
    let mut rank = vec![usize::MAX; p.q()];
    for (i, &s) in roots.iter().enumerate() {
        rank[s] = i;
    }
    ClassIndex { adj, members, rank, roots }
}

/// First region, ordered by its minimum vertex, then by class count and
/// vertex list, that can be repartitioned into fewer classes.
pub fn find_local_reduction(g: &Graph, p: &Partition, b: usize, search: &ReductionSearch) -> Option<LocalRepartition> {
    find_local_reduction_where(g, p, b, search, |_, _| true)
}

/// [`find_local_reduction`] restricted to regions for which
/// `fits(classes, region_size)` holds.
pub fn find_local_reduction_where(
    g: &Graph,
    p: &Partition,
    b: usize,
    search: &ReductionSearch,
    fits: impl Fn(usize, usize) -> bool,
) -> Option<LocalRepartition> {
    let idx = class_index(g, p);
    idx.roots.iter().find_map(|&root| {
        reductions_for_root(g, p, b, search, &idx.adj, &idx.members, &idx.rank, root, true, &fits).into_iter().next()
    })
}

/// Every region the search accepts, in search order.
pub fn local_reductions(g: &Graph, p: &Partition, b: usize, search: &ReductionSearch) -> Vec<LocalRepartition> {
    let idx = class_index(g, p);
    idx.roots
        .iter()
        .flat_map(|&root| {
            reductions_for_root(g, p, b, search, &idx.adj, &idx.members, &idx.rank, root, false, &|_, _| true)
        })
        .collect()
}
