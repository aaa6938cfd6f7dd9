//! Bandwidth orderings: exact branch-and-bound for small graphs and a
//! heuristic (reverse Cuthill-McKee plus coordinate sweeps) for the rest.

use super::Graph;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

/// Default vertex-count limit for [`bandwidth_exact`].
pub const DEFAULT_EXACT_LIMIT: usize = 14;

/// A bijection `vertex -> rank` with ranks `1..=n`, together with its realized
/// bandwidth `max |rank(u) - rank(v)|` over edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexOrdering {
    rank: Vec<usize>,
    order: Vec<usize>,
    bandwidth: usize,
}

impl VertexOrdering {
    /// Builds an ordering from the vertex sequence (first entry gets rank 1).
    pub fn from_order(g: &Graph, order: Vec<usize>) -> Result<VertexOrdering> {
        let n = g.n();
        if order.len() != n {
            return Err(Error::InvalidParams("ordering length differs from n".into()));
        }
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != 0 {
                return Err(Error::InvalidParams("ordering is not a permutation".into()));
            }
            rank[v] = i + 1;
        }
        let bandwidth = realized_bandwidth(g, &rank);
        Ok(VertexOrdering { rank, order, bandwidth })
    }

    pub fn identity(g: &Graph) -> VertexOrdering {
        VertexOrdering::from_order(g, (0..g.n()).collect()).expect("identity is a permutation")
    }

    /// Rank of `v` in `1..=n`.
    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    /// Vertices in increasing rank.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }
}

fn realized_bandwidth(g: &Graph, rank: &[usize]) -> usize {
    g.edges().iter().map(|&(u, v)| rank[u].abs_diff(rank[v])).max().unwrap_or(0)
}

/// Exact bandwidth by branch-and-bound over prefix placements.
///
/// The incumbent starts at the heuristic ordering; each round asks whether a
/// strictly smaller bandwidth is achievable. A prefix is pruned as soon as a
/// placed vertex has more unplaced neighbours than positions left within
/// reach. Failed prefixes are memoized on (placed set, open window).
pub fn bandwidth_exact(g: &Graph, limit: usize) -> Result<VertexOrdering> {
    let n = g.n();
    if n > limit || n > 64 {
        return Err(Error::TooLarge(format!("exact bandwidth search limited to {limit} vertices, got {n}")));
    }
    let mut best = bandwidth_heuristic(g);
    let lower = g.max_degree().div_ceil(2).max(usize::from(g.num_edges() > 0));
    while best.bandwidth() > lower {
        let target = best.bandwidth() - 1;
        match feasible_ordering(g, target) {
            Some(order) => best = VertexOrdering::from_order(g, order)?,
            None => break,
        }
    }
    Ok(best)
}

struct Search<'a> {
    g: &'a Graph,
    b: usize,
    order: Vec<usize>,
    pos: Vec<usize>,
    placed: u64,
    failed: HashSet<(u64, Vec<u8>)>,
}

impl Search<'_> {
    fn unplaced_neighbors(&self, v: usize) -> usize {
        self.g.neighbors(v).iter().filter(|&&w| self.placed & (1 << w) == 0).count()
    }

    /// Vertices among the last `b` placed that still have unplaced neighbours.
    fn open_window(&self) -> Vec<u8> {
        let start = self.order.len().saturating_sub(self.b);
        self.order[start..]
            .iter()
            .map(|&v| if self.unplaced_neighbors(v) > 0 { v as u8 } else { u8::MAX })
            .collect()
    }

    fn extend(&mut self) -> bool {
        let n = self.g.n();
        let p = self.order.len();
        if p == n {
            return true;
        }
        let key = (self.placed, self.open_window());
        if self.failed.contains(&key) {
            return false;
        }
        for v in 0..n {
            if self.placed & (1 << v) != 0 {
                continue;
            }
            if self.g.neighbors(v).iter().any(|&w| self.placed & (1 << w) != 0 && p - self.pos[w] > self.b) {
                continue;
            }
            self.placed |= 1 << v;
            self.pos[v] = p;
            self.order.push(v);
            if self.window_ok() && self.extend() {
                return true;
            }
            self.order.pop();
            self.placed &= !(1 << v);
        }
        self.failed.insert(key);
        false
    }

    /// Every placed vertex must be able to fit its remaining neighbours into
    /// the positions still within distance `b`.
    fn window_ok(&self) -> bool {
        let next = self.order.len();
        let start = next.saturating_sub(self.b + 1);
        self.order[start..].iter().all(|&u| {
            let reach = self.pos[u] + self.b + 1;
            let room = reach.saturating_sub(next);
            self.unplaced_neighbors(u) <= room
        }) && self.order[..start].iter().all(|&u| self.unplaced_neighbors(u) == 0)
    }
}

fn feasible_ordering(g: &Graph, b: usize) -> Option<Vec<usize>> {
    let mut search = Search {
        g,
        b,
        order: Vec::with_capacity(g.n()),
        pos: vec![0; g.n()],
        placed: 0,
        failed: HashSet::new(),
    };
    search.extend().then_some(search.order)
}

/// Best of several cheap orderings: reverse Cuthill-McKee, and for graphs with
/// coordinates the row-major and column-major sweeps and the ring ordering
/// around the centre of the bounding box. Earlier candidates win ties.
pub fn bandwidth_heuristic(g: &Graph) -> VertexOrdering {
    let mut best = reverse_cuthill_mckee(g);
    let mut candidates = Vec::new();
    if g.coords().is_some() {
        candidates.push(row_major_ordering(g));
        candidates.push(column_major_ordering(g));
        if let Some(c) = center_ordering(g) {
            candidates.push(Some(c));
        }
    }
    for c in candidates.into_iter().flatten() {
        if c.bandwidth() < best.bandwidth() {
            best = c;
        }
    }
    best
}

/// Reverse Cuthill-McKee from a pseudo-peripheral start vertex, component by
/// component (components in order of their smallest vertex).
pub fn reverse_cuthill_mckee(g: &Graph) -> VertexOrdering {
    let n = g.n();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if visited[s] {
            continue;
        }
        let comp = component_of(g, s);
        let start = pseudo_peripheral(g, &comp);
        let mut part = Vec::with_capacity(comp.len());
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            part.push(u);
            let mut next: Vec<usize> = g.neighbors(u).iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (g.degree(w), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
        part.reverse();
        order.extend(part);
    }
    VertexOrdering::from_order(g, order).expect("BFS visits every vertex once")
}

fn component_of(g: &Graph, s: usize) -> Vec<usize> {
    let dist = g.bfs_distances(s);
    (0..g.n()).filter(|&v| dist[v] != usize::MAX).collect()
}

fn pseudo_peripheral(g: &Graph, comp: &[usize]) -> usize {
    let mut v = *comp.iter().min_by_key(|&&v| (g.degree(v), v)).expect("nonempty component");
    let mut ecc = 0;
    loop {
        let dist = g.bfs_distances(v);
        let far = comp.iter().map(|&u| dist[u]).max().unwrap_or(0);
        if far <= ecc && ecc > 0 {
            return v;
        }
        ecc = far;
        let cand = *comp
            .iter()
            .filter(|&&u| dist[u] == far)
            .min_by_key(|&&u| (g.degree(u), u))
            .expect("farthest level nonempty");
        if far == 0 || cand == v {
            return v;
        }
        v = cand;
    }
}

/// Sort by `(row, col)`.
pub fn row_major_ordering(g: &Graph) -> Option<VertexOrdering> {
    let coords = g.coords()?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (coords[v].0, coords[v].1));
    VertexOrdering::from_order(g, order).ok()
}

/// Sort by `(col, row)`.
pub fn column_major_ordering(g: &Graph) -> Option<VertexOrdering> {
    let coords = g.coords()?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (coords[v].1, coords[v].0));
    VertexOrdering::from_order(g, order).ok()
}

/// Orders vertices by increasing Chebyshev distance from the vertex at the
/// centre of the coordinate bounding box, ties broken by angle around it.
/// Returns `None` if there are no coordinates or the centre is not a vertex.
///
/// On the cross graph every ring outside the central 3x3 block has exactly 12
/// vertices in the same angular arrangement, so the realized bandwidth is 12.
pub fn center_ordering(g: &Graph) -> Option<VertexOrdering> {
    let coords = g.coords()?;
    let (rmin, rmax) = (coords.iter().map(|c| c.0).min()?, coords.iter().map(|c| c.0).max()?);
    let (cmin, cmax) = (coords.iter().map(|c| c.1).min()?, coords.iter().map(|c| c.1).max()?);
    if (rmax - rmin) % 2 != 0 || (cmax - cmin) % 2 != 0 {
        return None;
    }
    let center = ((rmin + rmax) / 2, (cmin + cmax) / 2);
    if !coords.contains(&center) {
        return None;
    }
    let key = |v: usize| {
        // x to the right, y upwards (rows grow downwards)
        let dx = coords[v].1 - center.1;
        let dy = center.0 - coords[v].0;
        let ring = dx.abs().max(dy.abs());
        let angle = (dy as f64).atan2(dx as f64);
        (ring, angle)
    };
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| {
        let (ra, aa) = key(a);
        let (rb, ab) = key(b);
        ra.cmp(&rb).then(aa.total_cmp(&ab))
    });
    VertexOrdering::from_order(g, order).ok()
}
