//! Undirected simple graphs, the grid families used throughout, and the
//! vertex orderings / interval decompositions built on top of them.

mod bandwidth;
mod intervals;

pub use bandwidth::{
    bandwidth_exact, bandwidth_heuristic, center_ordering, column_major_ordering,
    reverse_cuthill_mckee, row_major_ordering, VertexOrdering, DEFAULT_EXACT_LIMIT,
};
pub use intervals::{make_intervals, IntervalDecomposition};

use crate::error::{Error, Result};
use std::collections::VecDeque;

/// An undirected simple graph on vertices `0..n`.
///
/// Grid-derived graphs also carry `(row, col)` coordinates, which the torpid
/// mixing experiments and the coordinate-based orderings rely on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    max_degree: usize,
    connected: bool,
    coords: Option<Vec<(i32, i32)>>,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops, repeated edges and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("repeated edge {:?}", w[0])));
        }
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        let mut g = Graph { n, adj, edges: norm, max_degree, connected: false, coords: None };
        g.connected = g.count_components() <= 1;
        Ok(g)
    }

    pub fn with_coords(mut self, coords: Vec<(i32, i32)>) -> Result<Graph> {
        if coords.len() != self.n {
            return Err(Error::InvalidGraph("coordinate count does not match n".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Chain operations require a connected host graph.
    pub fn require_connected(&self) -> Result<()> {
        if self.connected {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    pub fn coords(&self) -> Option<&[(i32, i32)]> {
        self.coords.as_deref()
    }

    /// Vertex at the given coordinates, if the graph has coordinates.
    pub fn vertex_at(&self, row: i32, col: i32) -> Option<usize> {
        self.coords.as_ref()?.iter().position(|&c| c == (row, col))
    }

    fn count_components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut comps = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        comps
    }

    /// True when `vertices` (given as a membership mask) induce a connected
    /// subgraph. The empty set counts as connected.
    pub fn is_connected_subset(&self, members: &[bool]) -> bool {
        let Some(start) = members.iter().position(|&m| m) else {
            return true;
        };
        let total = members.iter().filter(|&&m| m).count();
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if members[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == total
    }

    /// Connectivity check for a vertex list.
    pub fn is_connected_set(&self, vertices: &[usize]) -> bool {
        let mut members = vec![false; self.n];
        for &v in vertices {
            members[v] = true;
        }
        self.is_connected_subset(&members)
    }

    /// The subgraph induced by `vertices`, relabelled `0..vertices.len()` in
    /// the given order. Coordinates are carried over.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = local[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(vertices.len(), &edges).expect("induced subgraph of a simple graph");
        match &self.coords {
            Some(c) => g.with_coords(vertices.iter().map(|&v| c[v]).collect()).expect("length matches"),
            None => g,
        }
    }

    /// BFS distances from `source` (`usize::MAX` for unreachable vertices).
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Parses the edge-list text format: an `n m` header followed by `m`
    /// lines of `u v` (0-based). Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let (n, m) = parse_pair(header)?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

/// The `k x l` grid graph (`k` rows, `l` columns); vertex `(r, c)` has id `r*l + c`.
pub fn make_grid(k: usize, l: usize) -> Result<Graph> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParams("grid dimensions must be positive".into()));
    }
    let mut edges = Vec::with_capacity(2 * k * l);
    for r in 0..k {
        for c in 0..l {
            let v = r * l + c;
            if c + 1 < l {
                edges.push((v, v + 1));
            }
            if r + 1 < k {
                edges.push((v, v + l));
            }
        }
    }
    let coords = (0..k * l).map(|v| ((v / l) as i32, (v % l) as i32)).collect();
    Graph::from_edges(k * l, &edges)?.with_coords(coords)
}

/// The `k x l` torus (grid with wrap-around in both directions). Needs
/// `k, l >= 3` to stay simple.
pub fn make_torus(k: usize, l: usize) -> Result<Graph> {
    if k < 3 || l < 3 {
        return Err(Error::InvalidParams("torus dimensions must be at least 3".into()));
    }
    let mut edges = Vec::with_capacity(2 * k * l);
    for r in 0..k {
        for c in 0..l {
            let v = r * l + c;
            edges.push((v, r * l + (c + 1) % l));
            edges.push((v, ((r + 1) % k) * l + c));
        }
    }
    let coords = (0..k * l).map(|v| ((v / l) as i32, (v % l) as i32)).collect();
    Graph::from_edges(k * l, &edges)?.with_coords(coords)
}

/// The path on `n` vertices, `0 - 1 - ... - (n-1)`.
pub fn make_path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParams("path needs at least one vertex".into()));
    }
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges)
}

/// The cycle on `n >= 3` vertices.
pub fn make_cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParams("cycle needs at least three vertices".into()));
    }
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

/// The "plus"-shaped cross graph: the subgraph of the `l x l` grid induced by
/// the vertices within distance 1 of the middle row or the middle column.
/// `l` must be odd and at least 5. Vertices are numbered in row-major order.
pub fn make_cross_grid(l: usize) -> Result<Graph> {
    if l < 5 || l % 2 == 0 {
        return Err(Error::InvalidParams(format!("cross grid side must be odd and >= 5, got {l}")));
    }
    let mid = (l / 2) as i32;
    let mut ids = vec![vec![usize::MAX; l]; l];
    let mut coords = Vec::new();
    for r in 0..l as i32 {
        for c in 0..l as i32 {
            if (r - mid).abs() <= 1 || (c - mid).abs() <= 1 {
                ids[r as usize][c as usize] = coords.len();
                coords.push((r, c));
            }
        }
    }
    let mut edges = Vec::new();
    for &(r, c) in &coords {
        let v = ids[r as usize][c as usize];
        if (c as usize) + 1 < l {
            let w = ids[r as usize][c as usize + 1];
            if w != usize::MAX {
                edges.push((v, w));
            }
        }
        if (r as usize) + 1 < l {
            let w = ids[r as usize + 1][c as usize];
            if w != usize::MAX {
                edges.push((v, w));
            }
        }
    }
    Graph::from_edges(coords.len(), &edges)?.with_coords(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_edge_counts() {
        let g = make_grid(1, 1).unwrap();
        assert_eq!((g.n(), g.num_edges()), (1, 0));
        let g = make_grid(2, 2).unwrap();
        assert_eq!((g.n(), g.num_edges()), (4, 4));
        assert!(g.neighbors(0).len() == 2 && g.max_degree() == 2);
        for (k, l) in [(3, 21), (4, 7), (1, 9), (5, 5)] {
            let g = make_grid(k, l).unwrap();
            assert_eq!(g.num_edges(), k * (l - 1) + l * (k - 1));
            assert!(g.is_connected());
        }
        assert_eq!(make_grid(3, 21).unwrap().num_edges(), 102);
        assert!(make_grid(0, 3).is_err());
    }

    /// Independent construction: multi-source BFS in the full grid from the
    /// middle row and column, keep distance <= 1, take the induced subgraph.
    fn cross_by_filter(l: usize) -> Graph {
        let grid = make_grid(l, l).unwrap();
        let mid = (l / 2) as i32;
        let mut dist = vec![usize::MAX; l * l];
        let mut queue = VecDeque::new();
        for v in 0..l * l {
            let (r, c) = grid.coords().unwrap()[v];
            if r == mid || c == mid {
                dist[v] = 0;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in grid.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        let keep: Vec<usize> = (0..l * l).filter(|&v| dist[v] <= 1).collect();
        grid.induced_subgraph(&keep)
    }

    #[test]
    fn cross_grid_matches_induced_construction() {
        for l in [5usize, 7, 9, 21] {
            let g = make_cross_grid(l).unwrap();
            assert_eq!(g.n(), 6 * l - 9);
            let h = cross_by_filter(l);
            assert_eq!(g, h);
            assert!(g.is_connected());
        }
        assert_eq!(make_cross_grid(5).unwrap().n(), 21);
        assert_eq!(make_cross_grid(7).unwrap().n(), 33);
        assert_eq!(make_cross_grid(21).unwrap().n(), 117);
        assert!(make_cross_grid(6).is_err());
        assert!(make_cross_grid(3).is_err());
    }

    #[test]
    fn rejects_non_simple_input() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.require_connected(), Err(Error::Disconnected));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = make_grid(3, 4).unwrap();
        let h = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("# c\n3 1\n0 x\n").is_err());
    }

    #[test]
    fn torus_is_four_regular() {
        let g = make_torus(8, 24).unwrap();
        assert!((0..g.n()).all(|v| g.degree(v) == 4));
        assert_eq!(g.num_edges(), 2 * 8 * 24);
    }
}
