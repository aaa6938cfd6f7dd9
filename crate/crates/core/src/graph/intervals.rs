use super::{Graph, VertexOrdering};
use crate::error::{Error, Result};
use serde::Serialize;

/// Cuts an ordering into consecutive blocks `V_i = { v : rank(v) / t == i }`
/// (ranks in `1..=n`, integer division), `i = 0..m` with `m = n / t + 1`.
/// `V_0` holds only `t - 1` vertices and trailing blocks may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalDecomposition {
    t: usize,
    intervals: Vec<Vec<usize>>,
    membership: Vec<usize>,
    ranks: Vec<usize>,
}

impl IntervalDecomposition {
    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of intervals, `n / t + 1`.
    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, i: usize) -> &[usize] {
        &self.intervals[i]
    }

    pub fn intervals(&self) -> &[Vec<usize>] {
        &self.intervals
    }

    /// Interval index of `v`.
    pub fn index_of(&self, v: usize) -> usize {
        self.membership[v]
    }

    pub fn rank(&self, v: usize) -> usize {
        self.ranks[v]
    }

    /// True when every edge joins equal or consecutive intervals.
    pub fn edges_span_adjacent(&self, g: &Graph) -> bool {
        g.edges().iter().all(|&(u, v)| self.membership[u].abs_diff(self.membership[v]) <= 1)
    }
}

pub fn make_intervals(g: &Graph, ord: &VertexOrdering, t: usize) -> Result<IntervalDecomposition> {
    if t == 0 {
        return Err(Error::InvalidParams("interval length must be positive".into()));
    }
    let n = g.n();
    let m = n / t + 1;
    let mut intervals = vec![Vec::new(); m];
    let mut membership = vec![0; n];
    for &v in ord.order() {
        let i = ord.rank(v) / t;
        membership[v] = i;
        intervals[i].push(v);
    }
    Ok(IntervalDecomposition { t, intervals, membership, ranks: ord.ranks().to_vec() })
}
