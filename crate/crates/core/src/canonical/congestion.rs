use super::{build_path, CanonicalPath, PathConfig};
use crate::diagnostics::{SparseMatrix, StateSpace};
use crate::error::{Error, Result};
use crate::graph::{Graph, IntervalDecomposition};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Unordered pairs of distinct states joined by a transition in either
/// direction.
pub fn transition_edge_count(m: &SparseMatrix) -> usize {
    let mut count = 0;
    for i in 0..m.n() {
        let (cols, vals) = m.row(i);
        for (&j, &x) in cols.iter().zip(vals) {
            if j != i && x > 0.0 && (i < j || m.get(j, i) == 0.0) {
                count += 1;
            }
        }
    }
    count
}

/// Space indices of the states a path visits, with repeated consecutive
/// states (moves that only rename a slot) dropped.
pub fn path_state_indices(space: &StateSpace, path: &CanonicalPath) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::with_capacity(path.len() + 1);
    for s in path.states() {
        let i = space.index_of(&s).ok_or_else(|| Error::Internal("path leaves the state space".into()))?;
        if out.last() != Some(&i) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Canonical paths between all ordered pairs of distinct states, as
/// sequences of space indices. Pairs whose construction fails are returned
/// with their error.
pub fn all_pairs_paths(
    g: &Graph,
    space: &StateSpace,
    iv: &IntervalDecomposition,
    cfg: &PathConfig,
) -> Vec<((usize, usize), Result<Vec<usize>>)> {
    let n = space.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let r = build_path(g, space.state(a), space.state(b), space.params(), iv, cfg)
                .and_then(|p| path_state_indices(space, &p));
            ((a, b), r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CongestionReport {
    pub states: usize,
    pub edges: usize,
    pub paths: usize,
    /// Largest sum of path lengths over paths using one transition edge.
    pub max_edge_load: u64,
    /// `max_e (2|E| / |Omega|^2) * load(e)`.
    pub max_edge_congestion: f64,
    /// `max_w #{paths visiting w} / |Omega|`.
    pub max_vertex_congestion: f64,
    pub max_path_length: usize,
    pub mean_path_length: f64,
    /// Number of edges at each load.
    pub load_histogram: BTreeMap<u64, usize>,
}

/// Loads of transition edges under a path set; each path adds its length
/// once to every distinct edge it uses.
pub fn congestion(states: usize, edges: usize, paths: &[Vec<usize>]) -> CongestionReport {
    let (loads, visits) = paths
        .par_iter()
        .fold(
            || (HashMap::<(usize, usize), u64>::new(), vec![0u64; states]),
            |(mut loads, mut visits), path| {
                let len = path.len().saturating_sub(1) as u64;
                let mut used: Vec<(usize, usize)> =
                    path.windows(2).filter(|w| w[0] != w[1]).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
                used.sort_unstable();
                used.dedup();
                for e in used {
                    *loads.entry(e).or_default() += len;
                }
                let mut seen: Vec<usize> = path.clone();
                seen.sort_unstable();
                seen.dedup();
                for s in seen {
                    visits[s] += 1;
                }
                (loads, visits)
            },
        )
        .reduce(
            || (HashMap::new(), vec![0u64; states]),
            |(mut la, mut va), (lb, vb)| {
                for (e, x) in lb {
                    *la.entry(e).or_default() += x;
                }
                for (a, b) in va.iter_mut().zip(vb) {
                    *a += b;
                }
                (la, va)
            },
        );
    let max_edge_load = loads.values().copied().max().unwrap_or(0);
    let mut load_histogram = BTreeMap::new();
    for &x in loads.values() {
        *load_histogram.entry(x).or_insert(0) += 1;
    }
    let lengths: Vec<usize> = paths.iter().map(|p| p.len().saturating_sub(1)).collect();
    let omega = states.max(1) as f64;
    CongestionReport {
        states,
        edges,
        paths: paths.len(),
        max_edge_load,
        max_edge_congestion: 2.0 * edges as f64 / (omega * omega) * max_edge_load as f64,
        max_vertex_congestion: visits.iter().copied().max().unwrap_or(0) as f64 / omega,
        max_path_length: lengths.iter().copied().max().unwrap_or(0),
        mean_path_length: if lengths.is_empty() { 0.0 } else { lengths.iter().sum::<usize>() as f64 / lengths.len() as f64 },
        load_histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{build_matrix, enumerate_states, DEFAULT_STATE_CAP};
    use crate::glauber::ChainVariant;
    use crate::graph::{make_intervals, make_path, VertexOrdering};
    use crate::partition::StateParams;

    #[test]
    fn single_state_has_no_congestion() {
        let r = congestion(1, 0, &[]);
        assert_eq!(r.max_edge_congestion, 0.0);
        assert_eq!(r.max_edge_load, 0);
    }

    #[test]
    fn there_and_back_doubles_loads() {
        let paths = vec![vec![0, 1, 2], vec![2, 3], vec![1, 2, 3, 0]];
        let doubled: Vec<Vec<usize>> = paths
            .iter()
            .map(|p| {
                let mut d = p.clone();
                d.extend(p.iter().rev().skip(1));
                d
            })
            .collect();
        let a = congestion(4, 4, &paths);
        let b = congestion(4, 4, &doubled);
        assert_eq!(b.max_edge_load, 2 * a.max_edge_load);
        let scaled: BTreeMap<u64, usize> = a.load_histogram.iter().map(|(&k, &v)| (2 * k, v)).collect();
        assert_eq!(b.load_histogram, scaled);
        assert_eq!(b.max_vertex_congestion, a.max_vertex_congestion);
    }

    #[test]
    fn path_graph_all_pairs() {
        let g = make_path(4).unwrap();
        let params = StateParams::new(4, 2, 0).unwrap();
        let space = enumerate_states(&g, &params, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(space.len(), 5);
        let ord = VertexOrdering::identity(&g);
        let iv = make_intervals(&g, &ord, 4).unwrap();
        let m = build_matrix(&g, &space, ChainVariant::PartitionMetropolis).unwrap();
        let paths: Vec<Vec<usize>> =
            all_pairs_paths(&g, &space, &iv, &PathConfig::default()).into_iter().map(|(_, r)| r.unwrap()).collect();
        assert_eq!(paths.len(), 20);
        for p in &paths {
            for w in p.windows(2) {
                assert!(m.get(w[0], w[1]) > 0.0, "{w:?} is not a transition");
            }
        }
        let edges = transition_edge_count(&m);
        let r = congestion(space.len(), edges, &paths);
        assert!(r.max_edge_congestion.is_finite() && r.max_edge_congestion > 0.0);
        assert!(r.max_vertex_congestion <= 20.0 / 5.0);
    }
}
