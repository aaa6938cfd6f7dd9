use crate::diagnostics::StateSpace;
use crate::graph::Graph;
use crate::partition::{hamming_agree, Partition};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashSet;

/// Whether some connected vertex set of size at most `k` contains all of `d`.
pub fn differs_on_connected(g: &Graph, d: &[usize], k: usize) -> bool {
    if d.is_empty() {
        return true;
    }
    if d.len() > k {
        return false;
    }
    if g.is_connected_set(d) {
        return true;
    }
    // grow connected sets from d[0], keyed by their sorted vertex list
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut stack = vec![vec![d[0]]];
    while let Some(set) = stack.pop() {
        if d.iter().all(|v| set.binary_search(v).is_ok()) {
            return true;
        }
        // vertices of d still missing must fit in the remaining budget
        let missing = d.iter().filter(|v| set.binary_search(v).is_err()).count();
        if set.len() + missing > k {
            continue;
        }
        for &u in &set {
            for &w in g.neighbors(u) {
                if let Err(pos) = set.binary_search(&w) {
                    let mut next = set.clone();
                    next.insert(pos, w);
                    if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
            }
        }
    }
    false
}

/// For each state in `upper`, the indices of states in `lower` differing
/// from it only on a connected set of at most `k` vertices.
pub fn reduction_neighbors(g: &Graph, upper: &[&Partition], lower: &[&Partition], k: usize) -> Vec<Vec<usize>> {
    upper
        .par_iter()
        .map(|a| {
            lower
                .iter()
                .enumerate()
                .filter(|(_, b)| differs_on_connected(g, &hamming_agree(a, b), k))
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Assigns each left vertex to its least loaded neighbor, ties to the lowest
/// index, processing left vertices in order. Returns the images and the
/// final loads.
pub fn greedy_assign(adj: &[Vec<usize>], n_right: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut loads = vec![0; n_right];
    let images = adj
        .iter()
        .map(|nbrs| {
            let best = nbrs.iter().copied().min_by_key(|&j| (loads[j], j))?;
            loads[best] += 1;
            Some(best)
        })
        .collect();
    (images, loads)
}

/// Greedy map from states with `kappa` classes to states with `kappa - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaMap {
    pub kappa: usize,
    /// Space indices of the states with `kappa` classes.
    pub upper: Vec<usize>,
    /// Space indices of the states with `kappa - 1` classes.
    pub lower: Vec<usize>,
    /// Image of each upper state as a space index, if it has a neighbor.
    pub images: Vec<Option<usize>>,
    /// Upper states without any neighbor.
    pub unmatched: Vec<usize>,
    pub max_load: usize,
    /// `log2 |Omega_kappa|`, the reference scale for `max_load`.
    pub log2_size: f64,
}

pub fn build_theta(g: &Graph, space: &StateSpace, kappa: usize, k: usize) -> ThetaMap {
    let pick = |c: usize| -> Vec<usize> { (0..space.len()).filter(|&i| space.state(i).kappa() == c).collect() };
    let upper = pick(kappa);
    let lower = if kappa == 0 { Vec::new() } else { pick(kappa - 1) };
    let us: Vec<&Partition> = upper.iter().map(|&i| space.state(i)).collect();
    let ls: Vec<&Partition> = lower.iter().map(|&i| space.state(i)).collect();
    let adj = reduction_neighbors(g, &us, &ls, k);
    let (local, loads) = greedy_assign(&adj, lower.len());
    ThetaMap {
        kappa,
        unmatched: upper.iter().zip(&local).filter(|(_, im)| im.is_none()).map(|(&i, _)| i).collect(),
        images: local.iter().map(|im| im.map(|j| lower[j])).collect(),
        max_load: loads.iter().copied().max().unwrap_or(0),
        log2_size: (upper.len() as f64).log2(),
        upper,
        lower,
    }
}
