use super::enumerate::StateSpace;
use crate::error::{Error, Result};
use crate::glauber::{transition_row, transition_row_with, ChainVariant};
use crate::graph::Graph;
use crate::partition::{canonical_form, Partition, StateParams};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row `(column, value)` lists; entries are sorted by
    /// column and duplicates summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> SparseMatrix {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        c.binary_search(&j).map_or(0.0, |k| v[k])
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.n];
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                rows[j].push((i, x));
            }
        }
        SparseMatrix::from_rows(rows)
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
            })
            .collect()
    }

    /// `x^T M`, by scattering rows.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                out[j] += xi * a;
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// Largest `|row sum - 1|`.
    pub fn max_row_sum_error(&self) -> f64 {
        self.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Connected components of the graph of off-diagonal nonzeros, labeled in
    /// order of their lowest state.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let t = self.transpose();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(i) = stack.pop() {
                for m in [self, &t] {
                    let (c, v) = m.row(i);
                    for (&j, &x) in c.iter().zip(v) {
                        if x > 0.0 && comp[j] == usize::MAX {
                            comp[j] = next;
                            stack.push(j);
                        }
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// Transition matrix of `variant` over an enumerated space. The coloring chain
/// is lumped onto canonical partitions.
pub fn build_matrix(g: &Graph, space: &StateSpace, variant: ChainVariant) -> Result<SparseMatrix> {
    let params = *space.params();
    let rows: Result<Vec<Vec<(usize, f64)>>> = space
        .states()
        .par_iter()
        .map(|s| {
            transition_row(g, s, &params, variant, true)
                .into_iter()
                .map(|(t, p)| {
                    space.index_of(&t).map(|j| (j, p)).ok_or_else(|| Error::Internal("successor outside space".into()))
                })
                .collect()
        })
        .collect();
    Ok(SparseMatrix::from_rows(rows?))
}

/// The chain restricted to an arbitrary set of states: a proposed move is
/// taken iff its result lies in `space`.
pub fn build_matrix_on_set(space: &StateSpace, variant: ChainVariant) -> SparseMatrix {
    let params = *space.params();
    let rows: Vec<Vec<(usize, f64)>> = space
        .states()
        .par_iter()
        .map(|s| {
            let legal = |p: &Partition, mv: crate::partition::Move| {
                let mut next = p.clone();
                next.apply_unchecked(mv);
                space.index_of(&next).is_some()
            };
            transition_row_with(s, &params, variant, true, legal)
                .into_iter()
                .map(|(t, p)| (space.index_of(&t).expect("membership checked"), p))
                .collect()
        })
        .collect();
    SparseMatrix::from_rows(rows)
}

/// Every labeling of every state with `q` slots: `q!/(q-kappa)!` per state.
pub fn labeled_states(space: &StateSpace, cap: usize) -> Result<Vec<Partition>> {
    let q = space.params().q;
    let mut out = Vec::new();
    for s in space.states() {
        let kappa = s.kappa();
        let mut perm: Vec<usize> = Vec::with_capacity(kappa);
        let mut used = vec![false; q];
        fn rec(s: &Partition, kappa: usize, q: usize, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Partition>, cap: usize) -> bool {
            if perm.len() == kappa {
                if out.len() >= cap {
                    return false;
                }
                let mut full = perm.clone();
                full.extend((0..q).filter(|&x| !used[x]));
                out.push(s.relabel(&full));
                return true;
            }
            for x in 0..q {
                if !used[x] {
                    used[x] = true;
                    perm.push(x);
                    let ok = rec(s, kappa, q, perm, used, out, cap);
                    perm.pop();
                    used[x] = false;
                    if !ok {
                        return false;
                    }
                }
            }
            true
        }
        if !rec(s, kappa, q, &mut perm, &mut used, &mut out, cap) {
            return Err(Error::TooLarge(format!("more than {cap} labeled states")));
        }
    }
    out.sort_by(|a, b| a.assignment().cmp(b.assignment()));
    Ok(out)
}

/// Labeled coloring chain over explicit labeled states.
pub fn build_labeled_matrix(g: &Graph, states: &[Partition], params: &StateParams) -> Result<SparseMatrix> {
    let index: HashMap<&Partition, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let rows: Result<Vec<Vec<(usize, f64)>>> = states
        .par_iter()
        .map(|s| {
            transition_row(g, s, params, ChainVariant::ColoringMultiplicity, false)
                .into_iter()
                .map(|(t, p)| index.get(&t).map(|&j| (j, p)).ok_or_else(|| Error::Internal("labeled successor missing".into())))
                .collect()
        })
        .collect();
    Ok(SparseMatrix::from_rows(rows?))
}

/// States with no move other than self-loops.
pub fn frozen_states(m: &SparseMatrix) -> Vec<usize> {
    (0..m.n()).filter(|&i| m.row(i).0 == [i]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixSummary {
    pub states: usize,
    pub nonzeros: usize,
    pub components: usize,
    pub max_row_sum_error: f64,
}

pub fn summarize(m: &SparseMatrix) -> MatrixSummary {
    let comps = m.components();
    MatrixSummary {
        states: m.n(),
        nonzeros: m.nnz(),
        components: comps.iter().max().map_or(0, |c| c + 1),
        max_row_sum_error: m.max_row_sum_error(),
    }
}

/// Canonical index of each labeled state.
pub fn lump_map(space: &StateSpace, labeled: &[Partition]) -> Vec<usize> {
    labeled.iter().map(|s| space.index_of(&canonical_form(s)).expect("labeling of an enumerated state")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::enumerate::{enumerate_states, DEFAULT_STATE_CAP};
    use crate::graph::{make_grid, make_path};

    fn space(g: &Graph, q: usize, b: usize) -> StateSpace {
        enumerate_states(g, &StateParams::new(q, b, 0).unwrap(), DEFAULT_STATE_CAP).unwrap()
    }

    #[test]
    fn rows_are_stochastic() {
        let g = make_grid(2, 3).unwrap();
        for (q, b) in [(6, 2), (3, 3), (4, 6)] {
            let s = space(&g, q, b);
            for v in ChainVariant::ALL {
                let m = build_matrix(&g, &s, v).unwrap();
                assert!(m.max_row_sum_error() < 1e-12);
                assert_eq!(build_matrix_on_set(&s, v), m);
            }
        }
    }

    #[test]
    fn metropolis_is_symmetric() {
        let g = make_grid(2, 3).unwrap();
        let s = space(&g, 6, 2);
        let m = build_matrix(&g, &s, ChainVariant::PartitionMetropolis).unwrap();
        let t = m.transpose();
        for i in 0..m.n() {
            for j in 0..m.n() {
                assert!((m.get(i, j) - t.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn frozen_single_edge() {
        let g = make_path(2).unwrap();
        let s = space(&g, 2, 1);
        assert_eq!(s.len(), 1);
        for v in ChainVariant::ALL {
            let m = build_matrix(&g, &s, v).unwrap();
            assert_eq!(frozen_states(&m), vec![0]);
            assert_eq!(m.get(0, 0), 1.0);
        }
    }

    #[test]
    fn labeled_space_sizes() {
        let g = make_grid(2, 2).unwrap();
        let s = space(&g, 4, 2);
        let labeled = labeled_states(&s, 10_000).unwrap();
        let expected: usize = s.states().iter().map(|p| (0..p.kappa()).map(|i| 4 - i).product::<usize>()).sum();
        assert_eq!(labeled.len(), expected);
        let m = build_labeled_matrix(&g, &labeled, s.params()).unwrap();
        assert!(m.max_row_sum_error() < 1e-12);
        // labeled chain is symmetric
        for i in 0..m.n() {
            let (c, v) = m.row(i);
            for (&j, &x) in c.iter().zip(v) {
                assert!((m.get(j, i) - x).abs() < 1e-15);
            }
        }
        let lm = lump_map(&s, &labeled);
        assert_eq!(lm.iter().max().copied(), Some(s.len() - 1));
    }

    #[test]
    fn sparse_products() {
        let m = SparseMatrix::from_rows(vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.25), (1, 0.5), (1, 0.25)]]);
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(1, 1), 0.75);
        assert_eq!(m.mul_vec(&[1.0, 2.0]), vec![1.5, 1.75]);
        assert_eq!(m.vec_mul(&[1.0, 2.0]), vec![1.0, 2.0]);
        assert_eq!(m.transpose().get(0, 1), 0.25);
        assert_eq!(m.components(), vec![0, 0]);
    }
}
