use super::matrix::SparseMatrix;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Stationary {
    pub pi: Vec<f64>,
    /// `max |pi P - pi|`.
    pub residual: f64,
    pub iterations: usize,
    pub components: usize,
    /// Set when the chain is reducible: `pi` then mixes the per-component
    /// stationary vectors, each weighted by its share of states.
    pub warning: Option<String>,
}

fn residual(m: &SparseMatrix, pi: &[f64]) -> f64 {
    m.vec_mul(pi).iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Stationary vector by power iteration on the lazy chain `(I + P)/2`,
/// starting from uniform, until `max |pi P - pi| <= tol`.
pub fn stationary_vector(m: &SparseMatrix, tol: f64, max_iter: usize) -> Stationary {
    let n = m.n();
    let components = m.components().iter().max().map_or(0, |c| c + 1);
    let mut pi = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut res = residual(m, &pi);
    while res > tol && iterations < max_iter {
        for _ in 0..16 {
            let next = m.vec_mul(&pi);
            for (p, x) in pi.iter_mut().zip(next) {
                *p = 0.5 * (*p + x);
            }
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        iterations += 16;
        res = residual(m, &pi);
    }
    let warning = (components > 1).then(|| format!("chain has {components} communicating classes"));
    Stationary { pi, residual: res, iterations, components, warning }
}

/// Exact weights normalized to a distribution.
pub fn normalize(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    /// Second largest eigenvalue of the additive symmetrization.
    pub lambda2: f64,
    /// Smallest eigenvalue of the same operator.
    pub lambda_min: f64,
    /// `1 - lambda2`.
    pub gap: f64,
    /// `1 - max(|lambda2|, |lambda_min|)`.
    pub absolute_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The operator `D^{1/2} ((P + P*)/2) D^{-1/2}` with `P*` the time reversal,
/// which is symmetric with top eigenvector `sqrt(pi)`.
struct Symmetrized<'a> {
    m: &'a SparseMatrix,
    t: SparseMatrix,
    sq: Vec<f64>,
}

impl Symmetrized<'_> {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let scaled_in: Vec<f64> = x.iter().zip(&self.sq).map(|(a, s)| if *s > 0.0 { a / s } else { 0.0 }).collect();
        let forward = self.m.mul_vec(&scaled_in);
        let scaled_t: Vec<f64> = x.iter().zip(&self.sq).map(|(a, s)| a * s).collect();
        let backward = self.t.mul_vec(&scaled_t);
        (0..x.len())
            .map(|i| {
                let s = self.sq[i];
                if s > 0.0 {
                    0.5 * (s * forward[i] + backward[i] / s)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize_l2(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Largest eigenvalue of `(I + sign * S)/2` on the complement of `u`, by power
/// iteration. The spectrum of that operator lies in `[0, 1]`.
fn power(op: &Symmetrized, u: &[f64], sign: f64, tol: f64, max_iter: usize, seed: u64) -> (f64, usize, bool) {
    let n = u.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let project = |v: &mut Vec<f64>| {
        let c = dot(v, u);
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
    };
    project(&mut v);
    if normalize_l2(&mut v) == 0.0 {
        return (0.0, 0, true);
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        let s = op.apply(v);
        v.iter().zip(s).map(|(a, b)| 0.5 * (a + sign * b)).collect()
    };
    let mut rayleigh = 0.0;
    for it in 1..=max_iter {
        let mut w = apply(&v);
        project(&mut w);
        rayleigh = dot(&v, &w);
        let resid: f64 = w.iter().zip(&v).map(|(a, b)| (a - rayleigh * b).powi(2)).sum::<f64>().sqrt();
        if normalize_l2(&mut w) == 0.0 {
            return (0.0, it, true);
        }
        v = w;
        if resid < tol {
            return (rayleigh, it, true);
        }
    }
    (rayleigh, max_iter, false)
}

/// Eigenvalue estimates of the additively symmetrized chain relative to `pi`.
pub fn spectral_gap(m: &SparseMatrix, pi: &[f64], tol: f64, max_iter: usize) -> SpectralReport {
    let sq: Vec<f64> = pi.iter().map(|p| p.max(0.0).sqrt()).collect();
    let op = Symmetrized { m, t: m.transpose(), sq: sq.clone() };
    let mut u = sq;
    normalize_l2(&mut u);
    if m.n() <= 1 {
        return SpectralReport { lambda2: 0.0, lambda_min: 1.0, gap: 1.0, absolute_gap: 1.0, iterations: 0, converged: true };
    }
    // (I + S)/2 has eigenvalues (1 + lambda)/2
    let (mu2, it2, ok2) = power(&op, &u, 1.0, tol, max_iter, 1);
    // (I - S)/2 has eigenvalues (1 - lambda)/2; lambda = 1 is removed with u
    let (mu_min, it_min, ok_min) = power(&op, &u, -1.0, tol, max_iter, 2);
    let lambda2 = 2.0 * mu2 - 1.0;
    let lambda_min = 1.0 - 2.0 * mu_min;
    SpectralReport {
        lambda2,
        lambda_min,
        gap: 1.0 - lambda2,
        absolute_gap: 1.0 - lambda2.abs().max(lambda_min.abs()),
        iterations: it2 + it_min,
        converged: ok2 && ok_min,
    }
}

pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Smallest `t` with `max_x TV(P^t(x, .), pi) <= eps`, by evolving every
/// point mass. `None` if some start has not mixed after `max_t` steps.
pub fn tv_mixing_time(m: &SparseMatrix, pi: &[f64], eps: f64, max_t: usize) -> Option<usize> {
    let t = m.transpose();
    let per_start: Vec<Option<usize>> = (0..m.n())
        .into_par_iter()
        .map(|x| {
            let mut dist = vec![0.0; m.n()];
            dist[x] = 1.0;
            for step in 0..=max_t {
                if tv_distance(&dist, pi) <= eps {
                    return Some(step);
                }
                dist = t.mul_vec(&dist);
            }
            None
        })
        .collect();
    per_start.into_iter().try_fold(0, |acc, s| s.map(|s| acc.max(s)))
}

/// Upper bound `t_rel (log(1/pi_min) + log(1/eps))` on the mixing time of a
/// reversible chain with absolute gap `absolute_gap`.
pub fn mixing_upper_bound(absolute_gap: f64, pi_min: f64, eps: f64) -> f64 {
    ((1.0 / pi_min).ln() + (1.0 / eps).ln()) / absolute_gap
}

/// Lower bound `(t_rel - 1) log(1/(2 eps))`.
pub fn mixing_lower_bound(absolute_gap: f64, eps: f64) -> f64 {
    (1.0 / absolute_gap - 1.0) * (1.0 / (2.0 * eps)).ln()
}

/// `Q(S, S^c) / min(pi(S), pi(S^c))` with `Q(A, B) = sum pi(x) P(x, y)`.
pub fn conductance(m: &SparseMatrix, pi: &[f64], in_s: &[bool]) -> Result<f64> {
    let ps: f64 = (0..m.n()).filter(|&i| in_s[i]).map(|i| pi[i]).sum();
    let pc: f64 = (0..m.n()).filter(|&i| !in_s[i]).map(|i| pi[i]).sum();
    if ps <= 0.0 || pc <= 0.0 {
        return Err(Error::InvalidParams("conductance needs a nonempty proper subset with positive mass".into()));
    }
    Ok(edge_flow(m, pi, in_s) / ps.min(pc))
}

/// `Q(S, S^c)`.
pub fn edge_flow(m: &SparseMatrix, pi: &[f64], in_s: &[bool]) -> f64 {
    (0..m.n())
        .filter(|&i| in_s[i])
        .map(|i| {
            let (c, v) = m.row(i);
            pi[i] * c.iter().zip(v).filter(|(j, _)| !in_s[**j]).map(|(_, x)| x).sum::<f64>()
        })
        .sum()
}
