use super::boundary::{beta, classify_s, color_arc, cross_boundary, end_columns, outer_cycle, ColorArc, SClass};
use super::{count_grid_2colorings, enumerate_2colorings, is_valid_coloring, neighbor_masks};
use crate::error::Result;
use crate::graph::{make_cross_grid, make_grid, Graph};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Single-vertex recoloring on valid colorings: pick a vertex uniformly and
/// flip it if both classes stay connected. Uniform stationary distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecolorChain {
    pub n: usize,
    pub states: Vec<u128>,
    /// Indices of states one legal flip away.
    pub adj: Vec<Vec<u32>>,
}

pub fn recolor_chain(g: &Graph, states: Vec<u128>) -> Result<RecolorChain> {
    let nbr = neighbor_masks(g)?;
    let n = g.n();
    let adj = states
        .par_iter()
        .map(|&x| {
            (0..n)
                .filter_map(|v| {
                    let y = x ^ (1u128 << v);
                    if is_valid_coloring(&nbr, y) {
                        Some(states.binary_search(&y).expect("valid colorings are enumerated") as u32)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    Ok(RecolorChain { n, states, adj })
}

/// `Q(S, S^c) / min(pi(S), pi(S^c))` under the uniform distribution.
pub fn set_conductance(chain: &RecolorChain, in_s: &[bool]) -> f64 {
    let total = chain.states.len() as f64;
    let size = in_s.iter().filter(|&&b| b).count() as f64;
    let crossing: usize =
        (0..chain.states.len()).filter(|&i| in_s[i]).map(|i| chain.adj[i].iter().filter(|&&j| !in_s[j as usize]).count()).sum();
    let flow = crossing as f64 / (total * chain.n as f64);
    let smaller = size.min(total - size) / total;
    if smaller == 0.0 {
        0.0
    } else {
        flow / smaller
    }
}

/// Whether every transition leaving `a` lands in `a` or `sep`.
pub fn separates(chain: &RecolorChain, a: &[bool], sep: &[bool]) -> bool {
    (0..chain.states.len()).filter(|&i| a[i]).all(|i| chain.adj[i].iter().all(|&j| a[j as usize] || sep[j as usize]))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    slope(&lx, &ly)
}

/// Least-squares slope of `ln y` against `x`.
pub fn loglinear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    slope(xs, &ly)
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripRow {
    pub ell: usize,
    pub states: usize,
    /// Count from the column-profile transfer, as a cross-check.
    pub profile_count: u128,
    pub degenerate: usize,
    pub boundary: usize,
    pub in_s: usize,
    pub out_s: usize,
    /// States whose blue arc starts and ends in the same column.
    pub equal_ends: usize,
    /// `boundary + degenerate`.
    pub bottleneck: usize,
    /// Boundary states whose blue arc starts and ends on different rows.
    pub boundary_across: usize,
    /// Stationary mass of `{start column < end column}`.
    pub pi_s: f64,
    /// Fraction of states with equal end columns.
    pub rho: f64,
    pub pi_s_gap: f64,
    pub conductance: f64,
    /// Transitions joining `InS` and `OutS` directly.
    pub direct_crossings: usize,
    /// Whether every class met the outer cycle in one arc.
    pub arcs_contiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripReport {
    pub rows: Vec<StripRow>,
    /// Fitted exponent of the bottleneck count as a power of `ell`.
    pub bottleneck_exponent: f64,
    /// Same fit for boundary states with ends on different rows.
    pub across_exponent: f64,
    /// Fitted slope of `ln conductance` per unit `ell`.
    pub conductance_log_slope: f64,
    /// `(ell, conductance(ell) / conductance(ell - 1))`.
    pub conductance_ratios: Vec<(usize, f64)>,
}

pub fn strip_row(ell: usize, cap: usize) -> Result<StripRow> {
    let g = make_grid(3, ell)?;
    let oc = outer_cycle(&g)?;
    let states = enumerate_2colorings(&g, cap)?;
    let profile_count = count_grid_2colorings(3, ell)?;
    let arcs_contiguous = states
        .iter()
        .all(|&x| [false, true].iter().all(|&red| !matches!(color_arc(&oc, x, red), ColorArc::Split { .. })));
    let classes: Vec<SClass> = states.iter().map(|&x| classify_s(&g, &oc, x)).collect::<Result<_>>()?;
    let ends: Vec<Option<(i32, i32)>> = states.iter().map(|&x| end_columns(&g, &oc, x)).collect::<Result<_>>()?;
    let count = |c: SClass| classes.iter().filter(|&&k| k == c).count();
    let in_strict: Vec<bool> = ends.iter().map(|e| matches!(e, Some((a, b)) if a < b)).collect();
    let equal_ends = ends.iter().filter(|e| matches!(e, Some((a, b)) if a == b)).count();
    let coords = g.coords().expect("grid coordinates");
    let boundary_across = states
        .iter()
        .zip(&classes)
        .filter(|(&x, &c)| {
            c == SClass::Boundary
                && matches!(color_arc(&oc, x, false), ColorArc::Arc { first, last, .. } if coords[first].0 != coords[last].0)
        })
        .count();
    let chain = recolor_chain(&g, states)?;
    let total = chain.states.len() as f64;
    let direct_crossings = (0..classes.len())
        .filter(|&i| classes[i] == SClass::InS)
        .map(|i| chain.adj[i].iter().filter(|&&j| classes[j as usize] == SClass::OutS).count())
        .sum();
    let pi_s = in_strict.iter().filter(|&&b| b).count() as f64 / total;
    Ok(StripRow {
        ell,
        states: chain.states.len(),
        profile_count,
        degenerate: count(SClass::Degenerate),
        boundary: count(SClass::Boundary),
        in_s: count(SClass::InS),
        out_s: count(SClass::OutS),
        equal_ends,
        bottleneck: count(SClass::Boundary) + count(SClass::Degenerate),
        boundary_across,
        pi_s,
        rho: equal_ends as f64 / total,
        pi_s_gap: (pi_s - 0.5).abs(),
        conductance: set_conductance(&chain, &in_strict),
        direct_crossings,
        arcs_contiguous,
    })
}

/// Exact bottleneck measurements on `3 x ell` strips.
pub fn strip_report(ells: &[usize], cap: usize) -> Result<StripReport> {
    let rows: Vec<StripRow> = ells.iter().map(|&l| strip_row(l, cap)).collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.ell as f64).collect();
    let conductance_ratios =
        rows.windows(2).filter(|w| w[1].ell == w[0].ell + 1).map(|w| (w[1].ell, w[1].conductance / w[0].conductance)).collect();
    Ok(StripReport {
        bottleneck_exponent: loglog_slope(&xs, &rows.iter().map(|r| r.bottleneck as f64).collect::<Vec<_>>()),
        across_exponent: loglog_slope(&xs, &rows.iter().map(|r| r.boundary_across as f64).collect::<Vec<_>>()),
        conductance_log_slope: loglinear_slope(&xs, &rows.iter().map(|r| r.conductance).collect::<Vec<_>>()),
        conductance_ratios,
        rows,
    })
}

/// Cut check for one pair of segments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCut {
    pub i: u8,
    pub j: u8,
    /// States whose mixed segments are exactly `{i, j}`.
    pub inside: usize,
    /// States with mixed segments `{i}`, `{j}`, or a color missing the cycle.
    pub separator: usize,
    pub is_cut: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossRow {
    pub ell: usize,
    pub states: usize,
    /// States where one color misses the outer cycle.
    pub beta0: usize,
    pub max_beta: usize,
    /// Number of states per mixed-segment set, keyed like `"2,4"`.
    pub beta_counts: BTreeMap<String, usize>,
    pub pairs: Vec<PairCut>,
    pub arcs_contiguous: bool,
}

pub fn cross_report(ell: usize, cap: usize) -> Result<CrossRow> {
    let g = make_cross_grid(ell)?;
    let cb = cross_boundary(&g)?;
    let states = enumerate_2colorings(&g, cap)?;
    let betas: Vec<Vec<u8>> = states.iter().map(|&x| beta(&cb, x)).collect();
    let degenerate: Vec<bool> =
        states.iter().map(|&x| matches!(color_arc(&cb.outer, x, true), ColorArc::Empty | ColorArc::Full)).collect();
    let arcs_contiguous = states
        .iter()
        .all(|&x| [false, true].iter().all(|&red| !matches!(color_arc(&cb.outer, x, red), ColorArc::Split { .. })));
    let mut beta_counts = BTreeMap::new();
    for b in &betas {
        let key = b.iter().map(u8::to_string).collect::<Vec<_>>().join(",");
        *beta_counts.entry(key).or_insert(0) += 1;
    }
    let chain = recolor_chain(&g, states)?;
    let mut pairs = Vec::new();
    for i in 1..=4u8 {
        for j in i + 1..=4u8 {
            let inside: Vec<bool> = betas.iter().map(|b| b == &[i, j]).collect();
            let sep: Vec<bool> =
                betas.iter().zip(&degenerate).map(|(b, &d)| d || b == &[i] || b == &[j]).collect();
            pairs.push(PairCut {
                i,
                j,
                inside: inside.iter().filter(|&&x| x).count(),
                separator: sep.iter().filter(|&&x| x).count(),
                is_cut: separates(&chain, &inside, &sep),
            });
        }
    }
    Ok(CrossRow {
        ell,
        states: chain.states.len(),
        beta0: degenerate.iter().filter(|&&d| d).count(),
        max_beta: betas.iter().map(Vec::len).max().unwrap_or(0),
        beta_counts,
        pairs,
        arcs_contiguous,
    })
}
