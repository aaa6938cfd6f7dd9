//! Subcommand bodies. Each returns after writing its document.

use crate::input::{ordering, Family, PairSpec};
use crate::{
    BandwidthArgs, CanonicalArgs, ClimbArgs, ConductanceArgs, EnumerateArgs, MixArgs, SampleArgs, SeedArgs, TorpidArgs,
};
use anyhow::{bail, Context};
use contig::canonical::{
    all_pairs_paths, build_path, check_path, congestion, path_intervals, transition_edge_count, PathConfig,
};
use contig::diagnostics::{
    build_matrix, conductance as set_conductance, declared_target, edge_flow, enumerate_states, find_frozen,
    max_abs_diff, mixing_lower_bound, mixing_upper_bound, spectral_gap, stationary_vector, summarize, tv_mixing_time,
};
use contig::glauber::{run, sample_states, ChainConfig, ChainVariant, RunOptions};
use contig::graph::Graph;
use contig::mountain::{self, verify_sequence, CycleLabels};
use contig::partition::{validate, Partition, StateParams};
use contig::seed::{partition_connected, partition_grid, ReductionSearch};
use contig::torpid::{cross_report, strip_report};
use contig::Error;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct Output {
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
}

impl Output {
    pub fn new(out: Option<&Path>, csv: Option<&Path>) -> Output {
        Output { out: out.map(Path::to_path_buf), csv: csv.map(Path::to_path_buf) }
    }

    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(std::io::stdout().lock())),
        })
    }

    /// `{"config": ..., "result": ...}`, pretty printed.
    fn document(&self, hdr: &impl Serialize, result: &impl Serialize) -> anyhow::Result<()> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, &json!({ "config": hdr, "result": result }))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    fn csv<T: Serialize>(&self, rows: &[T]) -> anyhow::Result<()> {
        let Some(p) = &self.csv else { return Ok(()) };
        let mut w = csv::Writer::from_path(p).with_context(|| format!("creating {}", p.display()))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Tree-breaking start state with `q` slots.
fn seed_state(g: &Graph, b: usize, q: usize) -> anyhow::Result<Partition> {
    let p = partition_connected(g, b)?;
    if p.kappa() > q {
        return Err(Error::Infeasible(format!("tree breaking needs {} classes but q={q}", p.kappa())).into());
    }
    Ok(p.with_q(q)?)
}

pub fn sample(hdr: &impl Serialize, a: &SampleArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let params = StateParams::new(a.chain.q, a.chain.b, 0)?;
    let p0 = if a.singletons { Partition::singletons(g.n(), params.q)? } else { seed_state(&g, params.b, params.q)? };
    let cfg = ChainConfig { params, variant: a.chain.variant, seed: a.seed, steps: a.steps };
    let trace = run(&g, &p0, &cfg, RunOptions { thin: a.thin, burn_in: a.burn_in })?;
    let mut w = out.writer()?;
    serde_json::to_writer(&mut w, &json!({ "config": hdr }))?;
    w.write_all(b"\n")?;
    trace.write_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn seed(hdr: &impl Serialize, a: &SeedArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let p = match (&a.sizes, a.graph.grid) {
        (Some(sizes), Some(d)) => partition_grid(d.0, d.1, sizes)?,
        (Some(_), None) => bail!("--sizes needs --grid"),
        (None, _) => partition_connected(&g, a.b)?,
    };
    let q = a.q.unwrap_or(p.kappa());
    if p.kappa() > q {
        return Err(Error::Infeasible(format!("{} classes do not fit in q={q}", p.kappa())).into());
    }
    let p = p.with_q(q)?;
    let params = StateParams::new(q, a.b, 0)?;
    let sizes: Vec<usize> = p.sizes().iter().copied().filter(|&s| s > 0).collect();
    let valid = validate(&g, &p, &params).map_err(|v| format!("{v:?}"));
    out.document(
        hdr,
        &json!({
            "n": g.n(),
            "kappa": p.kappa(),
            "sizes": sizes,
            "valid": valid.is_ok(),
            "violation": valid.err(),
            "partition": p,
        }),
    )
}

pub fn enumerate(hdr: &impl Serialize, a: &EnumerateArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let params = StateParams::new(a.q, a.b, 0)?;
    let space = enumerate_states(&g, &params, a.cap)?;
    let states = a.list.then(|| space.states());
    out.document(
        hdr,
        &json!({
            "count": space.len(),
            "kappa_counts": space.kappa_counts(),
            "states": states,
        }),
    )
}

pub fn mix(hdr: &impl Serialize, a: &MixArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let params = StateParams::new(a.chain.q, a.chain.b, 0)?;
    let space = enumerate_states(&g, &params, a.cap)?;
    let m = build_matrix(&g, &space, a.chain.variant)?;
    let stat = stationary_vector(&m, a.tol, a.max_iter);
    let target = declared_target(&space, a.chain.variant);
    let spec = spectral_gap(&m, &stat.pi, a.tol, a.max_iter);
    let pi_min = stat.pi.iter().copied().fold(f64::INFINITY, f64::min);
    let t_mix = tv_mixing_time(&m, &stat.pi, a.eps, a.max_t);
    out.document(
        hdr,
        &json!({
            "matrix": summarize(&m),
            "frozen_states": find_frozen(&g, &space).len(),
            "stationary_residual": stat.residual,
            "stationary_iterations": stat.iterations,
            "stationary_warning": stat.warning,
            "max_deviation_from_declared": max_abs_diff(&stat.pi, &target),
            "pi_min": pi_min,
            "spectral": spec,
            "tv_mixing_time": t_mix,
            "mixing_upper_bound": mixing_upper_bound(spec.absolute_gap, pi_min, a.eps),
            "mixing_lower_bound": mixing_lower_bound(spec.absolute_gap, a.eps),
        }),
    )
}

pub fn conductance(hdr: &impl Serialize, a: &ConductanceArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let params = StateParams::new(a.chain.q, a.chain.b, 0)?;
    let space = enumerate_states(&g, &params, a.cap)?;
    let m = build_matrix(&g, &space, a.chain.variant)?;
    let stat = stationary_vector(&m, a.tol, a.max_iter);
    let in_s: Vec<bool> = space.states().iter().map(|s| s.kappa() <= a.kappa_max).collect();
    let pi_s: f64 = (0..space.len()).filter(|&i| in_s[i]).map(|i| stat.pi[i]).sum();
    let phi = set_conductance(&m, &stat.pi, &in_s)?;
    out.document(
        hdr,
        &json!({
            "states": space.len(),
            "in_s": in_s.iter().filter(|&&x| x).count(),
            "pi_s": pi_s,
            "flow": edge_flow(&m, &stat.pi, &in_s),
            "conductance": phi,
        }),
    )
}

/// One sampled pair.
#[derive(Serialize)]
struct PairRow {
    pair: usize,
    built: bool,
    error: Option<String>,
    length: usize,
    legal: bool,
    start_matches: bool,
    end_matches: bool,
    within_length_bound: bool,
    checkpoints_hold: bool,
    max_abs_error_term: i64,
    peak_kappa: usize,
    max_phase_rise: usize,
}

#[derive(Serialize, Default)]
struct Refusals {
    infeasible: usize,
    reduction_unavailable: usize,
    other: usize,
}

impl Refusals {
    fn add(&mut self, e: &Error) {
        match e {
            Error::Infeasible(_) => self.infeasible += 1,
            Error::ReductionUnavailable { .. } => self.reduction_unavailable += 1,
            _ => self.other += 1,
        }
    }
}

pub fn canonical(hdr: &impl Serialize, a: &CanonicalArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let params = StateParams::new(a.q, a.b, 0)?;
    let ord = ordering(&g, a.ordering)?;
    let iv = path_intervals(&g, &ord, a.b)?;
    let cfg = PathConfig { slack: a.slack.mode(), search: ReductionSearch::new(a.max_classes, usize::MAX) };
    cfg.slack.phase0_target(a.q, iv.t())?;
    let geometry = json!({
        "bandwidth": ord.bandwidth(),
        "t": iv.t(),
        "m": iv.m(),
        "checkpoint_bound": cfg.slack.checkpoint_bound(a.q, iv.t()),
    });
    let mut refused = Refusals::default();
    let mut first_error: Option<Error> = None;
    match a.pairs {
        PairSpec::All => {
            let space = enumerate_states(&g, &params, a.cap)?;
            let m = build_matrix(&g, &space, ChainVariant::PartitionMetropolis)?;
            let mut paths = Vec::new();
            for (_, r) in all_pairs_paths(&g, &space, &iv, &cfg) {
                match r {
                    Ok(p) => paths.push(p),
                    Err(e) => {
                        refused.add(&e);
                        first_error.get_or_insert(e);
                    }
                }
            }
            let pairs = space.len() * space.len().saturating_sub(1);
            if paths.is_empty() && pairs > 0 {
                return Err(first_error.expect("some pair failed").into());
            }
            let illegal_steps: usize =
                paths.iter().map(|p| p.windows(2).filter(|w| m.get(w[0], w[1]) <= 0.0).count()).sum();
            let report = congestion(space.len(), transition_edge_count(&m), &paths);
            out.document(
                hdr,
                &json!({
                    "geometry": geometry,
                    "states": space.len(),
                    "pairs": pairs,
                    "built": paths.len(),
                    "refused": refused,
                    "illegal_steps": illegal_steps,
                    "congestion": report,
                }),
            )
        }
        PairSpec::Sample(count) => {
            let p0 = seed_state(&g, a.b, a.q)?;
            let n = g.n() as u64;
            let steps = a.steps.unwrap_or(n * n);
            let chain = ChainConfig { params, variant: ChainVariant::PartitionMetropolis, seed: a.seed, steps };
            let ends = sample_states(&g, &p0, &chain, 2 * count)?;
            let results: Vec<Result<PairRow, Error>> = (0..count)
                .into_par_iter()
                .map(|i| {
                    let (w, w2) = (&ends[2 * i], &ends[2 * i + 1]);
                    let path = build_path(&g, w, w2, &params, &iv, &cfg)?;
                    let check = check_path(&g, &path, &params, w, w2);
                    Ok(PairRow {
                        pair: i,
                        built: true,
                        error: None,
                        length: path.len(),
                        legal: check.illegal.is_empty(),
                        start_matches: check.start_matches,
                        end_matches: check.end_matches,
                        within_length_bound: path.within_length_bound(),
                        checkpoints_hold: path.checkpoints_hold(),
                        max_abs_error_term: path.checkpoints.iter().map(|c| c.error_term.abs()).max().unwrap_or(0),
                        peak_kappa: path.peak_kappa,
                        max_phase_rise: path.max_phase_rise,
                    })
                })
                .collect();
            let mut rows = Vec::with_capacity(count);
            for (i, r) in results.into_iter().enumerate() {
                match r {
                    Ok(row) => rows.push(row),
                    Err(e) => {
                        refused.add(&e);
                        rows.push(PairRow {
                            pair: i,
                            built: false,
                            error: Some(e.to_string()),
                            length: 0,
                            legal: false,
                            start_matches: false,
                            end_matches: false,
                            within_length_bound: false,
                            checkpoints_hold: false,
                            max_abs_error_term: 0,
                            peak_kappa: 0,
                            max_phase_rise: 0,
                        });
                        first_error.get_or_insert(e);
                    }
                }
            }
            let built: Vec<&PairRow> = rows.iter().filter(|r| r.built).collect();
            if built.is_empty() && count > 0 {
                return Err(first_error.expect("some pair failed").into());
            }
            let summary = json!({
                "built": built.len(),
                "all_legal": built.iter().all(|r| r.legal && r.start_matches && r.end_matches),
                "all_within_length_bound": built.iter().all(|r| r.within_length_bound),
                "all_checkpoints_hold": built.iter().all(|r| r.checkpoints_hold),
                "max_length": built.iter().map(|r| r.length).max(),
                "max_abs_error_term": built.iter().map(|r| r.max_abs_error_term).max(),
                "max_peak_kappa": built.iter().map(|r| r.peak_kappa).max(),
            });
            out.csv(&rows)?;
            out.document(
                hdr,
                &json!({
                    "geometry": geometry,
                    "steps_per_endpoint": steps,
                    "pairs": count,
                    "refused": refused,
                    "summary": summary,
                    "rows": rows,
                }),
            )
        }
    }
}

fn climb_labels(a: &ClimbArgs) -> anyhow::Result<serde_json::Value> {
    let cl = match a.k {
        Some(k) => CycleLabels::new(a.labels.clone(), k)?,
        None => CycleLabels::tight(a.labels.clone())?,
    };
    let seq = mountain::climb(&cl)?;
    Ok(json!({
        "m": cl.m(),
        "k": cl.k(),
        "steps": seq.steps(),
        "verified": verify_sequence(&cl, &seq),
        "max_discrepancy": seq.max_discrepancy(&cl),
        "within_quadratic_bound": seq.within_quadratic_bound(),
        "arcs": seq.arcs,
    }))
}

pub fn climb(hdr: &impl Serialize, a: &ClimbArgs, out: &Output) -> anyhow::Result<()> {
    out.document(hdr, &climb_labels(a)?)
}

/// Flat view of a cross-graph row for the CSV mirror.
#[derive(Serialize)]
struct CrossCsv {
    ell: usize,
    states: usize,
    beta0: usize,
    max_beta: usize,
    pairs_cut: usize,
    arcs_contiguous: bool,
}

pub fn torpid(hdr: &impl Serialize, a: &TorpidArgs, out: &Output) -> anyhow::Result<()> {
    match a.family {
        Family::Strip => {
            let report = strip_report(&a.ell_range.0, a.cap)?;
            out.csv(&report.rows)?;
            out.document(hdr, &report)
        }
        Family::Cross => {
            let rows = a.ell_range.0.iter().map(|&l| cross_report(l, a.cap)).collect::<contig::Result<Vec<_>>>()?;
            let flat: Vec<CrossCsv> = rows
                .iter()
                .map(|r| CrossCsv {
                    ell: r.ell,
                    states: r.states,
                    beta0: r.beta0,
                    max_beta: r.max_beta,
                    pairs_cut: r.pairs.iter().filter(|p| p.is_cut).count(),
                    arcs_contiguous: r.arcs_contiguous,
                })
                .collect();
            out.csv(&flat)?;
            out.document(hdr, &json!({ "rows": rows }))
        }
    }
}

pub fn bandwidth(hdr: &impl Serialize, a: &BandwidthArgs, out: &Output) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let ord = ordering(&g, a.method)?;
    out.document(hdr, &json!({ "n": g.n(), "bandwidth": ord.bandwidth(), "order": ord.order() }))
}
