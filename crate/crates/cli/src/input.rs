//! Flag types shared by several subcommands.

use anyhow::{anyhow, bail, Context};
use clap::{Args, ValueEnum};
use contig::canonical::Slack;
use contig::graph::{
    bandwidth_exact, bandwidth_heuristic, center_ordering, column_major_ordering, make_cross_grid, make_cycle,
    make_grid, make_path, make_torus, reverse_cuthill_mckee, row_major_ordering, Graph, VertexOrdering,
    DEFAULT_EXACT_LIMIT,
};
use serde::{Serialize, Serializer};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// `KxL`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims(pub usize, pub usize);

impl FromStr for Dims {
    type Err = String;
    fn from_str(s: &str) -> Result<Dims, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected KxL, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        Ok(Dims(parse(a)?, parse(b)?))
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}

impl Serialize for Dims {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
pub struct GraphArgs {
    /// Edge list: `n m` header, then `m` lines `u v`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Dims>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torus: Option<Dims>,
    /// Union of a horizontal and a vertical `3 x L` strip.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<usize>,
}

impl GraphArgs {
    pub fn build(&self) -> anyhow::Result<Graph> {
        let g = if let Some(p) = &self.graph {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Graph::parse_edge_list(&text)?
        } else if let Some(Dims(k, l)) = self.grid {
            make_grid(k, l)?
        } else if let Some(Dims(k, l)) = self.torus {
            make_torus(k, l)?
        } else if let Some(l) = self.cross {
            make_cross_grid(l)?
        } else if let Some(n) = self.path {
            make_path(n)?
        } else if let Some(n) = self.cycle {
            make_cycle(n)?
        } else {
            bail!("no graph given");
        };
        Ok(g)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SlackArgs {
    /// Keep `10t` classes free during reduction (needs `q > 10t`).
    #[arg(long, conflicts_with = "slack")]
    pub strict: bool,
    /// Keep this many classes free during reduction.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<usize>,
}

impl SlackArgs {
    pub fn mode(&self) -> Slack {
        match (self.strict, self.slack) {
            (true, _) => Slack::Strict,
            (false, Some(spare)) => Slack::Relaxed { spare },
            (false, None) => Slack::Relaxed { spare: 1 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSpec {
    All,
    Sample(usize),
}

impl FromStr for PairSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<PairSpec, String> {
        if s == "all" {
            return Ok(PairSpec::All);
        }
        let n = s.strip_prefix("sample:").ok_or_else(|| format!("expected `all` or `sample:N`, got {s:?}"))?;
        n.parse().map(PairSpec::Sample).map_err(|e| format!("{n:?}: {e}"))
    }
}

impl fmt::Display for PairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairSpec::All => f.write_str("all"),
            PairSpec::Sample(n) => write!(f, "sample:{n}"),
        }
    }
}

impl Serialize for PairSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingMethod {
    /// Exact below the default size limit, heuristic above.
    Auto,
    Exact,
    Heuristic,
    Rcm,
    Row,
    Column,
    Center,
}

pub fn ordering(g: &Graph, method: OrderingMethod) -> anyhow::Result<VertexOrdering> {
    let need_coords = || anyhow!("ordering needs a graph with grid coordinates");
    Ok(match method {
        OrderingMethod::Auto if g.n() <= DEFAULT_EXACT_LIMIT => bandwidth_exact(g, DEFAULT_EXACT_LIMIT)?,
        OrderingMethod::Auto | OrderingMethod::Heuristic => bandwidth_heuristic(g),
        OrderingMethod::Exact => bandwidth_exact(g, 64)?,
        OrderingMethod::Rcm => reverse_cuthill_mckee(g),
        OrderingMethod::Row => row_major_ordering(g).ok_or_else(need_coords)?,
        OrderingMethod::Column => column_major_ordering(g).ok_or_else(need_coords)?,
        OrderingMethod::Center => center_ordering(g).ok_or_else(need_coords)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Family {
    /// `3 x ell` strips.
    #[value(name = "3xl")]
    #[serde(rename = "3xl")]
    Strip,
    /// Cross graphs of arm length `ell`.
    #[value(name = "cross")]
    #[serde(rename = "cross")]
    Cross,
}

/// `a..b` (inclusive) or `a,b,c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EllRange(pub Vec<usize>);

impl FromStr for EllRange {
    type Err = String;
    fn from_str(s: &str) -> Result<EllRange, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        let v: Vec<usize> = match s.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range {s:?}"));
                }
                (a..=b).collect()
            }
            None => s.split(',').map(num).collect::<Result<_, _>>()?,
        };
        Ok(EllRange(v))
    }
}
