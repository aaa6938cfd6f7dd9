//! Discrete mountain climbing on a labeled cycle: grow an arc from empty to
//! the whole cycle one vertex at a time while keeping its label sum within
//! `2K` of the proportional share `|X| r / m`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleLabels {
    labels: Vec<i64>,
    k: i64,
    r: i64,
}

impl CycleLabels {
    /// Labels with bound `k`; every `|label| <= k` is required.
    pub fn new(labels: Vec<i64>, k: i64) -> Result<CycleLabels> {
        if labels.is_empty() {
            return Err(Error::InvalidParams("cycle needs at least one vertex".into()));
        }
        if let Some(bad) = labels.iter().find(|l| l.abs() > k) {
            return Err(Error::InvalidParams(format!("label {bad} exceeds bound {k}")));
        }
        let r = labels.iter().sum();
        Ok(CycleLabels { labels, k, r })
    }

    /// Labels with the tightest bound, `max |label|`.
    pub fn tight(labels: Vec<i64>) -> Result<CycleLabels> {
        let k = labels.iter().map(|l| l.abs()).max().unwrap_or(0);
        CycleLabels::new(labels, k)
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }
}

/// Cyclic arc `start, start+1, ..., start+len-1 (mod m)`. The empty and full
/// arcs always have `start = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub start: usize,
    pub len: usize,
}

impl Arc {
    pub fn contains(&self, v: usize, m: usize) -> bool {
        (v + m - self.start) % m < self.len
    }

    pub fn vertices(&self, m: usize) -> Vec<usize> {
        (0..self.len).map(|i| (self.start + i) % m).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSequence {
    pub m: usize,
    pub arcs: Vec<Arc>,
}

impl ArcSequence {
    /// Number of steps `T`.
    pub fn steps(&self) -> usize {
        self.arcs.len().saturating_sub(1)
    }

    /// Whether `T <= m^2 / 2`.
    pub fn within_quadratic_bound(&self) -> bool {
        2 * self.steps() <= self.m * self.m
    }

    /// Largest `|sum(X) - |X| r / m|` along the sequence.
    pub fn max_discrepancy(&self, cl: &CycleLabels) -> f64 {
        let m = cl.m() as f64;
        self.arcs
            .iter()
            .map(|a| {
                let s: i64 = a.vertices(cl.m()).iter().map(|&v| cl.labels[v]).sum();
                (s as f64 - a.len as f64 * cl.r as f64 / m).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Node ids: 0 empty, 1 full, then `2 + start * (m-1) + (len-1)` for proper arcs.
struct ArcSpace<'a> {
    cl: &'a CycleLabels,
    prefix: Vec<i64>,
}

impl ArcSpace<'_> {
    fn m(&self) -> usize {
        self.cl.m()
    }

    fn count(&self) -> usize {
        2 + self.m() * (self.m() - 1)
    }

    fn id(&self, a: Arc) -> usize {
        match a.len {
            0 => 0,
            l if l == self.m() => 1,
            l => 2 + a.start * (self.m() - 1) + (l - 1),
        }
    }

    fn arc(&self, id: usize) -> Arc {
        match id {
            0 => Arc { start: 0, len: 0 },
            1 => Arc { start: 0, len: self.m() },
            _ => Arc { start: (id - 2) / (self.m() - 1), len: (id - 2) % (self.m() - 1) + 1 },
        }
    }

    fn sum(&self, a: Arc) -> i64 {
        self.prefix[a.start + a.len] - self.prefix[a.start]
    }

    /// `|m S - len r| <= 2 K m`, in integers.
    fn balanced(&self, a: Arc) -> bool {
        let m = self.m() as i128;
        let lhs = (m * self.sum(a) as i128 - a.len as i128 * self.cl.r as i128).abs();
        lhs <= 2 * self.cl.k as i128 * m
    }

    fn neighbors(&self, a: Arc) -> Vec<Arc> {
        let m = self.m();
        match a.len {
            0 => (0..m).map(|s| Arc { start: s, len: 1 }).collect(),
            l if l == m => (0..m).map(|s| Arc { start: s, len: m - 1 }).collect(),
            l => {
                let grow = |start: usize| if l + 1 == m { Arc { start: 0, len: m } } else { Arc { start, len: l + 1 } };
                let shrink = |start: usize| if l == 1 { Arc { start: 0, len: 0 } } else { Arc { start, len: l - 1 } };
                vec![grow(a.start), grow((a.start + m - 1) % m), shrink(a.start), shrink((a.start + 1) % m)]
            }
        }
    }
}

/// Shortest sequence of balanced arcs from empty to the full cycle, each step
/// adding or removing one endpoint. Fails only if no such sequence exists,
/// which the discrete mountain-climbing lemma rules out.
pub fn climb(cl: &CycleLabels) -> Result<ArcSequence> {
    let m = cl.m();
    if m == 1 {
        return Ok(ArcSequence { m, arcs: vec![Arc { start: 0, len: 0 }, Arc { start: 0, len: 1 }] });
    }
    let mut prefix = vec![0i64; 2 * m + 1];
    for i in 0..2 * m {
        prefix[i + 1] = prefix[i] + cl.labels[i % m];
    }
    let space = ArcSpace { cl, prefix };
    let mut prev = vec![usize::MAX; space.count()];
    prev[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        if id == 1 {
            break;
        }
        for next in space.neighbors(space.arc(id)) {
            let nid = space.id(next);
            if prev[nid] == usize::MAX && space.balanced(next) {
                prev[nid] = id;
                queue.push_back(nid);
            }
        }
    }
    if prev[1] == usize::MAX {
        return Err(Error::Internal("no balanced arc sequence found".into()));
    }
    let mut ids = vec![1];
    while *ids.last().unwrap() != 0 {
        ids.push(prev[*ids.last().unwrap()]);
    }
    ids.reverse();
    Ok(ArcSequence { m, arcs: ids.into_iter().map(|id| space.arc(id)).collect() })
}

/// Independent check of a sequence: empty start, full end, intermediate sets
/// nonempty proper cyclic paths, one vertex changed per step, and every set
/// within `2K` of its proportional share.
pub fn verify_sequence(cl: &CycleLabels, seq: &ArcSequence) -> bool {
    let m = cl.m();
    if seq.m != m || seq.arcs.len() < 2 {
        return false;
    }
    let sets: Vec<Vec<bool>> = seq
        .arcs
        .iter()
        .map(|a| {
            let mut set = vec![false; m];
            for i in 0..a.len.min(m) {
                set[(a.start + i) % m] = true;
            }
            set
        })
        .collect();
    let t = sets.len() - 1;
    if sets[0].iter().any(|&x| x) || !sets[t].iter().all(|&x| x) {
        return false;
    }
    for set in &sets[1..t] {
        let size = set.iter().filter(|&&x| x).count();
        // a proper nonempty subset of a cycle is a path iff it has exactly one
        // entry point going around
        let entries = (0..m).filter(|&i| set[i] && !set[(i + m - 1) % m]).count();
        if size == 0 || size == m || entries != 1 {
            return false;
        }
    }
    for w in sets.windows(2) {
        if (0..m).filter(|&i| w[0][i] != w[1][i]).count() != 1 {
            return false;
        }
    }
    let r: i128 = cl.labels.iter().map(|&l| l as i128).sum();
    sets.iter().all(|set| {
        let s: i128 = (0..m).filter(|&i| set[i]).map(|i| cl.labels[i] as i128).sum();
        let size = set.iter().filter(|&&x| x).count() as i128;
        (m as i128 * s - size * r).abs() <= 2 * cl.k as i128 * m as i128
    })
}
