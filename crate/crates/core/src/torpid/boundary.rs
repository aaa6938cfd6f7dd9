use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::Serialize;
use std::collections::HashSet;

/// The outer face of a grid-like graph as a counterclockwise cycle, starting
/// at the lowest row's leftmost vertex (rows grow downward).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OuterCycle {
    pub cycle: Vec<usize>,
}

/// Vertices missing one of their eight surrounding grid positions form the
/// outer face; they are chained by grid edges and oriented by signed area.
pub fn outer_cycle(g: &Graph) -> Result<OuterCycle> {
    let coords = g.coords().ok_or_else(|| Error::InvalidGraph("graph has no coordinates".into()))?;
    let present: HashSet<(i32, i32)> = coords.iter().copied().collect();
    let on_face: Vec<bool> = coords
        .iter()
        .map(|&(r, c)| (-1..=1).any(|dr| (-1..=1).any(|dc| !present.contains(&(r + dr, c + dc)))))
        .collect();
    let start = (0..g.n())
        .filter(|&v| on_face[v])
        .min_by_key(|&v| (-coords[v].0, coords[v].1))
        .ok_or_else(|| Error::InvalidGraph("empty graph".into()))?;
    let face_nbrs = |v: usize| -> Vec<usize> { g.neighbors(v).iter().copied().filter(|&w| on_face[w]).collect() };
    if (0..g.n()).any(|v| on_face[v] && face_nbrs(v).len() != 2) {
        return Err(Error::InvalidGraph("outer face is not a simple cycle of grid edges".into()));
    }
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = face_nbrs(start)[0];
    while cur != start {
        cycle.push(cur);
        let next = face_nbrs(cur).into_iter().find(|&w| w != prev).expect("two face neighbors");
        prev = cur;
        cur = next;
    }
    if cycle.len() != on_face.iter().filter(|&&f| f).count() {
        return Err(Error::InvalidGraph("outer face splits into several cycles".into()));
    }
    // x = col, y = -row; counterclockwise means positive area
    let area: i64 = (0..cycle.len())
        .map(|i| {
            let (r0, c0) = coords[cycle[i]];
            let (r1, c1) = coords[cycle[(i + 1) % cycle.len()]];
            c0 as i64 * -(r1 as i64) - c1 as i64 * -(r0 as i64)
        })
        .sum();
    if area < 0 {
        cycle[1..].reverse();
    }
    Ok(OuterCycle { cycle })
}

/// Intersection of one color class with the outer cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ColorArc {
    Empty,
    Full,
    /// Contiguous arc, entered at `first` and left at `last` in cycle order.
    Arc { first: usize, last: usize, len: usize },
    /// The class meets the cycle in several pieces.
    Split { pieces: usize },
}

/// The arc of color `red` (bit set) or blue (bit clear) on the cycle.
pub fn color_arc(oc: &OuterCycle, bits: u128, red: bool) -> ColorArc {
    let cyc = &oc.cycle;
    let has = |i: usize| ((bits >> cyc[i]) & 1 == 1) == red;
    let len = cyc.len();
    let count = (0..len).filter(|&i| has(i)).count();
    if count == 0 {
        return ColorArc::Empty;
    }
    if count == len {
        return ColorArc::Full;
    }
    let starts: Vec<usize> = (0..len).filter(|&i| has(i) && !has((i + len - 1) % len)).collect();
    if starts.len() != 1 {
        return ColorArc::Split { pieces: starts.len() };
    }
    let s = starts[0];
    ColorArc::Arc { first: cyc[s], last: cyc[(s + count - 1) % len], len: count }
}

/// Position of a strip coloring relative to the bottleneck.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SClass {
    /// The blue arc starts at a column more than one left of where it ends.
    InS,
    /// Start and end columns differ by at most one.
    Boundary,
    OutS,
    /// One color misses the outer cycle.
    Degenerate,
}

/// Columns of the first and last vertex of the blue arc.
pub fn end_columns(g: &Graph, oc: &OuterCycle, bits: u128) -> Result<Option<(i32, i32)>> {
    let coords = g.coords().ok_or_else(|| Error::InvalidGraph("graph has no coordinates".into()))?;
    match color_arc(oc, bits, false) {
        ColorArc::Empty | ColorArc::Full => Ok(None),
        ColorArc::Arc { first, last, .. } => Ok(Some((coords[first].1, coords[last].1))),
        ColorArc::Split { pieces } => Err(Error::Internal(format!("blue meets the outer cycle in {pieces} pieces"))),
    }
}

pub fn classify_s(g: &Graph, oc: &OuterCycle, bits: u128) -> Result<SClass> {
    Ok(match end_columns(g, oc, bits)? {
        None => SClass::Degenerate,
        Some((a, b)) if a.abs_diff(b) <= 1 => SClass::Boundary,
        Some((a, b)) if a < b => SClass::InS,
        Some(_) => SClass::OutS,
    })
}

/// Outer cycle of the cross graph cut at its four reentrant corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossBoundary {
    pub outer: OuterCycle,
    /// Degree-4 vertices of the outer cycle, in cycle order from the start.
    pub corners: Vec<usize>,
    /// Interiors of the four segments between corners, numbered
    /// counterclockwise from the north arm: north, west, south, east.
    pub segments: [Vec<usize>; 4],
}

pub fn cross_boundary(g: &Graph) -> Result<CrossBoundary> {
    let outer = outer_cycle(g)?;
    let coords = g.coords().expect("outer_cycle checked coordinates");
    let cyc = &outer.cycle;
    let corner_pos: Vec<usize> = (0..cyc.len()).filter(|&i| g.degree(cyc[i]) == 4).collect();
    if corner_pos.len() != 4 {
        return Err(Error::InvalidGraph(format!("expected 4 corners on the outer cycle, found {}", corner_pos.len())));
    }
    let mut segs: Vec<Vec<usize>> = (0..4)
        .map(|j| {
            let (a, b) = (corner_pos[j], corner_pos[(j + 1) % 4]);
            let steps = (b + cyc.len() - a) % cyc.len();
            (1..steps).map(|d| cyc[(a + d) % cyc.len()]).collect()
        })
        .collect();
    let top = (0..g.n()).min_by_key(|&v| coords[v]).expect("nonempty");
    let north = segs.iter().position(|s| s.contains(&top)).ok_or_else(|| Error::Internal("north tip off the cycle".into()))?;
    segs.rotate_left(north);
    let segments: [Vec<usize>; 4] = segs.try_into().expect("four segments");
    Ok(CrossBoundary { corners: corner_pos.iter().map(|&i| cyc[i]).collect(), outer, segments })
}

/// Segment numbers (1 to 4) whose interior holds both colors.
pub fn beta(cb: &CrossBoundary, bits: u128) -> Vec<u8> {
    (0..4)
        .filter(|&i| {
            let s = &cb.segments[i];
            s.iter().any(|&v| (bits >> v) & 1 == 1) && s.iter().any(|&v| (bits >> v) & 1 == 0)
        })
        .map(|i| i as u8 + 1)
        .collect()
}
