//! Two-colorings with both color classes connected, on narrow grids and the
//! cross graph, and the bottlenecks that make single-vertex recoloring mix
//! slowly on them.
//!
//! A coloring is a bitmask over the vertices: bit `v` set means `v` has
//! color 2 (red), clear means color 1 (blue).

mod bottleneck;
mod boundary;

pub use bottleneck::{
    strip_row,
    cross_report, loglinear_slope, loglog_slope, recolor_chain, separates, set_conductance, strip_report, CrossRow,
    PairCut, RecolorChain, StripReport, StripRow,
};
pub use boundary::{beta, classify_s, color_arc, cross_boundary, end_columns, outer_cycle, ColorArc, CrossBoundary, OuterCycle, SClass};

use crate::error::{Error, Result};
use crate::graph::{bandwidth_heuristic, Graph};
use rayon::prelude::*;
use std::collections::HashMap;

/// Largest vertex count a bitmask coloring can hold.
pub const MAX_VERTICES: usize = 128;
/// Largest vertex count for the exhaustive filter.
pub const MAX_FILTER_VERTICES: usize = 30;

/// Neighbor bitmasks of every vertex.
pub fn neighbor_masks(g: &Graph) -> Result<Vec<u128>> {
    if g.n() > MAX_VERTICES {
        return Err(Error::TooLarge(format!("{} vertices exceed the {MAX_VERTICES}-bit coloring limit", g.n())));
    }
    Ok((0..g.n()).map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | 1 << w)).collect())
}

/// Component of `seed` inside `within`.
fn flood(nbr: &[u128], within: u128, seed: u128) -> u128 {
    let mut comp = seed;
    let mut frontier = seed;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= nbr[v];
        }
        next &= within & !comp;
        comp |= next;
        frontier = next;
    }
    comp
}

/// Whether `mask` is empty or induces a connected subgraph.
pub fn mask_connected(nbr: &[u128], mask: u128) -> bool {
    mask == 0 || flood(nbr, mask, mask & mask.wrapping_neg()) == mask
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Both color classes connected (or empty).
pub fn is_valid_coloring(nbr: &[u128], bits: u128) -> bool {
    let all = full_mask(nbr.len());
    mask_connected(nbr, bits & all) && mask_connected(nbr, !bits & all)
}

/// Every valid coloring by exhaustive filtering of all `2^n` colorings.
pub fn enumerate_2colorings_filter(g: &Graph) -> Result<Vec<u128>> {
    if g.n() > MAX_FILTER_VERTICES {
        return Err(Error::TooLarge(format!("exhaustive filter is limited to {MAX_FILTER_VERTICES} vertices")));
    }
    let nbr = neighbor_masks(g)?;
    let total = 1u64 << g.n();
    Ok((0..total).into_par_iter().map(u128::from).filter(|&b| is_valid_coloring(&nbr, b)).collect())
}

/// Depth at which the search is split across workers.
const SPLIT_DEPTH: usize = 12;

struct Backtrack<'a> {
    nbr: &'a [u128],
    order: &'a [usize],
    /// Vertices at positions `>= i`, for each `i`.
    later: Vec<u128>,
    cap: usize,
}

impl Backtrack<'_> {
    /// True when assigning the first `depth` vertices left a color with a
    /// sealed-off component next to another component of the same color.
    fn dead(&self, depth: usize, bits: u128) -> bool {
        let assigned = !self.later[depth] & full_mask(self.nbr.len());
        for class in [bits & assigned, !bits & assigned] {
            let mut rest = class;
            let mut comps = 0;
            let mut sealed = false;
            while rest != 0 {
                let comp = flood(self.nbr, class, rest & rest.wrapping_neg());
                rest &= !comp;
                comps += 1;
                let mut touches = false;
                let mut c = comp;
                while c != 0 {
                    let v = c.trailing_zeros() as usize;
                    c &= c - 1;
                    if self.nbr[v] & self.later[depth] != 0 {
                        touches = true;
                        break;
                    }
                }
                sealed |= !touches;
            }
            if sealed && comps > 1 {
                return true;
            }
        }
        false
    }

    fn run(&self, depth: usize, bits: u128, out: &mut Vec<u128>) -> Result<()> {
        if self.dead(depth, bits) {
            return Ok(());
        }
        if depth == self.order.len() {
            if out.len() >= self.cap {
                return Err(Error::TooLarge(format!("more than {} colorings", self.cap)));
            }
            out.push(bits);
            return Ok(());
        }
        let v = self.order[depth];
        self.run(depth + 1, bits, out)?;
        self.run(depth + 1, bits | 1 << v, out)
    }

    fn prefixes(&self, depth: usize, bits: u128, stop: usize, out: &mut Vec<u128>) {
        if self.dead(depth, bits) {
            return;
        }
        if depth == stop {
            out.push(bits);
            return;
        }
        let v = self.order[depth];
        self.prefixes(depth + 1, bits, stop, out);
        self.prefixes(depth + 1, bits | 1 << v, stop, out);
    }
}

/// Every valid coloring, sorted, by backtracking along a low-bandwidth
/// ordering and pruning as soon as a sealed component appears. Fails once
/// more than `cap` colorings are found.
pub fn enumerate_2colorings(g: &Graph, cap: usize) -> Result<Vec<u128>> {
    let nbr = neighbor_masks(g)?;
    let ord = bandwidth_heuristic(g);
    let order = ord.order().to_vec();
    let n = order.len();
    let mut later = vec![0u128; n + 1];
    for i in (0..n).rev() {
        later[i] = later[i + 1] | 1 << order[i];
    }
    let bt = Backtrack { nbr: &nbr, order: &order, later, cap };
    let stop = SPLIT_DEPTH.min(n);
    let mut starts = Vec::new();
    bt.prefixes(0, 0, stop, &mut starts);
    let parts: Result<Vec<Vec<u128>>> = starts
        .into_par_iter()
        .map(|b| {
            let mut out = Vec::new();
            bt.run(stop, b, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut all: Vec<u128> = parts?.into_iter().flatten().collect();
    if all.len() > cap {
        return Err(Error::TooLarge(format!("more than {cap} colorings")));
    }
    all.sort_unstable();
    Ok(all)
}

/// Column state: colors, component labels in first-appearance order, and
/// which colors already have a finished component.
type Profile = (u8, Vec<u8>, u8);

fn relabel(labels: &[usize]) -> Vec<u8> {
    let mut map: Vec<(usize, u8)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|e| e.0 == l) {
            Some(e) => e.1,
            None => {
                let x = map.len() as u8;
                map.push((l, x));
                x
            }
        })
        .collect()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Counts valid colorings of the `k x l` grid by a column-by-column transfer
/// over connectivity profiles.
pub fn count_grid_2colorings(k: usize, l: usize) -> Result<u128> {
    if k == 0 || l == 0 || k > 8 {
        return Err(Error::InvalidParams(format!("profile count needs 1 <= k <= 8, got {k}x{l}")));
    }
    let color = |cols: u8, r: usize| (cols >> r) & 1;
    let mut states: HashMap<Profile, u128> = HashMap::new();
    for cols in 0..(1u16 << k) {
        let cols = cols as u8;
        let mut parent: Vec<usize> = (0..k).collect();
        for r in 1..k {
            if color(cols, r) == color(cols, r - 1) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, r - 1));
                parent[a] = b;
            }
        }
        let roots: Vec<usize> = (0..k).map(|r| find(&mut parent, r)).collect();
        *states.entry((cols, relabel(&roots), 0)).or_default() += 1;
    }
    for _ in 1..l {
        let mut next: HashMap<Profile, u128> = HashMap::new();
        for ((old, labels, closed), count) in &states {
            'cols: for cols in 0..(1u16 << k) {
                let cols = cols as u8;
                let mut closed = *closed;
                for c in 0..2u8 {
                    if closed >> c & 1 == 1 && (0..k).any(|r| color(cols, r) == c) {
                        continue 'cols;
                    }
                }
                // nodes 0..k old column, k..2k new column
                let mut parent: Vec<usize> = (0..2 * k).collect();
                let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
                    let (x, y) = (find(parent, a), find(parent, b));
                    if x != y {
                        parent[x] = y;
                    }
                };
                for r in 0..k {
                    for s in r + 1..k {
                        if labels[r] == labels[s] {
                            union(&mut parent, r, s);
                        }
                    }
                    if r > 0 && color(cols, r) == color(cols, r - 1) {
                        union(&mut parent, k + r, k + r - 1);
                    }
                    if color(cols, r) == color(*old, r) {
                        union(&mut parent, r, k + r);
                    }
                }
                let roots: Vec<usize> = (0..2 * k).map(|x| find(&mut parent, x)).collect();
                let mut finished: Vec<u8> = Vec::new();
                for r in 0..k {
                    let lab = labels[r];
                    if (0..r).any(|s| labels[s] == lab) || (k..2 * k).any(|x| roots[x] == roots[r]) {
                        continue;
                    }
                    let c = color(*old, r);
                    let others = (0..k).any(|s| color(*old, s) == c && labels[s] != lab);
                    let later = (0..k).any(|s| color(cols, s) == c);
                    if others || later || closed >> c & 1 == 1 || finished.contains(&c) {
                        continue 'cols;
                    }
                    finished.push(c);
                }
                for c in finished {
                    closed |= 1 << c;
                }
                *next.entry((cols, relabel(&roots[k..]), closed)).or_default() += count;
            }
        }
        states = next;
    }
    Ok(states
        .iter()
        .filter(|((cols, labels, _), _)| {
            (0..2u8).all(|c| {
                let mut seen: Vec<u8> = (0..k).filter(|&r| color(*cols, r) == c).map(|r| labels[r]).collect();
                seen.sort_unstable();
                seen.dedup();
                seen.len() <= 1
            })
        })
        .map(|(_, &n)| n)
        .sum())
}

/// Parses rows of `b`/`r`/`.` characters into a coloring of the graph whose
/// coordinates are `(row, col)`; `.` marks positions without a vertex.
pub fn parse_coloring(g: &Graph, text: &str) -> Result<u128> {
    let coords = g.coords().ok_or_else(|| Error::InvalidGraph("graph has no coordinates".into()))?;
    let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let mut bits = 0u128;
    for (v, &(r, c)) in coords.iter().enumerate() {
        let ch = rows.get(r as usize).and_then(|row| row.as_bytes().get(c as usize)).copied();
        match ch {
            Some(b'r') => bits |= 1 << v,
            Some(b'b') => {}
            _ => return Err(Error::Parse(format!("no color for vertex at ({r}, {c})"))),
        }
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_cross_grid, make_grid, make_path};

    #[test]
    fn single_edge_has_four() {
        let g = make_path(2).unwrap();
        assert_eq!(enumerate_2colorings(&g, 100).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(enumerate_2colorings_filter(&g).unwrap().len(), 4);
        assert_eq!(count_grid_2colorings(1, 2).unwrap(), 4);
    }

    /// On a path both classes are intervals, so one is a prefix and the other
    /// the complementary suffix: `2n` colorings.
    #[test]
    fn paths_match_closed_form() {
        for n in 1..12 {
            let g = make_path(n).unwrap();
            let expected = 2 * n as u128;
            let got = count_grid_2colorings(1, n).unwrap();
            assert_eq!(got, expected, "n={n}");
            assert_eq!(enumerate_2colorings(&g, 1 << 20).unwrap().len() as u128, expected);
        }
    }

    #[test]
    fn three_methods_agree_on_grids() {
        for (k, l) in [(2, 2), (2, 5), (3, 3), (3, 4), (3, 6), (4, 4), (3, 8)] {
            let g = make_grid(k, l).unwrap();
            let filtered = enumerate_2colorings_filter(&g).unwrap();
            assert_eq!(enumerate_2colorings(&g, 1 << 24).unwrap(), filtered, "{k}x{l}");
            assert_eq!(count_grid_2colorings(k, l).unwrap(), filtered.len() as u128, "{k}x{l}");
        }
    }

    #[test]
    fn backtracking_matches_profile_count_to_twelve() {
        for l in 9..=12 {
            let g = make_grid(3, l).unwrap();
            let n = enumerate_2colorings(&g, 1 << 24).unwrap().len() as u128;
            assert_eq!(n, count_grid_2colorings(3, l).unwrap());
        }
    }

    #[test]
    fn enumeration_cap() {
        let g = make_grid(3, 4).unwrap();
        assert!(matches!(enumerate_2colorings(&g, 10), Err(Error::TooLarge(_))));
    }

    #[test]
    fn figure_colorings_are_valid() {
        let strip = make_grid(3, 21).unwrap();
        let nbr = neighbor_masks(&strip).unwrap();
        for block in include_str!("../../fixtures/strip_colorings.txt").split("\n\n") {
            assert!(is_valid_coloring(&nbr, parse_coloring(&strip, block).unwrap()));
        }
        let cross = make_cross_grid(21).unwrap();
        let nbr = neighbor_masks(&cross).unwrap();
        for block in include_str!("../../fixtures/cross_colorings.txt").split("\n\n") {
            assert!(is_valid_coloring(&nbr, parse_coloring(&cross, block).unwrap()));
        }
    }
}
