//! Box-drawing pictures of periodic tilings.
//!
//! Cells sit at odd lines and odd character columns. The character between
//! two neighbouring cells is a wall when it is `|` or `-`; anything else is
//! open. Cell contents are ignored, so classes are read off the walls alone.
//!
//! A rectangular window of the picture is taken as a fundamental domain and
//! repeated over a torus. The walls on the window's right and bottom edges
//! come from the picture, so the picture must extend one cell past the window
//! in both directions.

use crate::error::{Error, Result};
use crate::graph::{make_torus, Graph};
use crate::partition::Partition;
use serde::Serialize;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn is_wall(ch: u8) -> bool {
    ch == b'|' || ch == b'-'
}

/// Which part of the picture to repeat, and how often.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TilingWindow {
    /// Picture cell at the window's top left corner.
    pub origin: (usize, usize),
    /// Window size in cells.
    pub period: (usize, usize),
    /// Copies of the window along each torus direction.
    pub copies: (usize, usize),
}

/// Reads a tiling onto the torus of `period * copies` cells (vertex
/// `r * cols + c`). Slots are numbered by smallest vertex and `q` equals the
/// number of classes.
pub fn parse_torus_tiling(text: &str, w: &TilingWindow) -> Result<(Graph, Partition)> {
    let ((r0, c0), (pr, pc), (kr, kc)) = (w.origin, w.period, w.copies);
    if pr == 0 || pc == 0 || kr == 0 || kc == 0 {
        return Err(Error::InvalidParams("empty tiling window".into()));
    }
    let lines: Vec<&[u8]> = text.lines().map(str::as_bytes).collect();
    let at = |line: usize, col: usize| -> Result<u8> {
        lines
            .get(line)
            .and_then(|l| l.get(col))
            .copied()
            .ok_or_else(|| Error::Parse(format!("picture has no character at line {line}, column {col}")))
    };
    let (rows, cols) = (pr * kr, pc * kc);
    let g = make_torus(rows, cols)?;
    let mut uf = UnionFind((0..rows * cols).collect());
    for r in 0..rows {
        for c in 0..cols {
            let (line, col) = (2 * (r0 + r % pr) + 1, 2 * (c0 + c % pc) + 1);
            let v = r * cols + c;
            if !is_wall(at(line, col + 1)?) {
                uf.union(v, r * cols + (c + 1) % cols);
            }
            if !is_wall(at(line + 1, col)?) {
                uf.union(v, ((r + 1) % rows) * cols + c);
            }
        }
    }
    let mut slot_of_root = vec![usize::MAX; rows * cols];
    let mut assignment = Vec::with_capacity(rows * cols);
    let mut next = 0;
    for v in 0..rows * cols {
        let root = uf.find(v);
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = next;
            next += 1;
        }
        assignment.push(slot_of_root[root]);
    }
    let p = Partition::from_assignment(assignment, next)?;
    Ok((g, p))
}
