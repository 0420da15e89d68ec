//! Lattice geometry: coordinates, the Manhattan metric, and local moves.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

/// Parameters of one grid family G(n, r, p, q): an n-by-n lattice where every
/// node reaches all nodes within Manhattan distance `p` plus `q` long-range
/// contacts drawn with probability proportional to distance^(-r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    /// Side length of the lattice (>= 2).
    pub n: u32,
    /// Long-range contact exponent (>= 0).
    pub r: f64,
    /// Local neighborhood radius (>= 1, < n).
    pub p: u32,
    /// Long-range contacts per node (>= 1).
    pub q: u32,
}

impl GridParams {
    pub fn new(n: u32, r: f64, p: u32, q: u32) -> Result<Self> {
        let params = GridParams { n, r, p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n", "side length must be at least 2"));
        }
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::invalid("r", "exponent must be a finite value >= 0"));
        }
        if self.p < 1 {
            return Err(Error::invalid("p", "local radius must be at least 1"));
        }
        if self.p >= self.n {
            return Err(Error::invalid("p", "local radius must be smaller than n"));
        }
        if self.q < 1 {
            return Err(Error::invalid("q", "must draw at least one contact per node"));
        }
        Ok(())
    }

    /// Largest Manhattan distance between two grid nodes: 2(n-1).
    pub fn diameter(&self) -> u64 {
        2 * (self.n as u64 - 1)
    }

    pub fn node_count(&self) -> u64 {
        (self.n as u64) * (self.n as u64)
    }
}

/// An absolute lattice position. Values asserted to lie in an n-by-n grid
/// satisfy 0 <= x < n and 0 <= y < n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

impl Coord {
    pub fn new(x: i64, y: i64) -> Self {
        Coord { x, y }
    }

    pub fn in_grid(self, n: u32) -> bool {
        let n = n as i64;
        (0..n).contains(&self.x) && (0..n).contains(&self.y)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A relative displacement toward a long-range contact. Offsets produced by
/// the sampler have |dx| + |dy| equal to the drawn radius (never zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Offset {
    pub dx: i64,
    pub dy: i64,
}

impl Offset {
    /// L1 norm of the displacement.
    pub fn radius(self) -> u64 {
        self.dx.unsigned_abs() + self.dy.unsigned_abs()
    }
}

impl Add<Offset> for Coord {
    type Output = Coord;

    fn add(self, off: Offset) -> Coord {
        Coord::new(self.x + off.dx, self.y + off.dy)
    }
}

/// Manhattan distance |a.x - b.x| + |a.y - b.y|.
pub fn manhattan(a: Coord, b: Coord) -> u64 {
    a.x.abs_diff(b.x) + a.y.abs_diff(b.y)
}

/// One greedy local move of radius `p` from `current` toward `target`.
///
/// The x gap is consumed first, then the remainder of the budget goes to y,
/// so the distance to `target` drops by exactly min(p, d). When the target is
/// already within the local radius it is itself a local neighbor and the move
/// lands on it.
pub fn local_step(current: Coord, target: Coord, p: u32) -> Coord {
    let dist = manhattan(current, target);
    if dist <= p as u64 {
        return target;
    }
    let step_x = (p as i64).min((target.x - current.x).abs());
    let step_y = p as i64 - step_x;
    Coord::new(
        current.x + step_x * (target.x - current.x).signum(),
        current.y + step_y * (target.y - current.y).signum(),
    )
}

/// Number of neighbors of an interior node: 2p(p+1) local plus q long-range.
pub fn neighborhood_size(p: u32, q: u32) -> u64 {
    let p = p as u64;
    2 * p * (p + 1) + q as u64
}
