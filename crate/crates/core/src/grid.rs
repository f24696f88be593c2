//! Uniform tensor-product grids.
//!
//! The first and last node of every axis are hard-wall nodes: fields vanish
//! there, so the trapezoidal measure reduces to a plain sum over the interior
//! nodes times the cell area.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// A point or direction in the plane, in nm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.x, self.y)
    }
}

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::config(
                "n_points",
                format!("need at least {MIN_POINTS} points, got {n_points}"),
            ));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::config(
                "x_max",
                format!("need x_max > x_min, got [{x_min}, {x_max}]"),
            ));
        }
        Ok(Grid1D { n_points, x_min, x_max })
    }

    /// Grid with `n_points` nodes and the given spacing, starting at `x_min`.
    pub fn with_spacing(n_points: usize, x_min: f64, spacing: f64) -> Result<Self> {
        Grid1D::new(n_points, x_min, x_min + spacing * (n_points - 1) as f64)
    }

    /// Grid centred on zero with the given spacing and `2·half + 1` nodes.
    pub fn symmetric(half: usize, spacing: f64) -> Result<Self> {
        let extent = spacing * half as f64;
        Grid1D::new(2 * half + 1, -extent, extent)
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn extent(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_min + self.x_max)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.coordinate(i)).collect()
    }

    /// Position in units of the spacing, measured from `x_min`.
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.x_min) / self.spacing()
    }

    /// Nearest node, or `None` outside `[x_min, x_max]` (half a cell of slack).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let f = self.fractional_index(x).round();
        if f < 0.0 || f > (self.n_points - 1) as f64 {
            None
        } else {
            Some(f as usize)
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-9 * self.spacing();
        x >= self.x_min - tol && x <= self.x_max + tol
    }

    /// Number of interior (non-wall) nodes.
    pub fn interior_len(&self) -> usize {
        self.n_points - 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Grid2D { x, y }
    }

    pub fn square(n: usize, min: f64, max: f64) -> Result<Self> {
        let axis = Grid1D::new(n, min, max)?;
        Ok(Grid2D { x: axis, y: axis })
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn cell_area(&self) -> f64 {
        self.x.spacing() * self.y.spacing()
    }

    pub fn point(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.x.coordinate(i), self.y.coordinate(j))
    }

    /// Row-major flat index, x slowest.
    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.y.len() + j
    }

    pub fn unflat(&self, k: usize) -> (usize, usize) {
        (k / self.y.len(), k % self.y.len())
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.x.contains(p.x) && self.y.contains(p.y)
    }

    pub fn min_spacing(&self) -> f64 {
        self.x.spacing().min(self.y.spacing())
    }

    pub fn max_spacing(&self) -> f64 {
        self.x.spacing().max(self.y.spacing())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_axes() {
        assert!(Grid1D::new(7, 0.0, 1.0).is_err());
        assert!(Grid1D::new(16, 1.0, 1.0).is_err());
        assert!(Grid1D::new(16, 2.0, 1.0).is_err());
        assert!(Grid1D::new(16, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn index_coordinate_round_trip() {
        let g = Grid1D::new(513, -500.0, 500.0).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index_of(g.coordinate(i)), Some(i));
        }
        assert_eq!(g.coordinate(0), -500.0);
        assert_eq!(g.index_of(-501.0), None);
        assert_eq!(g.index_of(501.0), None);
    }

    #[test]
    fn flat_indexing_round_trips() {
        let g = Grid2D::new(Grid1D::new(9, 0.0, 1.0).unwrap(), Grid1D::new(11, 0.0, 2.0).unwrap());
        for k in 0..g.len() {
            let (i, j) = g.unflat(k);
            assert_eq!(g.flat(i, j), k);
        }
    }
}
