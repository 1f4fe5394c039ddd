//! Truncated computational domains.
//!
//! The line is truncated to `(-L, L)` with homogeneous Dirichlet ends; only
//! interior nodes are stored, the zero boundary values are implicit.  The
//! strip `R x (-1, 1)` uses a tensor product of a line grid with an interior
//! Dirichlet grid in the cross direction, ordered x-major.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform interior grid on `(-L, L)` with Dirichlet truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    half_width: f64,
    point_count: usize,
}

impl Grid1D {
    pub fn new(half_width: f64, point_count: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::validation(format!(
                "grid half-width must be positive and finite, got {half_width}"
            )));
        }
        if point_count < 3 {
            return Err(Error::validation(format!(
                "grid needs at least 3 interior nodes, got {point_count}"
            )));
        }
        Ok(Grid1D {
            half_width,
            point_count,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.point_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing `h = 2L/(N+1)`; the N interior nodes split `(-L, L)` into N+1 cells.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.point_count as f64 + 1.0)
    }

    /// i-th interior node, `x_i = -L + (i+1) h` for `i = 0..N`.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.point_count);
        -self.half_width + (i as f64 + 1.0) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.point_count).map(|i| self.node(i)).collect()
    }
}

/// Equivalent to `Grid1D::new`.
pub fn build_grid(half_width: f64, point_count: usize) -> Result<Grid1D> {
    Grid1D::new(half_width, point_count)
}

/// Tensor grid on the strip `(-Lx, Lx) x (-1, 1)`, Dirichlet on all sides.
///
/// Unknowns are ordered x-major: index `i * m + j` holds node `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    pub x: Grid1D,
    transverse_count: usize,
}

impl StripGrid {
    pub fn new(x: Grid1D, transverse_count: usize) -> Result<Self> {
        if transverse_count < 3 {
            return Err(Error::validation(format!(
                "strip grid needs at least 3 transverse nodes, got {transverse_count}"
            )));
        }
        Ok(StripGrid {
            x,
            transverse_count,
        })
    }

    pub fn transverse_count(&self) -> usize {
        self.transverse_count
    }

    /// Transverse spacing over `(-1, 1)`.
    pub fn transverse_spacing(&self) -> f64 {
        2.0 / (self.transverse_count as f64 + 1.0)
    }

    pub fn transverse_node(&self, j: usize) -> f64 {
        -1.0 + (j as f64 + 1.0) * self.transverse_spacing()
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.transverse_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
