//! Uniform periodic grids and sampled fields.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[x0, x0 + length)` with `n` nodes.
///
/// Node `j` sits at `x0 + j * length / n`; the right endpoint is identified
/// with the left one.  Wavenumbers follow the standard symmetric convention
/// `k_m = 2*pi*m / length` with `m = 0, 1, ..., n/2, -n/2+1, ..., -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid1D {
    n: usize,
    x0: f64,
    length: f64,
    wavenumbers: Vec<f64>,
}

impl PeriodicGrid1D {
    pub fn new(n: usize, x0: f64, length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::GridMismatch(format!(
                "grid size must be even and >= 8, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite() && x0.is_finite()) {
            return Err(Error::GridMismatch(format!(
                "bad grid extent: x0 = {x0}, length = {length}"
            )));
        }
        let base = 2.0 * std::f64::consts::PI / length;
        let half = n / 2;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= half { j as f64 } else { j as f64 - n as f64 };
                base * m
            })
            .collect();
        Ok(Self { n, x0, length, wavenumbers })
    }

    /// Symmetric grid on `[-l, l)`.
    pub fn symmetric(n: usize, l: f64) -> Result<Self> {
        Self::new(n, -l, 2.0 * l)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + self.length * j as f64 / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Index of the Nyquist mode (`m = n/2`).
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }
}

/// Real-valued samples on a [`PeriodicGrid1D`].
#[derive(Debug, Clone)]
pub struct Field1D {
    pub grid: Arc<PeriodicGrid1D>,
    pub values: Vec<f64>,
}

impl Field1D {
    pub fn new(grid: Arc<PeriodicGrid1D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "field has {} samples, grid has {} nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<PeriodicGrid1D>) -> Self {
        let n = grid.n();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn from_fn(grid: Arc<PeriodicGrid1D>, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation with periodic wrap.
    pub fn interp(&self, x: f64) -> f64 {
        let g = &self.grid;
        let s = (x - g.x0()) / g.dx();
        let n = g.n() as isize;
        let i0 = s.floor() as isize;
        let frac = s - s.floor();
        let ia = i0.rem_euclid(n) as usize;
        let ib = (i0 + 1).rem_euclid(n) as usize;
        self.values[ia] * (1.0 - frac) + self.values[ib] * frac
    }
}
