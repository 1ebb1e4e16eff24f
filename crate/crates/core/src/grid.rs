//! Uniform sampling grids, trapezoidal quadrature and cubic interpolation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` equally spaced nodes covering `[min, max]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite, got [{min}, {max}]"
            )));
        }
        if min >= max {
            return Err(Error::InvalidGrid(format!(
                "need min < max, got [{min}, {max}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        Ok(Self { min, max, n })
    }

    /// Grid centred on `centre` with the given half-width.
    pub fn centred(centre: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::new(centre - half_width, centre + half_width, n)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let f = ((x - self.min) / self.step()).round();
        if f <= 0.0 {
            0
        } else {
            (f as usize).min(self.n - 1)
        }
    }

    /// Same spacing, shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            min: self.min + offset,
            max: self.max + offset,
            n: self.n,
        }
    }

    /// Contiguous sub-grid `[first, last]` (inclusive node indices).
    pub fn slice(&self, first: usize, last: usize) -> Result<Self> {
        if last >= self.n || first >= last {
            return Err(Error::InvalidGrid(format!(
                "bad sub-range {first}..={last} of {} nodes",
                self.n
            )));
        }
        Ok(Self {
            min: self.point(first),
            max: self.point(last),
            n: last - first + 1,
        })
    }
}

/// Trapezoidal rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Complex trapezoidal rule on uniformly spaced samples.
pub fn trapezoid_c(values: &[Complex64], step: f64) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let inner: Complex64 = values[1..n - 1].iter().sum();
            (inner + 0.5 * (values[0] + values[n - 1])) * step
        }
    }
}

/// Four-point Lagrange (cubic) interpolation of samples on `grid`.
///
/// Outside `[grid.min, grid.max]` the sampled function is taken to vanish.
pub fn cubic_interp(grid: &UniformGrid, values: &[Complex64], x: f64) -> Complex64 {
    debug_assert_eq!(grid.n, values.len());
    if !grid.contains(x) {
        return Complex64::new(0.0, 0.0);
    }
    let n = grid.n;
    if n < 4 {
        // linear fallback
        let s = (x - grid.min) / grid.step();
        let i = (s.floor() as usize).min(n - 2);
        let f = s - i as f64;
        return values[i] * (1.0 - f) + values[i + 1] * f;
    }
    let s = (x - grid.min) / grid.step();
    let i = (s.floor() as usize).min(n - 2);
    // stencil i-1..=i+2, shifted inwards at the edges
    let start = i.saturating_sub(1).min(n - 4);
    let f = s - start as f64;
    let (f0, f1, f2, f3) = (f, f - 1.0, f - 2.0, f - 3.0);
    let w0 = -f1 * f2 * f3 / 6.0;
    let w1 = f0 * f2 * f3 / 2.0;
    let w2 = -f0 * f1 * f3 / 2.0;
    let w3 = f0 * f1 * f2 / 6.0;
    values[start] * w0 + values[start + 1] * w1 + values[start + 2] * w2 + values[start + 3] * w3
}
