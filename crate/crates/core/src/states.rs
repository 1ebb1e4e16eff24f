//! Pure single-mode states in the quadrature representation and the squeezing
//! characteristic function `chi(lambda) = <psi|S(lambda)|psi>`.
//!
//! The quadrature is `X = (a + a^dag)/2`, so the vacuum has `Var(X) = 1/4`.
//! Squeezing acts on wavefunctions as `psi(x) -> e^{-r/2} psi(e^{-r} x)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cubic_interp, trapezoid, UniformGrid};

/// Relative amplitude a wavefunction must decay to at both grid edges.
pub const BOUNDARY_DECAY: f64 = 1e-10;
/// Trapezoidal norm tolerance for a validated wavefunction.
pub const NORM_TOL: f64 = 1e-8;
/// Norm tolerance after interpolation (`apply_squeeze`).
pub const SQUEEZE_NORM_TOL: f64 = 1e-6;
/// Default number of standard deviations of `X` on each side of the mean.
pub const DEFAULT_SIGMAS: f64 = 10.0;
pub const DEFAULT_X_POINTS: usize = 4096;

/// Displaced squeezed vacuum `D(alpha) S(z) |0>`, squeezed along the fixed
/// direction of `S`. Vacuum, coherent and squeezed vacuum are special cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPureState {
    pub alpha: Complex64,
    pub z: f64,
}

impl GaussianPureState {
    pub fn new(alpha: Complex64, z: f64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidState(format!("alpha must be finite, got {alpha}")));
        }
        if !z.is_finite() {
            return Err(Error::InvalidState(format!("z must be finite, got {z}")));
        }
        let s = Self { alpha, z };
        if !s.mean_photon_number().is_finite() {
            return Err(Error::InvalidState(format!(
                "mean photon number overflows for alpha = {alpha}, z = {z}"
            )));
        }
        Ok(s)
    }

    pub fn vacuum() -> Self {
        Self { alpha: Complex64::new(0.0, 0.0), z: 0.0 }
    }

    pub fn coherent(alpha: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), 0.0)
    }

    pub fn displaced_squeezed(alpha: f64, z: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), z)
    }

    /// `|alpha|^2 + sinh^2 z`.
    pub fn mean_photon_number(&self) -> f64 {
        self.alpha.norm_sqr() + self.z.sinh().powi(2)
    }

    /// Amplitude `beta` with `D(alpha) S(z) = S(z) D(beta)`.
    ///
    /// `beta = alpha cosh z - alpha* sinh z`, i.e. `alpha e^{-z}` for real alpha.
    pub fn effective_amplitude(&self) -> Complex64 {
        Complex64::new(self.alpha.re * (-self.z).exp(), self.alpha.im * self.z.exp())
    }

    /// Mean of `X`.
    pub fn quadrature_mean(&self) -> f64 {
        self.alpha.re
    }

    /// Standard deviation of `X`, `e^z / 2`.
    pub fn quadrature_std(&self) -> f64 {
        0.5 * self.z.exp()
    }

    /// Grid spanning `mean +- n_sigma * std` with `n` points.
    pub fn quadrature_grid(&self, n_sigma: f64, n: usize) -> Result<UniformGrid> {
        UniformGrid::centred(self.quadrature_mean(), n_sigma * self.quadrature_std(), n)
    }

    pub fn default_grid(&self) -> UniformGrid {
        self.quadrature_grid(DEFAULT_SIGMAS, DEFAULT_X_POINTS)
            .expect("finite state gives a finite grid")
    }

    /// Closed-form `psi(x)`.
    pub fn amplitude_at(&self, x: f64) -> Complex64 {
        let beta = self.effective_amplitude();
        let y = (-self.z).exp() * x;
        let d = y - beta.re;
        let phase = 2.0 * beta.im * y - beta.re * beta.im;
        let modulus = (-0.5 * self.z).exp() * (2.0 / PI).powf(0.25) * (-d * d).exp();
        Complex64::from_polar(modulus, phase)
    }
}

/// `|alpha|^2 + sinh^2 z`.
pub fn mean_photon_number(state: &GaussianPureState) -> f64 {
    state.mean_photon_number()
}

/// Sampled quadrature wavefunction on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl WavefunctionGrid {
    /// Validates shape, boundary decay and normalization.
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        Self::checked(grid, values, NORM_TOL, |b| Error::GridTooSmall {
            boundary: b,
            limit: BOUNDARY_DECAY,
        })
    }

    fn checked(
        grid: UniformGrid,
        values: Vec<Complex64>,
        norm_tol: f64,
        edge_err: impl Fn(f64) -> Error,
    ) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidWavefunction(format!(
                "{} samples for a {}-point grid",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidWavefunction("non-finite sample".into()));
        }
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::InvalidWavefunction("wavefunction vanishes".into()));
        }
        let edge = values[0].norm().max(values[grid.n - 1].norm()) / peak;
        if edge >= BOUNDARY_DECAY {
            return Err(edge_err(edge));
        }
        let psi = Self { grid, values };
        let norm = psi.norm();
        if (norm - 1.0).abs() > norm_tol {
            return Err(Error::Normalization { integral: norm, tol: norm_tol });
        }
        Ok(psi)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Trapezoidal `int |psi|^2 dx`.
    pub fn norm(&self) -> f64 {
        let d: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        trapezoid(&d, self.grid.step())
    }

    /// Cubic interpolant, zero off the grid.
    pub fn at(&self, x: f64) -> Complex64 {
        cubic_interp(&self.grid, &self.values, x)
    }

    /// Mean and variance of `X` under `|psi|^2`.
    pub fn quadrature_moments(&self) -> (f64, f64) {
        let h = self.grid.step();
        let dens: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        let norm = trapezoid(&dens, h);
        let m1: Vec<f64> = self.grid.points().zip(&dens).map(|(x, d)| x * d).collect();
        let mean = trapezoid(&m1, h) / norm;
        let m2: Vec<f64> = self
            .grid
            .points()
            .zip(&dens)
            .map(|(x, d)| (x - mean).powi(2) * d)
            .collect();
        (mean, trapezoid(&m2, h) / norm)
    }

    /// L2 distance to another wavefunction sampled on the same grid.
    pub fn l2_distance(&self, other: &WavefunctionGrid) -> f64 {
        let d: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .collect();
        trapezoid(&d, self.grid.step()).sqrt()
    }
}

/// Samples a Gaussian state on `grid`.
///
/// Fails with [`Error::GridTooSmall`] when the wavefunction has not decayed at
/// the grid edges.
pub fn wavefunction(state: &GaussianPureState, grid: &UniformGrid) -> Result<WavefunctionGrid> {
    let values = grid.points().map(|x| state.amplitude_at(x)).collect();
    WavefunctionGrid::new(*grid, values)
}

/// `psi(x) -> e^{-r/2} psi(e^{-r} x)` on the same grid.
pub fn apply_squeeze(psi: &WavefunctionGrid, r: f64) -> Result<WavefunctionGrid> {
    if !r.is_finite() {
        return Err(Error::Domain(format!("squeeze parameter must be finite, got {r}")));
    }
    if r == 0.0 {
        return Ok(psi.clone());
    }
    let scale = (-r).exp();
    let amp = (-0.5 * r).exp();
    let values = psi.grid.points().map(|x| psi.at(scale * x) * amp).collect();
    WavefunctionGrid::checked(psi.grid, values, SQUEEZE_NORM_TOL, |_| {
        Error::SupportOverflow { r }
    })
}

/// Closed-form `chi(lambda)` for a displaced squeezed state.
///
/// For a coherent amplitude `b`,
/// `chi = e^{-|b|^2} (cosh l)^{-1/2} exp(tanh(l) (b*^2 - b^2)/2) exp(|b|^2 / cosh l)`;
/// squeezing commutes with `S(lambda)`, so `b` is the effective amplitude.
pub fn char_fn_analytic(state: &GaussianPureState, lambda: f64) -> Complex64 {
    let b = state.effective_amplitude();
    let n = b.norm_sqr();
    // 1 - sech l, written to keep precision near l = 0
    let one_minus_sech = 2.0 * (0.5 * lambda).sinh().powi(2) / lambda.cosh();
    let cross = 0.5 * lambda.tanh() * (b.conj() * b.conj() - b * b);
    let exponent = cross + Complex64::new(-n * one_minus_sech - 0.5 * ln_cosh(lambda), 0.0);
    exponent.exp()
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Trapezoidal `int psi*(x) e^{-l/2} psi(e^{-l} x) dx`.
///
/// Negative `lambda` uses `chi(-l) = conj chi(l)` so the rescaled argument
/// always lies inside the grid.
pub fn char_fn_numeric(psi: &WavefunctionGrid, lambda: f64) -> Complex64 {
    if lambda < 0.0 {
        return char_fn_numeric(psi, -lambda).conj();
    }
    let scale = (-lambda).exp();
    let amp = (-0.5 * lambda).exp();
    let h = psi.grid.step();
    let n = psi.grid.n;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (x, v)) in psi.grid.points().zip(&psi.values).enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc += v.conj() * psi.at(scale * x) * w;
    }
    acc * (amp * h)
}
