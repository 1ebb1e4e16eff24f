//! Spectral density `g(mu) = <psi|Pi_mu|psi>` of the squeezing generator
//! `K = i(a^dag^2 - a^2)/2`.
//!
//! Two independent routes are provided:
//!
//! * [`spectral_density_from_charfn`] Fourier-transforms the characteristic
//!   function, `g(mu) = (1/2pi) int dl e^{i l mu} chi(l)`, with an FFT on a
//!   truncated uniform `lambda` grid. The `mu` grid is fixed by reciprocity:
//!   spacing `pi / Lambda`, `n_lambda` points centred on zero.
//! * [`spectral_density_via_mellin`] projects the wavefunction on the
//!   generalized eigenvectors `|x|^{i mu - 1/2} theta(s x) / sqrt(2 pi)` of
//!   `K`, one Mellin transform per half-line, evaluated as a Fourier integral
//!   in `u = ln x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{trapezoid, UniformGrid};
use crate::states::WavefunctionGrid;

/// Densities above `-CLAMP_TOL` are clamped to zero; anything lower aborts.
pub const CLAMP_TOL: f64 = 1e-8;
/// Largest tolerated imaginary part of the transformed density.
pub const IMAG_TOL: f64 = 1e-6;
/// Construction fails when `int g` is further than this from one.
pub const NORMALIZATION_TOL: f64 = 1e-3;
/// Values below this are FFT round-off and are zeroed.
pub const NOISE_FLOOR: f64 = 1e-14;
/// Positive values survive only inside runs of at least this many
/// consecutive positives. Round-off far from the support has random sign, so
/// such runs are genuine density; isolated positives are noise that `sqrt(g)`
/// would otherwise amplify.
pub const MIN_RUN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    CharFn,
    Mellin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Fixed truncation half-width; chosen adaptively when `None`.
    pub lambda_halfwidth: Option<f64>,
    /// FFT length, a power of two.
    pub n_lambda: usize,
    /// `|chi|` must be below this at the truncation points.
    pub truncation_tol: f64,
    /// Lower bound on the adaptive half-width. Sets the `mu` resolution and
    /// the period `2 Lambda` of downstream transforms in the estimation error.
    pub min_halfwidth: f64,
    pub max_halfwidth: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            lambda_halfwidth: None,
            n_lambda: 1 << 14,
            truncation_tol: 1e-8,
            min_halfwidth: 24.0,
            max_halfwidth: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeta {
    pub route: Route,
    /// Truncation half-width of the `lambda` integral (char-fn route only).
    pub lambda_halfwidth: Option<f64>,
    pub n_lambda: Option<usize>,
    /// Small negative values set to zero.
    pub clamped: usize,
    /// Round-off level positives set to zero.
    pub floored: usize,
    /// Positives outside runs of [`MIN_RUN`] set to zero.
    pub isolated: usize,
    pub max_imag_residue: f64,
    pub normalization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub mu: UniformGrid,
    pub g: Vec<f64>,
    pub meta: SpectralMeta,
}

impl SpectralDensity {
    pub fn normalization(&self) -> f64 {
        trapezoid(&self.g, self.mu.step())
    }

    /// `int mu g(mu) dmu`, the mean of `K`.
    pub fn first_moment(&self) -> f64 {
        let v: Vec<f64> = self.mu.points().zip(&self.g).map(|(m, g)| m * g).collect();
        trapezoid(&v, self.mu.step())
    }

    /// Index range `[first, last]` of the nonzero densities.
    pub fn support(&self) -> Option<(usize, usize)> {
        let first = self.g.iter().position(|&g| g > 0.0)?;
        let last = self.g.iter().rposition(|&g| g > 0.0)?;
        Some((first, last))
    }

    /// Sup-norm distance to another density on the same grid.
    pub fn sup_distance(&self, other: &SpectralDensity) -> f64 {
        self.g
            .iter()
            .zip(&other.g)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Smallest `Lambda` (on a 0.05 lattice) beyond which `|chi| < tol`, clamped
/// below by `min_halfwidth`.
pub fn adaptive_halfwidth(
    chi: impl Fn(f64) -> Complex64,
    opts: &SpectralOptions,
) -> Result<f64> {
    const STEP: f64 = 0.05;
    let tol = opts.truncation_tol;
    let top = opts.max_halfwidth;
    let at_top = chi(top).norm().max(chi(-top).norm());
    if at_top >= tol {
        return Err(Error::Truncation { lambda: top, value: at_top, tol });
    }
    let steps = (top / STEP).floor() as usize;
    let mut last_big = 0.0;
    for k in (0..=steps).rev() {
        let l = k as f64 * STEP;
        if chi(l).norm().max(chi(-l).norm()) >= tol {
            last_big = l;
            break;
        }
    }
    Ok((last_big + STEP).max(opts.min_halfwidth).min(top))
}

/// `g(mu)` by FFT of `chi` over `[-Lambda, Lambda)`.
pub fn spectral_density_from_charfn(
    chi: impl Fn(f64) -> Complex64,
    opts: &SpectralOptions,
) -> Result<SpectralDensity> {
    let n = opts.n_lambda;
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(format!("n_lambda must be a power of two >= 4, got {n}")));
    }
    let half = match opts.lambda_halfwidth {
        Some(l) => {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("lambda half-width must be positive, got {l}")));
            }
            let edge = chi(l).norm().max(chi(-l).norm());
            if edge >= opts.truncation_tol {
                return Err(Error::Truncation { lambda: l, value: edge, tol: opts.truncation_tol });
            }
            l
        }
        None => adaptive_halfwidth(&chi, opts)?,
    };

    let d_lambda = 2.0 * half / n as f64;
    let d_mu = PI / half;
    // lambda_j = -Lambda + j dl, mu_k = (k - n/2) dmu. The cross terms of
    // e^{i lambda_j mu_k} reduce to (-1)^j and (-1)^k for n divisible by 4.
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let v = chi(-half + j as f64 * d_lambda);
            if j % 2 == 0 { v } else { -v }
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);

    let scale = d_lambda / (2.0 * PI);
    let mu = UniformGrid::new(-(n as f64 / 2.0) * d_mu, (n as f64 / 2.0 - 1.0) * d_mu, n)?;
    let mut max_imag: f64 = 0.0;
    let mut raw = Vec::with_capacity(n);
    for (k, v) in buf.iter().enumerate() {
        let v = if k % 2 == 0 { *v } else { -*v } * scale;
        max_imag = max_imag.max(v.im.abs());
        raw.push(v.re);
    }
    if max_imag >= IMAG_TOL {
        return Err(Error::ImaginaryResidue { residue: max_imag, tol: IMAG_TOL });
    }
    finish(
        mu,
        raw,
        SpectralMeta {
            route: Route::CharFn,
            lambda_halfwidth: Some(half),
            n_lambda: Some(n),
            clamped: 0,
            floored: 0,
            isolated: 0,
            max_imag_residue: max_imag,
            normalization: 0.0,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinOptions {
    /// Bound on the neglected `x -> 0` tail of each amplitude.
    pub tail_tol: f64,
    /// Upper bound on the `u = ln x` step.
    pub max_du: f64,
}

impl Default for MellinOptions {
    fn default() -> Self {
        Self { tail_tol: 1e-13, max_du: 0.01 }
    }
}

/// `g(mu)` on `mu_grid` from the amplitudes on the generalized eigenvectors.
pub fn spectral_density_via_mellin(
    psi: &WavefunctionGrid,
    mu_grid: &UniformGrid,
) -> Result<SpectralDensity> {
    spectral_density_via_mellin_with(psi, mu_grid, &MellinOptions::default())
}

pub fn spectral_density_via_mellin_with(
    psi: &WavefunctionGrid,
    mu_grid: &UniformGrid,
    opts: &MellinOptions,
) -> Result<SpectralDensity> {
    let mu_far = mu_grid.min.abs().max(mu_grid.max.abs());
    let samples = LogSamples::new(psi, mu_far, opts)?;
    let raw: Vec<f64> = mu_grid
        .points()
        .map(|m| {
            let (p, q) = samples.amplitudes(m);
            p.norm_sqr() + q.norm_sqr()
        })
        .collect();

    finish(
        *mu_grid,
        raw,
        SpectralMeta {
            route: Route::Mellin,
            lambda_halfwidth: None,
            n_lambda: None,
            clamped: 0,
            floored: 0,
            isolated: 0,
            max_imag_residue: 0.0,
            normalization: 0.0,
        },
    )
}

/// Per-sign amplitudes `(a_+(mu), a_-(mu))` on the generalized eigenvectors.
pub fn mellin_amplitudes(psi: &WavefunctionGrid, mu: f64) -> Result<(Complex64, Complex64)> {
    Ok(LogSamples::new(psi, mu.abs(), &MellinOptions::default())?.amplitudes(mu))
}

/// `h_s(u) = e^{u/2} psi(s e^u)` on a uniform `u = ln x` grid, trapezoid
/// weights folded in.
struct LogSamples {
    u_min: f64,
    du: f64,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl LogSamples {
    fn new(psi: &WavefunctionGrid, mu_far: f64, opts: &MellinOptions) -> Result<Self> {
        let xg = psi.grid();
        let u_max = xg.min.abs().max(xg.max.abs()).ln();

        // h_s(u) ~ e^{u/2} psi(0) as u -> -inf
        let psi0 = psi.at(0.0).norm().max(f64::MIN_POSITIVE);
        let u_min = (2.0 * (opts.tail_tol / (2.0 * psi0)).ln()).min(u_max - 1.0);
        if u_min < -700.0 || !u_min.is_finite() {
            return Err(Error::LogGridUnderflow { u_min });
        }

        // The trapezoid sum is exact up to aliasing from mu +- 2pi/du, so
        // 2pi/du must clear the mu range plus the bandwidth of g.
        let du = opts.max_du.min(2.0 * PI / (mu_far + generator_bandwidth(psi)));
        let n_u = ((u_max - u_min) / du).ceil() as usize + 1;
        let u = UniformGrid::new(u_min, u_max, n_u)?;

        let mut plus = Vec::with_capacity(n_u);
        let mut minus = Vec::with_capacity(n_u);
        for (j, uj) in u.points().enumerate() {
            let x = uj.exp();
            let w = if j == 0 || j + 1 == n_u { 0.5 } else { 1.0 } * (0.5 * uj).exp();
            plus.push(psi.at(x) * w);
            minus.push(psi.at(-x) * w);
        }
        Ok(Self { u_min, du: u.step(), plus, minus })
    }

    fn amplitudes(&self, mu: f64) -> (Complex64, Complex64) {
        let norm = self.du / (2.0 * PI).sqrt();
        (
            fourier_sum(&self.plus, self.u_min, self.du, mu) * norm,
            fourier_sum(&self.minus, self.u_min, self.du, mu) * norm,
        )
    }
}

/// `sum_j h_j e^{-i mu (u0 + j du)}` with a rotation recurrence, re-seeded
/// every 512 terms.
fn fourier_sum(h: &[Complex64], u0: f64, du: f64, mu: f64) -> Complex64 {
    const RESEED: usize = 512;
    let step = Complex64::from_polar(1.0, -mu * du);
    let mut acc = Complex64::new(0.0, 0.0);
    for (block, chunk) in h.chunks(RESEED).enumerate() {
        let mut rot = Complex64::from_polar(1.0, -mu * (u0 + (block * RESEED) as f64 * du));
        for v in chunk {
            acc += v * rot;
            rot *= step;
        }
    }
    acc
}

/// Generous estimate of the `mu` range over which `g` is non-negligible:
/// `|<K>| + 30 sd(K) + 30`, with `K psi = -i (x psi' + psi / 2)`.
fn generator_bandwidth(psi: &WavefunctionGrid) -> f64 {
    let g = psi.grid();
    let v = psi.values();
    let h = g.step();
    let n = g.n;
    let k_psi: Vec<Complex64> = (0..n)
        .map(|i| {
            let d = if i == 0 {
                (v[1] - v[0]) / h
            } else if i + 1 == n {
                (v[n - 1] - v[n - 2]) / h
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            };
            Complex64::new(0.0, -1.0) * (d * g.point(i) + v[i] * 0.5)
        })
        .collect();
    let mean: Vec<f64> = v.iter().zip(&k_psi).map(|(p, k)| (p.conj() * k).re).collect();
    let sq: Vec<f64> = k_psi.iter().map(|k| k.norm_sqr()).collect();
    let m1 = trapezoid(&mean, h);
    let m2 = trapezoid(&sq, h);
    let sd = (m2 - m1 * m1).max(0.0).sqrt();
    m1.abs() + 30.0 * sd + 30.0
}

fn finish(mu: UniformGrid, mut g: Vec<f64>, mut meta: SpectralMeta) -> Result<SpectralDensity> {
    for (i, v) in g.iter_mut().enumerate() {
        if !v.is_finite() {
            return Err(Error::Aliasing { mu: mu.point(i), value: *v });
        }
        if *v < -CLAMP_TOL {
            return Err(Error::Aliasing { mu: mu.point(i), value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
            meta.clamped += 1;
        } else if *v > 0.0 && *v < NOISE_FLOOR {
            *v = 0.0;
            meta.floored += 1;
        }
    }
    meta.isolated = drop_short_runs(&mut g);
    let integral = trapezoid(&g, mu.step());
    meta.normalization = integral;
    if (integral - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization { integral, tol: NORMALIZATION_TOL });
    }
    Ok(SpectralDensity { mu, g, meta })
}

fn drop_short_runs(g: &mut [f64]) -> usize {
    let mut dropped = 0;
    let mut start = 0;
    while start < g.len() {
        if g[start] == 0.0 {
            start += 1;
            continue;
        }
        let end = start + g[start..].iter().take_while(|&&v| v > 0.0).count();
        if end - start < MIN_RUN {
            g[start..end].iter_mut().for_each(|v| *v = 0.0);
            dropped += end - start;
        }
        start = end;
    }
    dropped
}
