//! Distributions of the squeezing estimate under three strategies: the optimal
//! covariant measurement, the `ln|X|` measurement, and homodyne sampling with
//! the plug-in estimate `ln|x / alpha|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{trapezoid, UniformGrid};
use crate::spectral::SpectralDensity;
use crate::states::{apply_squeeze, GaussianPureState, WavefunctionGrid};

/// Minimum probability a distribution window must capture.
pub const MIN_CAPTURED: f64 = 1.0 - 1e-3;
pub const DEFAULT_T_HALFWIDTH: f64 = 8.0;
/// Odd, so that `t = 0` is a node of the default error window.
pub const DEFAULT_T_POINTS: usize = 8193;
/// Effective amplitude from which the error window narrows with the state.
pub const NARROW_WINDOW_AMPLITUDE: f64 = 4.0;
/// Half-width of the narrowed window in units of `1 / (2 |alpha'|)`.
pub const NARROW_WINDOW_WIDTHS: f64 = 12.0;
/// Depth of the `ln|X|` window below the true value.
pub const LNX_DEPTH: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "frame", rename_all = "kebab-case")]
pub enum Frame {
    /// Variable is the estimation error `t = r_hat - r`.
    Error,
    /// Variable is the estimate `r_hat` itself.
    Absolute { r_true: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub mode: f64,
    /// Root mean square error about the true value.
    pub rmse: f64,
    /// Probability inside the window.
    pub captured: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftDistribution {
    pub grid: UniformGrid,
    pub p: Vec<f64>,
    pub frame: Frame,
    pub summary: Summary,
}

impl ShiftDistribution {
    /// Validates nonnegativity and captured probability, then summarizes.
    pub fn new(grid: UniformGrid, p: Vec<f64>, frame: Frame) -> Result<Self> {
        if p.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "{} densities for a {}-point grid",
                p.len(),
                grid.n
            )));
        }
        if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!("density must be finite and nonnegative, got {bad}")));
        }
        let captured = trapezoid(&p, grid.step());
        if captured < MIN_CAPTURED {
            return Err(Error::Window { captured, required: MIN_CAPTURED });
        }
        let mut dist = Self {
            grid,
            p,
            frame,
            summary: Summary { mean: 0.0, mode: 0.0, rmse: 0.0, captured },
        };
        dist.summary = summarize(&dist);
        Ok(dist)
    }

    /// The true value the estimates scatter around.
    pub fn reference(&self) -> f64 {
        match self.frame {
            Frame::Error => 0.0,
            Frame::Absolute { r_true } => r_true,
        }
    }

    /// Re-expresses an absolute-frame distribution in `t = r_hat - r_true`.
    pub fn to_error_frame(&self) -> Self {
        match self.frame {
            Frame::Error => self.clone(),
            Frame::Absolute { r_true } => {
                let mut d = Self {
                    grid: self.grid.shifted(-r_true),
                    p: self.p.clone(),
                    frame: Frame::Error,
                    summary: self.summary,
                };
                d.summary = summarize(&d);
                d
            }
        }
    }

    /// Re-expresses an error-frame distribution as a density over `r_hat`.
    pub fn to_absolute_frame(&self, r_true: f64) -> Self {
        let base = self.to_error_frame();
        let mut d = Self {
            grid: base.grid.shifted(r_true),
            p: base.p,
            frame: Frame::Absolute { r_true },
            summary: base.summary,
        };
        d.summary = summarize(&d);
        d
    }

    /// Density at the node nearest to the true value; zero outside the window.
    pub fn density_at_truth(&self) -> f64 {
        let r = self.reference();
        if self.grid.contains(r) {
            self.p[self.grid.nearest_index(r)]
        } else {
            0.0
        }
    }

    /// `max_t |p(t) - p(-t)|` about the true value, on a symmetric grid.
    pub fn asymmetry(&self) -> f64 {
        let n = self.p.len();
        (0..n / 2)
            .map(|i| (self.p[i] - self.p[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Trapezoidal mean and RMSE (normalized to the captured probability) and the
/// grid argmax, with ties going to the node closest to the true value.
pub fn summarize(dist: &ShiftDistribution) -> Summary {
    let h = dist.grid.step();
    let reference = dist.reference();
    let captured = trapezoid(&dist.p, h);
    let first: Vec<f64> = dist.grid.points().zip(&dist.p).map(|(t, p)| t * p).collect();
    let second: Vec<f64> = dist
        .grid
        .points()
        .zip(&dist.p)
        .map(|(t, p)| (t - reference).powi(2) * p)
        .collect();
    let mut mode_idx = 0;
    for (i, (&p, t)) in dist.p.iter().zip(dist.grid.points()).enumerate() {
        let best = dist.p[mode_idx];
        let best_t = dist.grid.point(mode_idx);
        if p > best || (p == best && (t - reference).abs() < (best_t - reference).abs()) {
            mode_idx = i;
        }
    }
    Summary {
        mean: trapezoid(&first, h) / captured,
        mode: dist.grid.point(mode_idx),
        rmse: (trapezoid(&second, h) / captured).sqrt(),
        captured,
    }
}

/// Error window for the optimal distribution: `[-8, 8]`, or
/// `+- 12 / (2 |alpha'|)` once `|alpha'| >= 4`.
pub fn default_error_window(effective_amplitude: Option<f64>) -> UniformGrid {
    let half = match effective_amplitude {
        Some(a) if a.abs() >= NARROW_WINDOW_AMPLITUDE => NARROW_WINDOW_WIDTHS / (2.0 * a.abs()),
        _ => DEFAULT_T_HALFWIDTH,
    };
    UniformGrid::centred(0.0, half, DEFAULT_T_POINTS).expect("positive half-width")
}

/// Absolute-frame window for the `ln|X|` estimate: `r_true` plus
/// `[-20, ln x_far + 0.5]`, where `x_far` is the farthest point of the
/// unsqueezed grid. The window moves rigidly with `r_true`.
pub fn default_lnx_window(psi: &WavefunctionGrid, r_true: f64) -> Result<UniformGrid> {
    let g = psi.grid();
    let top = g.min.abs().max(g.max.abs()).ln() + 0.5;
    UniformGrid::new(r_true - LNX_DEPTH, r_true + top.max(1.0 - LNX_DEPTH), DEFAULT_T_POINTS)
}

/// `p(t) = |int dmu e^{-i t mu} sqrt(g(mu))|^2 / 2pi` on `t_grid`.
pub fn optimal_distribution(g: &SpectralDensity, t_grid: &UniformGrid) -> Result<ShiftDistribution> {
    let (first, last) = g
        .support()
        .ok_or_else(|| Error::Domain("spectral density vanishes".into()))?;
    let d_mu = g.mu.step();
    let mu0 = g.mu.point(first);
    let amp: Vec<f64> = g.g[first..=last].iter().map(|v| v.sqrt()).collect();
    let p = t_grid
        .points()
        .map(|t| {
            // rotation recurrence, re-seeded every 512 terms
            let step = Complex64::from_polar(1.0, -t * d_mu);
            let mut acc = Complex64::new(0.0, 0.0);
            for (block, chunk) in amp.chunks(512).enumerate() {
                let mut rot = Complex64::from_polar(1.0, -t * (mu0 + (block * 512) as f64 * d_mu));
                for &a in chunk {
                    acc += rot * a;
                    rot *= step;
                }
            }
            (acc * d_mu).norm_sqr() / (2.0 * PI)
        })
        .collect();
    ShiftDistribution::new(*t_grid, p, Frame::Error)
}

/// Density of `r_hat = ln|X|` after squeezing by `r_true`:
/// `e^{r_hat} (|phi(e^{r_hat})|^2 + |phi(-e^{r_hat})|^2)`, absolute frame.
pub fn lnx_distribution(
    psi: &WavefunctionGrid,
    r_true: f64,
    rhat_grid: &UniformGrid,
) -> Result<ShiftDistribution> {
    let phi = apply_squeeze(psi, r_true)?;
    let p = rhat_grid
        .points()
        .map(|r| {
            let x = r.exp();
            x * (phi.at(x).norm_sqr() + phi.at(-x).norm_sqr())
        })
        .collect();
    ShiftDistribution::new(*rhat_grid, p, Frame::Absolute { r_true })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n_samples: usize,
    pub seed: u64,
    pub stream: u64,
    pub r_true: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub rmse: f64,
}

/// Homodyne sampling of `X` on `S(r_true)|alpha, z>` with `r_hat = ln|x / Re alpha|`.
pub fn homodyne_mc(
    state: &GaussianPureState,
    r_true: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McSummary> {
    homodyne_mc_stream(state, r_true, n_samples, seed, 0)
}

/// As [`homodyne_mc`], drawing from ChaCha stream `stream` of `seed`.
pub fn homodyne_mc_stream(
    state: &GaussianPureState,
    r_true: f64,
    n_samples: usize,
    seed: u64,
    stream: u64,
) -> Result<McSummary> {
    if state.alpha.re == 0.0 {
        return Err(Error::InvalidState(
            "homodyne estimate ln|x/alpha| needs Re(alpha) != 0".into(),
        ));
    }
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if !r_true.is_finite() {
        return Err(Error::Domain(format!("r_true must be finite, got {r_true}")));
    }
    let mean = state.alpha.re * r_true.exp();
    let sd = 0.5 * (r_true + state.z).exp();
    let normal = Normal::new(mean, sd)
        .map_err(|e| Error::InvalidState(format!("quadrature distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let scale = state.alpha.re.abs();
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n_samples {
        let x: f64 = normal.sample(&mut rng);
        let err = (x.abs() / scale).ln() - r_true;
        s1 += err;
        s2 += err * err;
    }
    let n = n_samples as f64;
    Ok(McSummary {
        n_samples,
        seed,
        stream,
        r_true,
        mean_estimate: r_true + s1 / n,
        bias: s1 / n,
        rmse: (s2 / n).sqrt(),
    })
}
