//! End-to-end construction of the optimal distribution for a probe state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimators::{default_error_window, optimal_distribution, ShiftDistribution};
use crate::grid::UniformGrid;
use crate::spectral::{spectral_density_from_charfn, SpectralDensity, SpectralOptions};
use crate::states::{char_fn_analytic, char_fn_numeric, GaussianPureState, WavefunctionGrid};

/// Probe state in either representation.
#[derive(Debug, Clone)]
pub enum Probe {
    Gaussian(GaussianPureState),
    Grid(WavefunctionGrid),
}

impl Probe {
    pub fn char_fn(&self, lambda: f64) -> Complex64 {
        match self {
            Probe::Gaussian(s) => char_fn_analytic(s, lambda),
            Probe::Grid(psi) => char_fn_numeric(psi, lambda),
        }
    }

    /// `|alpha'|` when known in closed form.
    pub fn effective_amplitude(&self) -> Option<f64> {
        match self {
            Probe::Gaussian(s) => Some(s.effective_amplitude().norm()),
            Probe::Grid(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub spectral: SpectralOptions,
    /// Overrides the state-dependent error window half-width.
    pub t_halfwidth: Option<f64>,
    pub t_points: Option<usize>,
}

impl PipelineOptions {
    /// Error window and spectral options resolved for `probe`.
    ///
    /// The `lambda` half-width is kept at least three times the window
    /// half-width, since the transform back to `t` has period `2 Lambda`.
    pub fn resolve(&self, probe: &Probe) -> Result<(UniformGrid, SpectralOptions)> {
        let default = default_error_window(probe.effective_amplitude());
        let half = self.t_halfwidth.unwrap_or(default.max);
        let n = self.t_points.unwrap_or(default.n);
        let window = UniformGrid::centred(0.0, half, n)?;
        let mut spectral = self.spectral;
        spectral.min_halfwidth = (3.0 * half).min(spectral.max_halfwidth);
        Ok((window, spectral))
    }
}

/// `chi -> g -> p` with resolved defaults.
pub fn optimal_for_probe(
    probe: &Probe,
    opts: &PipelineOptions,
) -> Result<(SpectralDensity, ShiftDistribution)> {
    let (window, spectral) = opts.resolve(probe)?;
    let g = spectral_density_from_charfn(|l| probe.char_fn(l), &spectral)?;
    let dist = optimal_distribution(&g, &window)?;
    Ok((g, dist))
}

pub fn optimal_for_state(
    state: &GaussianPureState,
    opts: &PipelineOptions,
) -> Result<(SpectralDensity, ShiftDistribution)> {
    optimal_for_probe(&Probe::Gaussian(*state), opts)
}
