//! Optimal estimation of an unknown single-mode squeezing parameter.
//!
//! A squeezing `S(r) = exp[r (a^dag^2 - a^2) / 2]` with unknown `r` acts on a
//! known pure probe state. The optimal covariant measurement yields an
//! unbiased estimate whose error density depends only on the spectral
//! density `g(mu)` of the generator `K`:
//!
//! ```text
//! p(t) = | int dmu e^{-i t mu} sqrt(g(mu)) |^2 / 2pi
//! ```
//!
//! The crate computes `g` (by Fourier transform of the characteristic function
//! and, independently, by Mellin transform of the wavefunction), the optimal
//! density, the biased density of the `ln|X|` measurement, homodyne Monte
//! Carlo estimates, expected costs, and photon-number scaling sweeps.

pub mod costs;
pub mod error;
pub mod estimators;
pub mod grid;
pub mod pipeline;
pub mod scaling;
pub mod spectral;
pub mod states;

pub use num_complex::Complex64;

pub use costs::{expected_cost, CostFunction};
pub use error::{Error, Result};
pub use estimators::{
    homodyne_mc, lnx_distribution, optimal_distribution, summarize, Frame, McSummary,
    ShiftDistribution, Summary,
};
pub use grid::UniformGrid;
pub use pipeline::{optimal_for_probe, optimal_for_state, PipelineOptions, Probe};
pub use scaling::{optimal_allocation, rmse_sweep, Allocation, Family, Method, SweepResult};
pub use spectral::{
    spectral_density_from_charfn, spectral_density_via_mellin, SpectralDensity, SpectralOptions,
};
pub use states::{
    apply_squeeze, char_fn_analytic, char_fn_numeric, mean_photon_number, wavefunction,
    GaussianPureState, WavefunctionGrid,
};
