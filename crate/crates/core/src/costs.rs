//! Expected costs for cost functions of the form `c(t) = int_0^inf a(mu) cos(mu t) dmu`
//! with `a(mu) <= 0` for `mu > 0`.
//!
//! Covariant strategies have an expected cost independent of the true value,
//! so the worst case over true values is a single evaluation in the error frame.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Frame, ShiftDistribution};
use crate::grid::{trapezoid, UniformGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CostFunction {
    /// `c(t) = -delta(t)`.
    MaxLikelihood,
    /// `c(t) = 1 - |<psi|S(t)|psi>|^2`.
    Fidelity,
    /// Sampled coefficients `a(mu)` on a `mu` grid.
    HolevoTable { mu: UniformGrid, a: Vec<f64> },
}

impl CostFunction {
    pub fn holevo_table(mu: UniformGrid, a: Vec<f64>) -> Result<Self> {
        if a.len() != mu.n {
            return Err(Error::Cost(format!("{} coefficients for {} nodes", a.len(), mu.n)));
        }
        for (m, &v) in mu.points().zip(&a) {
            if !v.is_finite() {
                return Err(Error::Cost(format!("non-finite coefficient at mu = {m}")));
            }
            if m > 0.0 && v > 0.0 {
                return Err(Error::Cost(format!("a(mu) = {v} > 0 at mu = {m}")));
            }
        }
        Ok(Self::HolevoTable { mu, a })
    }

    /// `c(t)` of a coefficient table by trapezoid over `mu`.
    fn table_value(mu: &UniformGrid, a: &[f64], t: f64) -> f64 {
        let v: Vec<f64> = mu.points().zip(a).map(|(m, a)| a * (m * t).cos()).collect();
        trapezoid(&v, mu.step())
    }
}

/// Expected cost of an error-frame distribution.
///
/// `chi` is the characteristic function of the probe state; only the fidelity
/// cost needs it.
pub fn expected_cost(
    dist: &ShiftDistribution,
    cost: &CostFunction,
    chi: Option<&dyn Fn(f64) -> Complex64>,
) -> Result<f64> {
    if dist.frame != Frame::Error {
        return Err(Error::Frame);
    }
    let h = dist.grid.step();
    match cost {
        CostFunction::MaxLikelihood => Ok(-dist.density_at_truth()),
        CostFunction::Fidelity => {
            let chi = chi.ok_or_else(|| {
                Error::Cost("fidelity cost needs the characteristic function".into())
            })?;
            let v: Vec<f64> = dist
                .grid
                .points()
                .zip(&dist.p)
                .map(|(t, p)| p * (1.0 - chi(t).norm_sqr()))
                .collect();
            Ok(trapezoid(&v, h))
        }
        CostFunction::HolevoTable { mu, a } => {
            // re-validate: the variant fields are public
            CostFunction::holevo_table(*mu, a.clone())?;
            let v: Vec<f64> = dist
                .grid
                .points()
                .zip(&dist.p)
                .map(|(t, p)| p * CostFunction::table_value(mu, a, t))
                .collect();
            Ok(trapezoid(&v, h))
        }
    }
}
