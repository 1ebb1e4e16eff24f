//! Error scaling with mean photon number: `1/(2 sqrt(n))` for coherent probes,
//! `1/(2 n)` for displaced squeezed probes with the optimal energy split.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::homodyne_mc_stream;
use crate::pipeline::{optimal_for_state, PipelineOptions};
use crate::states::GaussianPureState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub state: GaussianPureState,
    pub nominal_nbar: f64,
    /// `|alpha|^2 + sinh^2 z` of the allocated state; equals the nominal value
    /// only asymptotically.
    pub exact_nbar: f64,
}

impl Allocation {
    /// `alpha e^{-z}`, which equals the nominal photon number.
    pub fn effective_amplitude(&self) -> f64 {
        self.state.effective_amplitude().re
    }
}

/// `alpha = sqrt(n/2)`, `z = -ln(2n)/2`.
pub fn optimal_allocation(nbar: f64) -> Result<Allocation> {
    if !(nbar.is_finite() && nbar >= 0.5) {
        return Err(Error::Domain(format!("allocation needs nbar >= 1/2, got {nbar}")));
    }
    let state = GaussianPureState::displaced_squeezed((nbar / 2.0).sqrt(), -0.5 * (2.0 * nbar).ln())?;
    Ok(Allocation { state, nominal_nbar: nbar, exact_nbar: state.mean_photon_number() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Coherent,
    DisplacedSqueezedOptimal,
}

impl Family {
    pub fn state(self, nbar: f64) -> Result<GaussianPureState> {
        match self {
            Family::Coherent => GaussianPureState::coherent(nbar.sqrt()),
            Family::DisplacedSqueezedOptimal => Ok(optimal_allocation(nbar)?.state),
        }
    }

    fn min_nbar(self) -> f64 {
        match self {
            Family::Coherent => 1.0,
            Family::DisplacedSqueezedOptimal => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    OptimalPovm,
    HomodyneMc { n_samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub nominal_nbar: f64,
    pub exact_nbar: f64,
    pub alpha: f64,
    pub z: f64,
    pub rmse: f64,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    /// Fit of `ln rmse = intercept + slope * ln nbar`.
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
    /// Nominal photon numbers dropped as pre-asymptotic outliers.
    pub excluded: Vec<f64>,
}

impl LogLogFit {
    /// `e^intercept`, the rmse prefactor.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: Family,
    pub method: Method,
    pub points: Vec<SweepPoint>,
    pub fit: LogLogFit,
}

pub fn rmse_sweep(
    family: Family,
    nbars: &[f64],
    method: Method,
    opts: &PipelineOptions,
) -> Result<SweepResult> {
    if nbars.len() < 2 {
        return Err(Error::Domain("sweep needs at least two photon numbers".into()));
    }
    if nbars.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::Domain("photon numbers must be strictly ascending".into()));
    }
    if let Some(&bad) = nbars.iter().find(|&&n| !(n.is_finite() && n >= family.min_nbar())) {
        return Err(Error::Domain(format!(
            "nbar = {bad} below the {} minimum for this family",
            family.min_nbar()
        )));
    }

    let mut points = Vec::with_capacity(nbars.len());
    for (i, &nbar) in nbars.iter().enumerate() {
        let point = sweep_point(family, nbar, method, i as u64, opts)
            .map_err(|e| Error::SweepPoint { nbar, source: Box::new(e) })?;
        points.push(point);
    }
    let fit = fit_log_log(&points);
    Ok(SweepResult { family, method, points, fit })
}

fn sweep_point(
    family: Family,
    nbar: f64,
    method: Method,
    index: u64,
    opts: &PipelineOptions,
) -> Result<SweepPoint> {
    let state = family.state(nbar)?;
    let (rmse, bias) = match method {
        Method::OptimalPovm => {
            let (_, dist) = optimal_for_state(&state, opts)?;
            (dist.summary.rmse, dist.summary.mean)
        }
        Method::HomodyneMc { n_samples, seed } => {
            // one stream per sweep point
            let mc = homodyne_mc_stream(&state, 0.0, n_samples, seed, index)?;
            (mc.rmse, mc.bias)
        }
    };
    Ok(SweepPoint {
        nominal_nbar: nbar,
        exact_nbar: state.mean_photon_number(),
        alpha: state.alpha.re,
        z: state.z,
        rmse,
        bias,
    })
}

/// Least squares in log-log coordinates. With four or more points the
/// smallest photon number is dropped when it lies more than three standard
/// errors of prediction off the fit of the remaining points.
pub fn fit_log_log(points: &[SweepPoint]) -> LogLogFit {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.nominal_nbar.ln(), p.rmse.ln()))
        .collect();
    if xy.len() >= 4 {
        let rest = &xy[1..];
        let (slope, intercept) = least_squares(rest);
        let n = rest.len() as f64;
        let ssr: f64 = rest.iter().map(|(x, y)| (y - (intercept + slope * x)).powi(2)).sum();
        let sd = (ssr / (n - 2.0)).sqrt();
        let mx = rest.iter().map(|p| p.0).sum::<f64>() / n;
        let sxx: f64 = rest.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        let (x0, y0) = xy[0];
        let se = sd * (1.0 + 1.0 / n + (x0 - mx).powi(2) / sxx).sqrt();
        let r0 = y0 - (intercept + slope * x0);
        if r0.abs() > 3.0 * se.max(f64::EPSILON) {
            return LogLogFit {
                slope,
                intercept,
                points_used: rest.len(),
                excluded: vec![points[0].nominal_nbar],
            };
        }
    }
    let (slope, intercept) = least_squares(&xy);
    LogLogFit { slope, intercept, points_used: xy.len(), excluded: Vec::new() }
}

fn least_squares(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_examples() {
        let a = optimal_allocation(0.5).unwrap();
        assert!((a.state.alpha.re - 0.5).abs() < 1e-15);
        assert_eq!(a.state.z, 0.0);
        let a = optimal_allocation(2.0).unwrap();
        assert!((a.state.alpha.re - 1.0).abs() < 1e-15);
        assert!((a.state.z + 4f64.ln() / 2.0).abs() < 1e-15);
        for n in [0.5, 2.0, 50.0, 1e4] {
            let a = optimal_allocation(n).unwrap();
            assert!((a.effective_amplitude() - n).abs() <= 4.0 * f64::EPSILON * n);
        }
        assert!(optimal_allocation(0.4).is_err());
        assert!(optimal_allocation(f64::NAN).is_err());
    }

    #[test]
    fn exact_photon_number_approaches_nominal() {
        let small = optimal_allocation(2.0).unwrap();
        let large = optimal_allocation(1e4).unwrap();
        assert!((small.exact_nbar / 2.0 - 1.0).abs() > 0.01);
        assert!((large.exact_nbar / 1e4 - 1.0).abs() < 0.01);
    }

    fn pt(n: f64, rmse: f64) -> SweepPoint {
        SweepPoint { nominal_nbar: n, exact_nbar: n, alpha: 0.0, z: 0.0, rmse, bias: 0.0 }
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<_> = [4.0, 16.0, 64.0, 256.0].iter().map(|&n| pt(n, 0.5 / n)).collect();
        let fit = fit_log_log(&pts);
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.prefactor() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fit_drops_pre_asymptotic_point() {
        let mut pts: Vec<_> = [4.0, 16.0, 64.0, 256.0]
            .iter()
            .enumerate()
            .map(|(i, &n)| pt(n, 0.5 / n.sqrt() * (1.0 + 1e-3 * (i as f64 - 2.0))))
            .collect();
        pts[0].rmse *= 1.3;
        let fit = fit_log_log(&pts);
        assert_eq!(fit.excluded, vec![4.0]);
        assert!((fit.slope + 0.5).abs() < 0.01);
    }

    #[test]
    fn sweep_validates_input() {
        let o = PipelineOptions::default();
        let m = Method::HomodyneMc { n_samples: 10, seed: 0 };
        assert!(rmse_sweep(Family::Coherent, &[4.0], m, &o).is_err());
        assert!(rmse_sweep(Family::Coherent, &[16.0, 4.0], m, &o).is_err());
        assert!(rmse_sweep(Family::Coherent, &[0.5, 4.0], m, &o).is_err());
        assert!(rmse_sweep(Family::DisplacedSqueezedOptimal, &[0.5, 4.0], m, &o).is_ok());
    }
}
