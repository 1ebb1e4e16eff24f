use optsqueeze_core::estimators::{
    default_lnx_window, lnx_distribution, summarize, Frame, ShiftDistribution,
};
use optsqueeze_core::grid::UniformGrid;
use optsqueeze_core::pipeline::{optimal_for_state, PipelineOptions};
use optsqueeze_core::scaling::optimal_allocation;
use optsqueeze_core::spectral::{spectral_density_from_charfn, SpectralOptions};
use optsqueeze_core::states::{apply_squeeze, char_fn_analytic, wavefunction, GaussianPureState};
use optsqueeze_core::Complex64;
use proptest::prelude::*;

fn state() -> impl Strategy<Value = GaussianPureState> {
    (-3.0..3.0f64, -3.0..3.0f64, -1.0..1.0f64)
        .prop_map(|(re, im, z)| GaussianPureState::new(Complex64::new(re, im), z).unwrap())
}

proptest! {
    #[test]
    fn chi_is_bounded_hermitian_and_one_at_zero(s in state(), l in -30.0..30.0f64) {
        let chi = char_fn_analytic(&s, l);
        prop_assert!(chi.norm() <= 1.0 + 1e-9);
        prop_assert!((char_fn_analytic(&s, -l) - chi.conj()).norm() < 1e-12);
        prop_assert!((char_fn_analytic(&s, 0.0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn photon_number_is_nonnegative(s in state()) {
        let n = s.mean_photon_number();
        prop_assert!(n >= 0.0);
        prop_assert!((n - s.alpha.norm_sqr() - s.z.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn allocation_effective_amplitude_is_nbar(nbar in 0.5..1.0e4f64) {
        let a = optimal_allocation(nbar).unwrap();
        prop_assert!((a.effective_amplitude() - nbar).abs() <= 1e-12 * nbar);
        prop_assert!(a.state.z <= 0.0);
    }

    #[test]
    fn shifted_gaussian_summary(m in -1.0..1.0f64, s in 0.2..1.0f64) {
        let grid = UniformGrid::centred(0.0, 8.0, 4001).unwrap();
        let p = grid
            .points()
            .map(|t| (-(t - m).powi(2) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt()))
            .collect();
        let d = ShiftDistribution::new(grid, p, Frame::Error).unwrap();
        let sum = summarize(&d);
        prop_assert!((sum.mean - m).abs() < 1e-9);
        prop_assert!((sum.rmse - (s * s + m * m).sqrt()).abs() < 1e-9);
        prop_assert!((sum.mode - m).abs() <= grid.step() / 2.0 + 1e-12);
        prop_assert!((sum.captured - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn squeeze_round_trip(s in state(), r in -0.6..0.6f64) {
        let psi = wavefunction(&s, &s.quadrature_grid(24.0, 16384).unwrap()).unwrap();
        let back = apply_squeeze(&apply_squeeze(&psi, r).unwrap(), -r).unwrap();
        prop_assert!(back.l2_distance(&psi) < 1e-6);
    }

    #[test]
    fn spectral_density_mean_is_generator_mean(s in state()) {
        let g = spectral_density_from_charfn(|l| char_fn_analytic(&s, l), &SpectralOptions::default()).unwrap();
        prop_assert!((g.normalization() - 1.0).abs() < 1e-6);
        // <K> = Im <a^2> = Im alpha^2 for every Gaussian pure state here
        prop_assert!((g.first_moment() - (s.alpha * s.alpha).im).abs() < 1e-6);
        prop_assert!(g.g.iter().all(|&v| v >= 0.0));
    }

    /// `sqrt(g)` is real, so `|A(-t)| = |A(t)|^*`: the optimal density is
    /// symmetric and unbiased for every probe.
    #[test]
    fn optimal_density_is_symmetric(s in state()) {
        let (_, d) = optimal_for_state(&s, &PipelineOptions::default()).unwrap();
        prop_assert!(d.asymmetry() < 1e-9 * d.p.iter().cloned().fold(1.0, f64::max));
        prop_assert!(d.summary.mean.abs() < 1e-9);
    }
}

#[test]
fn max_likelihood_cost_converges_with_resolution() {
    let s = GaussianPureState::coherent(1.0).unwrap();
    let peak = |n_lambda: usize, t_points: usize| {
        let opts = PipelineOptions {
            spectral: SpectralOptions { n_lambda, ..SpectralOptions::default() },
            t_points: Some(t_points),
            ..PipelineOptions::default()
        };
        optimal_for_state(&s, &opts).unwrap().1.density_at_truth()
    };
    let coarse = peak(1 << 13, 4097);
    let fine = peak(1 << 15, 16385);
    assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
}

/// Coarse scan of displaced squeezed states at one photon budget: none beats
/// the closed-form allocation by more than a few percent.
#[test]
fn allocation_is_near_best_on_coarse_grid() {
    let nbar = 16.0;
    let alloc = optimal_allocation(nbar).unwrap();
    let rmse = |s: &GaussianPureState| optimal_for_state(s, &PipelineOptions::default()).unwrap().1.summary.rmse;
    let best_alloc = rmse(&alloc.state);

    let mut best_scan = f64::INFINITY;
    let mut at = (0.0, 0.0);
    for i in 0..=16 {
        let alpha = 0.5 + 0.25 * i as f64;
        for j in 0..=12 {
            let z = -3.0 + 0.25 * j as f64;
            let s = GaussianPureState::displaced_squeezed(alpha, z).unwrap();
            if s.mean_photon_number() > nbar {
                continue;
            }
            let r = rmse(&s);
            if r < best_scan {
                best_scan = r;
                at = (alpha, z);
            }
        }
    }
    assert!(best_alloc <= 1.05 * best_scan, "allocation {best_alloc} vs scan {best_scan} at {at:?}");
    let coherent = rmse(&GaussianPureState::coherent(nbar.sqrt()).unwrap());
    assert!(best_alloc < 0.5 * coherent);
}

#[test]
fn optimal_rmse_beats_lnx_at_alpha_4() {
    let s = GaussianPureState::coherent(4.0).unwrap();
    let (_, opt) = optimal_for_state(&s, &PipelineOptions::default()).unwrap();
    let psi = wavefunction(&s, &s.default_grid()).unwrap();
    let lnx = lnx_distribution(&psi, 0.0, &default_lnx_window(&psi, 0.0).unwrap()).unwrap();
    let lnx = lnx.to_error_frame();
    assert!(opt.summary.rmse < 0.95 * lnx.summary.rmse, "{} vs {}", opt.summary.rmse, lnx.summary.rmse);
}
