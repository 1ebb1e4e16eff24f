use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::Parser;
use optsqueeze_core::costs::{expected_cost, CostFunction};
use optsqueeze_core::estimators::{default_lnx_window, lnx_distribution, Frame, ShiftDistribution};
use optsqueeze_core::grid::UniformGrid;
use optsqueeze_core::pipeline::{optimal_for_probe, Probe};
use optsqueeze_core::scaling::{rmse_sweep, Family, Method};
use optsqueeze_core::spectral::{
    spectral_density_from_charfn, spectral_density_via_mellin, SpectralOptions,
};
use optsqueeze_core::homodyne_mc;
use serde::Serialize;

mod config;
mod error;
mod io;

use config::{Cli, Command, CostKind, FamilyArg, Format, FrameArg, MethodArg, RunArgs, RunConfig, Strategy};
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[derive(Serialize)]
struct Record<'a, M: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    meta: M,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<BTreeMap<&'a str, &'a [f64]>>,
}

/// CSV plus sidecar, or a single JSON document, depending on `--format`.
fn emit<M: Serialize>(
    run: &RunArgs,
    config: &RunConfig,
    headers: &[&str],
    columns: &[&[f64]],
    meta: M,
) -> Result<(), CliError> {
    match run.format {
        Format::Csv => {
            io::write_csv(&run.out, headers, columns)?;
            io::write_json(&io::sidecar_path(&run.out), &Record { config, meta, data: None })
        }
        Format::Json => {
            let data = headers.iter().copied().zip(columns.iter().copied()).collect();
            io::write_json(&run.out, &Record { config, meta, data: Some(data) })
        }
    }
}

fn check_out(run: &RunArgs) -> Result<(), CliError> {
    if run.format == Format::Csv && run.out.extension().is_some_and(|e| e == "json") {
        return Err(CliError::Validation(
            "CSV output must not use the .json extension reserved for the sidecar".into(),
        ));
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Spectral { run, oracle } => cmd_spectral(&run, oracle),
        Command::Dist { run, strategy, r_true, frame } => cmd_dist(&run, strategy, r_true, frame),
        Command::Cost { run, kind, strategy, r_true, dist } => {
            cmd_cost(&run, kind, strategy, r_true, dist.as_deref())
        }
        Command::Sweep { run, family, method, nbar, samples } => {
            cmd_sweep(&run, family, method, &nbar, samples)
        }
        Command::Mc { run, samples, r_true } => cmd_mc(&run, samples, r_true),
        Command::Wavefunction { run } => cmd_wavefunction(&run),
    }
}

fn cmd_spectral(run: &RunArgs, oracle: bool) -> Result<(), CliError> {
    run.validate()?;
    check_out(run)?;
    let probe = run.probe()?;
    let pipeline = run.pipeline();
    let (_, spectral) = pipeline.resolve(&probe)?;
    let mut g = spectral_density_from_charfn(|l| probe.char_fn(l), &spectral)?;
    if oracle {
        // same mu grid, independent route
        let psi = match &probe {
            Probe::Gaussian(_) => run.wavefunction_grid()?,
            Probe::Grid(psi) => psi.clone(),
        };
        g = spectral_density_via_mellin(&psi, &g.mu)?;
    }
    let mu: Vec<f64> = g.mu.points().collect();
    let config = run.config("spectral", pipeline);

    #[derive(Serialize)]
    struct Meta<'a> {
        spectral_options: SpectralOptions,
        metadata: &'a optsqueeze_core::spectral::SpectralMeta,
        first_moment: f64,
    }
    emit(
        run,
        &config,
        &["mu", "g"],
        &[&mu, &g.g],
        Meta { spectral_options: spectral, metadata: &g.meta, first_moment: g.first_moment() },
    )
}

fn strategy_distribution(
    run: &RunArgs,
    strategy: Strategy,
    r_true: f64,
) -> Result<(ShiftDistribution, Option<optsqueeze_core::spectral::SpectralMeta>), CliError> {
    if !r_true.is_finite() {
        return Err(CliError::Validation(format!("--r-true must be finite, got {r_true}")));
    }
    match strategy {
        Strategy::Optimal => {
            let (g, d) = optimal_for_probe(&run.probe()?, &run.pipeline())?;
            Ok((d, Some(g.meta)))
        }
        Strategy::Lnx => {
            let psi = run.wavefunction_grid()?;
            let mut window = default_lnx_window(&psi, r_true)?;
            if let Some(n) = run.n_t {
                window = UniformGrid::new(window.min, window.max, n)?;
            }
            let d = lnx_distribution(&psi, r_true, &window)?;
            Ok((d.to_error_frame(), None))
        }
    }
}

fn cmd_dist(run: &RunArgs, strategy: Strategy, r_true: f64, frame: FrameArg) -> Result<(), CliError> {
    run.validate()?;
    check_out(run)?;
    let (dist, spectral) = strategy_distribution(run, strategy, r_true)?;
    let dist = match frame {
        FrameArg::Error => dist,
        FrameArg::Absolute => dist.to_absolute_frame(r_true),
    };
    let var = if frame == FrameArg::Error { "t" } else { "r_hat" };
    let t: Vec<f64> = dist.grid.points().collect();
    let mut pipeline = run.pipeline();
    if strategy == Strategy::Optimal {
        let (window, _) = pipeline.resolve(&run.probe()?)?;
        pipeline.t_halfwidth = Some(window.max);
        pipeline.t_points = Some(window.n);
    }
    let config = run.config("dist", pipeline);

    #[derive(Serialize)]
    struct Meta {
        strategy: Strategy,
        r_true: f64,
        frame: Frame,
        grid: UniformGrid,
        summary: optsqueeze_core::Summary,
        #[serde(skip_serializing_if = "Option::is_none")]
        spectral: Option<optsqueeze_core::spectral::SpectralMeta>,
    }
    emit(
        run,
        &config,
        &[var, "p"],
        &[&t, &dist.p],
        Meta { strategy, r_true, frame: dist.frame, grid: dist.grid, summary: dist.summary, spectral },
    )
}

fn cmd_cost(
    run: &RunArgs,
    kind: CostKind,
    strategy: Strategy,
    r_true: f64,
    dist_path: Option<&std::path::Path>,
) -> Result<(), CliError> {
    run.validate()?;
    let dist = match dist_path {
        Some(p) => io::read_distribution(p)?,
        None => strategy_distribution(run, strategy, r_true)?.0,
    };
    let probe = run.probe()?;
    let chi = |t: f64| probe.char_fn(t);
    let cost = match kind {
        CostKind::Ml => CostFunction::MaxLikelihood,
        CostKind::Fidelity => CostFunction::Fidelity,
    };
    let value = expected_cost(&dist, &cost, Some(&chi))?;
    let config = run.config("cost", run.pipeline());

    #[derive(Serialize)]
    struct Meta<'a> {
        kind: CostKind,
        strategy: Option<Strategy>,
        dist: Option<String>,
        r_true: f64,
        expected_cost: f64,
        summary: &'a optsqueeze_core::Summary,
    }
    let meta = Meta {
        kind,
        strategy: dist_path.is_none().then_some(strategy),
        dist: dist_path.map(|p| p.display().to_string()),
        r_true,
        expected_cost: value,
        summary: &dist.summary,
    };
    io::write_json(&run.out, &Record { config: &config, meta, data: None })
}

fn cmd_sweep(
    run: &RunArgs,
    family: FamilyArg,
    method: MethodArg,
    nbars: &[f64],
    samples: usize,
) -> Result<(), CliError> {
    run.validate()?;
    check_out(run)?;
    if samples == 0 {
        return Err(CliError::Validation("--samples must be positive".into()));
    }
    let family = match family {
        FamilyArg::Coherent => Family::Coherent,
        FamilyArg::DisplacedSqueezedOptimal => Family::DisplacedSqueezedOptimal,
    };
    let method = match method {
        MethodArg::OptimalPovm => Method::OptimalPovm,
        MethodArg::HomodyneMc => Method::HomodyneMc { n_samples: samples, seed: run.seed },
    };
    let pipeline = run.pipeline();
    let res = rmse_sweep(family, nbars, method, &pipeline)?;
    let col = |f: fn(&optsqueeze_core::scaling::SweepPoint) -> f64| -> Vec<f64> {
        res.points.iter().map(f).collect()
    };
    let (n, ne, a, z, r, b) = (
        col(|p| p.nominal_nbar),
        col(|p| p.exact_nbar),
        col(|p| p.alpha),
        col(|p| p.z),
        col(|p| p.rmse),
        col(|p| p.bias),
    );
    let config = run.config("sweep", pipeline);

    #[derive(Serialize)]
    struct Meta<'a> {
        family: Family,
        method: Method,
        nbar: &'a [f64],
        fit: &'a optsqueeze_core::scaling::LogLogFit,
    }
    emit(
        run,
        &config,
        &["nominal_nbar", "exact_nbar", "alpha", "z", "rmse", "bias"],
        &[&n, &ne, &a, &z, &r, &b],
        Meta { family, method, nbar: nbars, fit: &res.fit },
    )
}

fn cmd_mc(run: &RunArgs, samples: usize, r_true: f64) -> Result<(), CliError> {
    run.validate()?;
    let state = run
        .gaussian()?
        .ok_or_else(|| CliError::Validation("mc needs a Gaussian --state".into()))?;
    if !r_true.is_finite() {
        return Err(CliError::Validation(format!("--r-true must be finite, got {r_true}")));
    }
    let summary = homodyne_mc(&state, r_true, samples, run.seed)?;
    let config = run.config("mc", run.pipeline());

    #[derive(Serialize)]
    struct Meta {
        mean_photon_number: f64,
        result: optsqueeze_core::McSummary,
    }
    let meta = Meta { mean_photon_number: state.mean_photon_number(), result: summary };
    io::write_json(&run.out, &Record { config: &config, meta, data: None })
}

fn cmd_wavefunction(run: &RunArgs) -> Result<(), CliError> {
    run.validate()?;
    check_out(run)?;
    let psi = run.wavefunction_grid()?;
    let x: Vec<f64> = psi.grid().points().collect();
    let re: Vec<f64> = psi.values().iter().map(|v| v.re).collect();
    let im: Vec<f64> = psi.values().iter().map(|v| v.im).collect();
    let (mean, variance) = psi.quadrature_moments();
    let config = run.config("wavefunction", run.pipeline());

    #[derive(Serialize)]
    struct Meta {
        norm: f64,
        mean: f64,
        variance: f64,
    }
    emit(
        run,
        &config,
        &["x", "re_psi", "im_psi"],
        &[&x, &re, &im],
        Meta { norm: psi.norm(), mean, variance },
    )
}
