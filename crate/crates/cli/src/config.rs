//! Command-line arguments and the resolved run configuration echoed into
//! every output sidecar.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use optsqueeze_core::pipeline::{PipelineOptions, Probe};
use optsqueeze_core::spectral::SpectralOptions;
use optsqueeze_core::{wavefunction, Complex64, GaussianPureState};
use serde::Serialize;

use crate::error::CliError;
use crate::io::read_wavefunction;

#[derive(Debug, Parser)]
#[command(name = "optsqueeze", version, about = "Optimal estimation of single-mode squeezing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral density g(mu) of the squeezing generator (columns: mu, g).
    Spectral {
        #[command(flatten)]
        run: RunArgs,
        /// Use the Mellin-transform route instead of the characteristic function.
        #[arg(long)]
        oracle: bool,
    },
    /// Estimation-error density of a strategy (columns: t, p).
    Dist {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Strategy::Optimal)]
        strategy: Strategy,
        /// True squeezing applied before the ln|X| measurement.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        r_true: f64,
        #[arg(long, value_enum, default_value_t = FrameArg::Error)]
        frame: FrameArg,
    },
    /// Expected cost of a strategy, or of a distribution file.
    Cost {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        kind: CostKind,
        #[arg(long, value_enum, default_value_t = Strategy::Optimal)]
        strategy: Strategy,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        r_true: f64,
        /// Distribution CSV written by `dist` (its JSON sidecar must sit next to it).
        #[arg(long)]
        dist: Option<PathBuf>,
    },
    /// RMSE against mean photon number with a log-log fit.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_delimiter = ',', required = true)]
        nbar: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Homodyne Monte Carlo with the ln|x/alpha| estimate.
    Mc {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        r_true: f64,
    },
    /// Sampled quadrature wavefunction (columns: x, re_psi, im_psi).
    Wavefunction {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Vacuum,
    Coherent,
    Squeezed,
    DisplacedSqueezed,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Optimal,
    Lnx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameArg {
    Error,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    Ml,
    Fidelity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Coherent,
    DisplacedSqueezedOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    OptimalPovm,
    HomodyneMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value_t = StateKind::Vacuum)]
    pub state: StateKind,
    /// Real part of the displacement.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Imaginary part of the displacement.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    /// Squeeze parameter of the probe.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
    /// Wavefunction CSV (x, re_psi, im_psi) for `--state file`.
    #[arg(long)]
    pub wavefunction: Option<PathBuf>,
    /// Quadrature grid half-width in standard deviations.
    #[arg(long, default_value_t = 10.0)]
    pub x_sigmas: f64,
    #[arg(long, default_value_t = 4096)]
    pub n_x: usize,
    #[arg(long)]
    pub lambda_halfwidth: Option<f64>,
    #[arg(long, default_value_t = 1 << 14)]
    pub n_lambda: usize,
    #[arg(long)]
    pub t_halfwidth: Option<f64>,
    #[arg(long)]
    pub n_t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Fully resolved configuration, serialized into every sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub state: StateKind,
    pub alpha: f64,
    pub alpha_im: f64,
    pub z: f64,
    pub wavefunction: Option<String>,
    pub x_sigmas: f64,
    pub n_x: usize,
    pub pipeline: PipelineOptions,
    pub seed: u64,
    pub out: String,
    pub format: Format,
}

impl RunArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        let finite = [("alpha", self.alpha), ("alpha-im", self.alpha_im), ("z", self.z)];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(CliError::Validation(format!("--{name} must be finite, got {v}")));
            }
        }
        positive("x-sigmas", self.x_sigmas)?;
        positive("n-x", self.n_x as f64)?;
        positive("n-lambda", self.n_lambda as f64)?;
        if let Some(v) = self.lambda_halfwidth {
            positive("lambda-halfwidth", v)?;
        }
        if let Some(v) = self.t_halfwidth {
            positive("t-halfwidth", v)?;
        }
        if let Some(v) = self.n_t {
            positive("n-t", v as f64)?;
        }
        match (self.state, &self.wavefunction) {
            (StateKind::File, None) => Err(CliError::Validation(
                "--state file requires --wavefunction".into(),
            )),
            (s, Some(_)) if s != StateKind::File => Err(CliError::Validation(
                "--wavefunction is only used with --state file".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Closed-form state, or `None` for `--state file`.
    pub fn gaussian(&self) -> Result<Option<GaussianPureState>, CliError> {
        let (alpha, z) = match self.state {
            StateKind::Vacuum => (Complex64::new(0.0, 0.0), 0.0),
            StateKind::Coherent => (Complex64::new(self.alpha, self.alpha_im), 0.0),
            StateKind::Squeezed => (Complex64::new(0.0, 0.0), self.z),
            StateKind::DisplacedSqueezed => (Complex64::new(self.alpha, self.alpha_im), self.z),
            StateKind::File => return Ok(None),
        };
        Ok(Some(GaussianPureState::new(alpha, z)?))
    }

    pub fn probe(&self) -> Result<Probe, CliError> {
        match self.gaussian()? {
            Some(s) => Ok(Probe::Gaussian(s)),
            None => Ok(Probe::Grid(self.wavefunction_grid()?)),
        }
    }

    pub fn wavefunction_grid(&self) -> Result<optsqueeze_core::WavefunctionGrid, CliError> {
        match self.gaussian()? {
            Some(s) => {
                let grid = s.quadrature_grid(self.x_sigmas, self.n_x)?;
                Ok(wavefunction(&s, &grid)?)
            }
            None => read_wavefunction(self.wavefunction.as_deref().expect("validated")),
        }
    }

    pub fn pipeline(&self) -> PipelineOptions {
        PipelineOptions {
            spectral: SpectralOptions {
                lambda_halfwidth: self.lambda_halfwidth,
                n_lambda: self.n_lambda,
                ..SpectralOptions::default()
            },
            t_halfwidth: self.t_halfwidth,
            t_points: self.n_t,
        }
    }

    pub fn config(&self, command: &'static str, pipeline: PipelineOptions) -> RunConfig {
        RunConfig {
            command,
            state: self.state,
            alpha: self.alpha,
            alpha_im: self.alpha_im,
            z: self.z,
            wavefunction: self.wavefunction.as_deref().map(display),
            x_sigmas: self.x_sigmas,
            n_x: self.n_x,
            pipeline,
            seed: self.seed,
            out: display(&self.out),
            format: self.format,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("--{name} must be positive, got {v}")))
    }
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}
