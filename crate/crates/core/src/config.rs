//! JSON run configuration shared by all subcommands, and the run manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::approx::NtermConfig;
use crate::cartoon::{experiment_rhs_with, experiment_solution, reference_solution, sample_cartoon, CartoonSpec};
use crate::error::{Error, Result};
use crate::grid::{check_grid_size, GridFunction};
use crate::hybrid::FrameConfig;
use crate::io::{read_grid, read_json};
use crate::solver::SolveConfig;

/// Right-hand side of −Δu = f.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    /// f = D₁g + D₂g for the disc indicator g; `mollify` smears the jump.
    Experiment {
        #[serde(default)]
        mollify: Option<f64>,
    },
    /// f = 2π² sin(πx₁) sin(πx₂), u = sin(πx₁) sin(πx₂).
    Sine,
    Zero,
    /// f sampled from a cartoon-like function.
    Cartoon { spec: CartoonSpec },
    /// f read from a grid binary.
    File { path: PathBuf },
}

impl Default for Problem {
    fn default() -> Self {
        Problem::Experiment { mollify: None }
    }
}

impl Problem {
    pub fn rhs(&self, n: usize) -> Result<GridFunction> {
        match self {
            Problem::Experiment { mollify } => Ok(experiment_rhs_with(n, *mollify)?.1),
            Problem::Sine => sine_rhs(n),
            Problem::Zero => GridFunction::zeros(n),
            Problem::Cartoon { spec } => sample_cartoon(spec, n),
            Problem::File { path } => {
                let f = read_grid(path)?;
                if f.n() != n {
                    return Err(Error::Config(format!("{} holds n = {}, run uses n = {n}", path.display(), f.n())));
                }
                Ok(f)
            }
        }
    }

    /// The oracle solution; for the sharp experiment the right-hand side is
    /// rebuilt at the oracle resolution.
    pub fn reference(&self, n: usize) -> Result<GridFunction> {
        match self {
            Problem::Experiment { mollify: None } => experiment_solution(n),
            _ => reference_solution(&self.rhs(n)?),
        }
    }
}

pub fn sine_rhs(n: usize) -> Result<GridFunction> {
    use std::f64::consts::PI;
    GridFunction::from_fn(n, |x, y| 2.0 * PI * PI * (PI * x).sin() * (PI * y).sin())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameBoundsConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FrameBoundsConfig {
    fn default() -> Self {
        Self { tol: 1e-3, max_iter: 300 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    /// N values; default is the geometric 16-point schedule.
    pub ns: Option<Vec<usize>>,
    pub baseline: bool,
    pub nterm: NtermConfig,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self { ns: None, baseline: true, nterm: NtermConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub problem: Problem,
    pub frame: FrameConfig,
    pub solve: SolveConfig,
    pub rates: RatesConfig,
    pub frame_bounds: FrameBoundsConfig,
    /// Iterations between PGM snapshots; defaults to the thresholding period.
    pub snapshot_every: Option<usize>,
    /// Write wall-clock seconds into the trace; off gives byte-stable traces.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 256,
            seed: 7,
            problem: Problem::default(),
            frame: FrameConfig::default(),
            solve: SolveConfig::default(),
            rates: RatesConfig::default(),
            frame_bounds: FrameBoundsConfig::default(),
            snapshot_every: None,
            timing: true,
        }
    }
}

impl RunConfig {
    /// A missing or unreadable config file is a configuration error.
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path).map_err(|e| match e {
            Error::Io(e) => Error::Config(format!("{}: {e}", path.display())),
            e => e,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_grid_size(self.n)?;
        self.frame.validate()?;
        self.solve.validate()?;
        if let Some(ns) = &self.rates.ns {
            if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
                return Err(Error::Config("rates.ns must be a non-empty, strictly increasing list of positive counts".into()));
            }
        }
        if !(self.rates.nterm.cg_tol > 0.0) || !(self.frame_bounds.tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::Config("snapshot_every must be >= 1".into()));
        }
        if let Problem::Cartoon { spec } = &self.problem {
            spec.validate()?;
        }
        Ok(())
    }
}

/// Everything needed to reproduce a run's outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: RunConfig,
    /// SHA-256 over the canonical config JSON and any input file bytes.
    pub input_hash: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Result<Self> {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(config)?);
        if let Problem::File { path } = &config.problem {
            h.update(std::fs::read(path)?);
        }
        let input_hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            config: config.clone(),
            input_hash,
            outputs: Vec::new(),
        })
    }
}
