//! `shearwave` subcommands. Exit codes: 0 ok, 2 configuration or input
//! error, 3 non-convergence, 4 divergence, 1 anything else (I/O).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::approx::{coefficient_decay, n_schedule, nterm_curve, wavelet_baseline, RateFit};
use crate::config::{RunConfig, RunManifest};
use crate::error::{Error, Result};
use crate::grid::{inner_h1, GridFunction};
use crate::hybrid::{frame_bounds_estimate, FrameConfig, HybridFrame};
use crate::io;
use crate::solver::{solve_observed, SolveStatus};

#[derive(Debug, Parser)]
#[command(name = "shearwave", version, about = "Hybrid shearlet-wavelet frames, adaptive Poisson solver and N-term benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the H¹ frame bounds of the hybrid system.
    FrameBounds(Common),
    /// Run the thresholded Richardson solver.
    Solve(Common),
    /// N-term error curves, wavelet baseline and coefficient decay.
    Rates(Common),
    /// Convert a grid binary to PGM or CSV.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid size override.
    #[arg(long)]
    pub n: Option<usize>,
    /// Finest wavelet scale override.
    #[arg(long)]
    pub scales: Option<u32>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `.pgm` for an image, anything else for `i,k,value` CSV.
    #[arg(long)]
    pub output: PathBuf,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => 3,
        Error::Divergence { .. } => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let res = match cli.command {
        Command::FrameBounds(c) => load(&c).and_then(|cfg| cmd_frame_bounds(&cfg, &c.out)),
        Command::Solve(c) => load(&c).and_then(|cfg| cmd_solve(&cfg, &c.out)),
        Command::Rates(c) => load(&c).and_then(|cfg| cmd_rates(&cfg, &c.out)),
        Command::Render(r) => cmd_render(&r.input, &r.output),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Reads the config (or defaults) and applies the command-line overrides.
pub fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(n) = c.n {
        cfg.n = n;
    }
    if let Some(j) = c.scales {
        cfg.frame.j_max = Some(j);
    }
    cfg.solve.seed = cfg.seed;
    cfg.validate()?;
    Ok(cfg)
}

struct Outputs<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path, command: &str, cfg: &RunConfig) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir, manifest: RunManifest::new(command, cfg)? })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.dir.join(name)
    }

    fn text(&mut self, name: &str, s: &str) -> Result<()> {
        let p = self.path(name);
        io::write_text(&p, s)
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        let p = self.path(name);
        io::write_json(&p, v)
    }

    fn finish(mut self) -> Result<()> {
        self.manifest.outputs.push("manifest.json".into());
        io::write_json(&self.dir.join("manifest.json"), &self.manifest)
    }
}

#[derive(Serialize)]
struct FrameBoundsReport {
    n: usize,
    j_max: u32,
    q_sh: f64,
    a_est: f64,
    b_est: f64,
    ratio: f64,
    iterations: usize,
    wavelet_count: usize,
    shearlet_count: usize,
    skipped_directions: usize,
}

pub fn cmd_frame_bounds(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let frame = HybridFrame::new(&cfg.frame, cfg.n)?;
    let mut o = Outputs::new(out, "frame-bounds", cfg)?;
    let fb = frame_bounds_estimate(&frame, cfg.seed, cfg.frame_bounds.tol, cfg.frame_bounds.max_iter)?;
    let report = FrameBoundsReport {
        n: cfg.n,
        j_max: frame.wavelets().j_max(),
        q_sh: frame.q_sh(),
        a_est: fb.a,
        b_est: fb.b,
        ratio: fb.ratio,
        iterations: fb.iterations,
        wavelet_count: frame.wavelet_count(),
        shearlet_count: frame.shearlet_count(),
        skipped_directions: frame.shearlets().map_or(0, |s| s.skipped().len()),
    };
    o.json("frame_bounds.json", &report)?;
    let mut s = String::from("scale,wavelets,shearlets\n");
    for (j, w, sh) in frame.counts_by_scale() {
        writeln!(s, "{j},{w},{sh}").unwrap();
    }
    o.text("counts_by_scale.csv", &s)?;
    o.finish()?;
    println!("A = {:.6e}, B = {:.6e}, B/A = {:.4}", fb.a, fb.b, fb.ratio);
    if fb.a > 0.0 {
        Ok(0)
    } else {
        eprintln!("error: lower frame bound estimate is not positive");
        Ok(3)
    }
}

pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let n = cfg.n;
    let frame = HybridFrame::new(&cfg.frame, n)?;
    let f = cfg.problem.rhs(n)?;
    let reference = cfg.problem.reference(n)?;
    let mut o = Outputs::new(out, "solve", cfg)?;
    let every = cfg.snapshot_every.unwrap_or(cfg.solve.period);
    let mut snaps: Vec<(usize, GridFunction)> = Vec::new();
    let outcome = solve_observed(&f, &frame, &cfg.solve, Some(&reference), |it, u| {
        if it % every == 0 {
            snaps.push((it, u.clone()));
        }
    })?;
    for (it, u) in &snaps {
        let p = o.path(&format!("snapshot_{it:04}.pgm"));
        io::write_pgm(&p, u)?;
    }
    o.text("trace.csv", &io::trace_csv(&outcome.trace, cfg.timing))?;
    let p = o.path("solution.bin");
    io::write_grid(&p, &outcome.solution)?;
    let p = o.path("solution.pgm");
    io::write_pgm(&p, &outcome.solution)?;
    let p = o.path("reference.bin");
    io::write_grid(&p, &reference)?;
    o.text("coefficients.csv", &io::coefficient_csv(&frame, &outcome.coefficients)?)?;
    let mut header = outcome.trace.clone();
    if !cfg.timing {
        header.records.iter_mut().for_each(|r| r.seconds = 0.0);
    }
    header.records.clear();
    o.json("solve_summary.json", &header)?;
    o.finish()?;
    let last = outcome.trace.records.last();
    println!(
        "status {:?} after {} iterations, residual {:.3e}, H1 error {}",
        outcome.trace.status,
        last.map_or(0, |r| r.iteration),
        last.map_or(0.0, |r| r.residual),
        last.and_then(|r| r.h1_error).map_or("n/a".into(), |e| format!("{e:.3e}"))
    );
    Ok(match outcome.trace.status {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIterations => {
            eprintln!("error: {}", Error::NonConvergence { what: "Richardson iteration", iterations: cfg.solve.max_iter });
            3
        }
        SolveStatus::Diverged => {
            let r = last.map_or(f64::NAN, |r| r.residual);
            eprintln!("error: {}", Error::Divergence { iteration: last.map_or(0, |r| r.iteration), residual: r });
            4
        }
    })
}

#[derive(Serialize)]
struct RatesSummary {
    n: usize,
    hybrid_total: usize,
    hybrid: RateFit,
    hybrid_slope: f64,
    hybrid_valid_fraction: f64,
    baseline_total: Option<usize>,
    baseline: Option<RateFit>,
    baseline_slope: Option<f64>,
    baseline_valid_fraction: Option<f64>,
    /// baseline_slope − hybrid_slope
    slope_gap: Option<f64>,
    decay_exponent: Option<f64>,
    decay_exponent_raw: Option<f64>,
    decay_range: Option<(usize, usize)>,
}

pub fn cmd_rates(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let n = cfg.n;
    let frame = HybridFrame::new(&cfg.frame, n)?;
    let u = cfg.problem.reference(n)?;
    if inner_h1(&u, &u)? == 0.0 {
        return Err(Error::Config("the reference solution is zero; rates are undefined".into()));
    }
    let mut o = Outputs::new(out, "rates", cfg)?;
    let ns = cfg.rates.ns.clone().unwrap_or_else(|| n_schedule(frame.len()));
    let hyb = nterm_curve(&u, &frame, &ns, &cfg.rates.nterm)?;
    o.text("rates_hybrid.csv", &io::rate_table_csv(&hyb))?;
    let hfit = hyb.fit()?;
    let mut valid = hyb.valid_fraction();
    let base = if cfg.rates.baseline {
        let wf: FrameConfig = cfg.frame.clone();
        let t = wavelet_baseline(&u, &wf, &ns, &cfg.rates.nterm)?;
        o.text("rates_wavelet.csv", &io::rate_table_csv(&t))?;
        valid = valid.min(t.valid_fraction());
        Some((t.fit()?, t.total, t.valid_fraction()))
    } else {
        None
    };
    let decay = coefficient_decay(&u, &frame)?;
    let mut s = String::from("N,magnitude\n");
    let m = decay.magnitudes.len();
    let mut last = 0;
    for i in 0..=400 {
        let k = ((m as f64).powf(i as f64 / 400.0).round() as usize).clamp(1, m.max(1));
        if m > 0 && k > last {
            writeln!(s, "{k},{:e}", decay.magnitudes[k - 1]).unwrap();
            last = k;
        }
    }
    o.text("coefficient_decay.csv", &s)?;
    let summary = RatesSummary {
        n,
        hybrid_total: hyb.total,
        hybrid_slope: hfit.slope,
        hybrid: hfit.clone(),
        hybrid_valid_fraction: hyb.valid_fraction(),
        baseline_total: base.as_ref().map(|b| b.1),
        baseline_slope: base.as_ref().map(|b| b.0.slope),
        slope_gap: base.as_ref().map(|b| b.0.slope - hfit.slope),
        baseline_valid_fraction: base.as_ref().map(|b| b.2),
        baseline: base.map(|b| b.0),
        decay_exponent: decay.fit.as_ref().map(|f| f.exponent),
        decay_exponent_raw: decay.fit.as_ref().map(|f| f.exponent_raw),
        decay_range: decay.fit.as_ref().map(|f| f.range),
    };
    o.json("summary.json", &summary)?;
    o.finish()?;
    println!(
        "hybrid slope {:.3}, baseline slope {}, decay exponent {}",
        summary.hybrid_slope,
        summary.baseline_slope.map_or("n/a".into(), |v| format!("{v:.3}")),
        summary.decay_exponent.map_or("n/a".into(), |v| format!("{v:.3}"))
    );
    if valid >= 0.8 {
        Ok(0)
    } else {
        eprintln!("error: only {:.0}% of N-term rows converged", 100.0 * valid);
        Ok(3)
    }
}

pub fn cmd_render(input: &Path, output: &Path) -> Result<i32> {
    let f = io::read_grid(input)?;
    if output.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        io::write_pgm(output, &f)?;
    } else {
        let n = f.n();
        let mut s = String::from("i,k,value\n");
        for i in 0..n {
            for k in 0..n {
                writeln!(s, "{i},{k},{:e}", f.get(i, k)).unwrap();
            }
        }
        io::write_text(output, &s)?;
    }
    Ok(0)
}
