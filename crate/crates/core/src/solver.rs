//! 𝐋𝐮 = 𝐟 in hybrid-frame coordinates and the thresholded damped Richardson
//! iteration.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner_h1, laplacian, GridFunction};
use crate::hybrid::{CoefficientVector, HybridFrame};
use crate::krylov::power_iteration;

/// 𝐋 = A(−Δ)S, A the weighted L²-pairing analysis, S the synthesis.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteOperator<'a> {
    frame: &'a HybridFrame,
}

impl<'a> DiscreteOperator<'a> {
    pub fn new(frame: &'a HybridFrame) -> Self {
        Self { frame }
    }

    pub fn frame(&self) -> &HybridFrame {
        self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// Returns 𝐋c together with the reconstruction u = S c.
    pub fn apply_dense_with_u(&self, c: &[f64]) -> Result<(Vec<f64>, GridFunction)> {
        let u = self.frame.synthesis_dense(c)?;
        let lu = laplacian(&u).scale(-1.0);
        Ok((self.frame.analysis_l2_dense(&lu)?, u))
    }

    pub fn apply_dense(&self, c: &[f64]) -> Result<Vec<f64>> {
        Ok(self.apply_dense_with_u(c)?.0)
    }
}

/// 𝐟 = weighted ⟨f, element⟩_{L²} over the admissible indices.
pub fn rhs_coefficients(f: &GridFunction, frame: &HybridFrame) -> Result<CoefficientVector> {
    Ok(CoefficientVector::from_dense(&frame.analysis_l2_dense(f)?))
}

pub fn apply_operator(op: &DiscreteOperator, c: &CoefficientVector) -> Result<CoefficientVector> {
    if c.len() != op.dim() {
        return Err(Error::UnknownIndex(format!("vector over {} slots, operator has {}", c.len(), op.dim())));
    }
    Ok(CoefficientVector::from_dense(&op.apply_dense(&c.to_dense())?))
}

#[derive(Clone, Debug, Serialize)]
pub struct Relaxation {
    pub lambda_max: f64,
    pub omega: f64,
    pub iterations: usize,
}

/// ω = 1/λ_max with λ_max from power iteration on 𝐋.
pub fn estimate_relaxation(op: &DiscreteOperator, seed: u64, tol: f64, max_iter: usize) -> Result<Relaxation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..op.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut failure = None;
    let res = power_iteration(
        |x| match op.apply_dense(x) {
            Ok(y) => y,
            Err(e) => {
                failure = Some(e);
                vec![0.0; x.len()]
            }
        },
        start,
        tol,
        max_iter,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !res.converged {
        return Err(Error::NonConvergence { what: "power iteration for lambda_max", iterations: res.iterations });
    }
    Ok(Relaxation { lambda_max: res.lambda, omega: 1.0 / res.lambda, iterations: res.iterations })
}

/// Drops entries with |value| < ε; returns the kept vector and the ℓ² norm of the dropped part.
pub fn threshold(c: &CoefficientVector, eps: f64) -> (CoefficientVector, f64) {
    let mut kept = Vec::new();
    let mut dropped = 0.0;
    for (s, v) in c.iter() {
        if v.abs() < eps {
            dropped += v * v;
        } else {
            kept.push((s, v));
        }
    }
    (CoefficientVector::from_entries(c.len(), kept).expect("slots come from a valid vector"), dropped.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    /// Relaxation; `None` estimates 1/λ_max.
    pub omega: Option<f64>,
    /// ε₀ = eps0_factor · max|ω𝐟|, i.e. relative to the first iterate.
    pub eps0_factor: f64,
    /// ε_{i+1} = eps_ratio · ε_i
    pub eps_ratio: f64,
    /// Coarsening period K.
    pub period: usize,
    pub thresholding: bool,
    pub max_iter: usize,
    /// Stop once ‖𝐟 − 𝐋c‖ ≤ tol·‖𝐟‖.
    pub tol: f64,
    /// Consecutive residual increases that count as divergence.
    pub divergence_window: usize,
    pub power_tol: f64,
    pub power_max_iter: usize,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            omega: None,
            eps0_factor: 0.1,
            eps_ratio: 0.5,
            period: 5,
            thresholding: true,
            max_iter: 400,
            tol: 1e-3,
            divergence_window: 5,
            power_tol: 1e-5,
            power_max_iter: 1000,
            seed: 7,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.omega {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Config(format!("omega must be positive, got {w}")));
            }
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(Error::Config("eps_ratio must lie in (0, 1) so that thresholds decrease".into()));
        }
        if !(self.eps0_factor >= 0.0) || self.period == 0 || self.divergence_window == 0 {
            return Err(Error::Config("eps0_factor >= 0, period >= 1 and divergence_window >= 1 required".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config("tol must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub residual: f64,
    pub active_count: usize,
    pub h1_error: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveTrace {
    pub lambda_max: f64,
    pub omega: f64,
    pub rhs_norm: f64,
    pub records: Vec<TraceRecord>,
    pub status: SolveStatus,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub coefficients: CoefficientVector,
    pub solution: GridFunction,
    pub trace: SolveTrace,
}

pub fn solve(f: &GridFunction, frame: &HybridFrame, cfg: &SolveConfig, reference: Option<&GridFunction>) -> Result<SolveOutcome> {
    solve_observed(f, frame, cfg, reference, |_, _| {})
}

/// Damped Richardson c ← c + ω(𝐟 − 𝐋c) from c = 0, thresholded every K
/// iterations with a decreasing ε. `observe(iteration, u)` sees each
/// reconstruction. Divergence is reported through the trace status.
pub fn solve_observed(
    f: &GridFunction,
    frame: &HybridFrame,
    cfg: &SolveConfig,
    reference: Option<&GridFunction>,
    mut observe: impl FnMut(usize, &GridFunction),
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let op = DiscreteOperator::new(frame);
    let rhs = frame.analysis_l2_dense(f)?;
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ref_norm = reference.map(|r| inner_h1(r, r)).transpose()?.map(f64::sqrt);
    let h1_err = |u: &GridFunction| -> Result<Option<f64>> {
        match (reference, ref_norm) {
            (Some(r), Some(nr)) if nr > 0.0 => {
                let e = u.sub(r)?;
                Ok(Some(inner_h1(&e, &e)?.max(0.0).sqrt() / nr))
            }
            _ => Ok(None),
        }
    };
    let dim = frame.len();
    if rhs_norm == 0.0 {
        let u = GridFunction::zeros(f.n())?;
        let rec = TraceRecord { iteration: 1, residual: 0.0, active_count: 0, h1_error: h1_err(&u)?, seconds: start.elapsed().as_secs_f64() };
        observe(1, &u);
        return Ok(SolveOutcome {
            coefficients: CoefficientVector::empty(dim),
            solution: u,
            trace: SolveTrace { lambda_max: 0.0, omega: cfg.omega.unwrap_or(0.0), rhs_norm, records: vec![rec], status: SolveStatus::Converged },
        });
    }
    let (lambda_max, omega) = match cfg.omega {
        Some(w) => (f64::NAN, w),
        None => {
            let r = estimate_relaxation(&op, cfg.seed, cfg.power_tol, cfg.power_max_iter)?;
            (r.lambda_max, r.omega)
        }
    };
    let mut c = vec![0.0; dim];
    let mut r = rhs.clone();
    let mut eps = cfg.eps0_factor * omega * rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut records = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut increases = 0;
    let mut prev = rhs_norm;
    let mut u = GridFunction::zeros(f.n())?;
    for it in 1..=cfg.max_iter {
        c.iter_mut().zip(&r).for_each(|(c, r)| *c += omega * r);
        if cfg.thresholding && it % cfg.period == 0 {
            for v in c.iter_mut() {
                if v.abs() < eps {
                    *v = 0.0;
                }
            }
            eps *= cfg.eps_ratio;
        }
        let (lc, u_new) = op.apply_dense_with_u(&c)?;
        u = u_new;
        r = rhs.iter().zip(&lc).map(|(a, b)| a - b).collect();
        let res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let active = c.iter().filter(|v| **v != 0.0).count();
        records.push(TraceRecord { iteration: it, residual: res, active_count: active, h1_error: h1_err(&u)?, seconds: start.elapsed().as_secs_f64() });
        observe(it, &u);
        if !res.is_finite() {
            status = SolveStatus::Diverged;
            break;
        }
        increases = if res > prev { increases + 1 } else { 0 };
        prev = res;
        if increases >= cfg.divergence_window {
            status = SolveStatus::Diverged;
            break;
        }
        if res <= cfg.tol * rhs_norm {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(SolveOutcome {
        coefficients: CoefficientVector::from_dense(&c),
        solution: u,
        trace: SolveTrace { lambda_max, omega, rhs_norm, records, status },
    })
}

/// Largest |u| extrapolated to ∂Ω from the two outermost cell centres,
/// (3u₀ − u₁)/2 along each edge normal.
pub fn boundary_trace_max(u: &GridFunction) -> f64 {
    let n = u.n();
    let mut m: f64 = 0.0;
    for a in 0..n {
        for (v0, v1) in [
            (u.get(0, a), u.get(1, a)),
            (u.get(n - 1, a), u.get(n - 2, a)),
            (u.get(a, 0), u.get(a, 1)),
            (u.get(a, n - 1), u.get(a, n - 2)),
        ] {
            m = m.max((1.5 * v0 - 0.5 * v1).abs());
        }
    }
    m
}
