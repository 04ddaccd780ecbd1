//! Cartoon-like functions f₁ + χ_B f₂ with a star-shaped jump set, and the
//! disc experiment (g = χ_{B_{1/6}(0.5)}, f = D₁g + D₂g).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_grid_size, partial_diff, Axis, GridFunction};
use crate::spectral::poisson_solve;

/// One term ε·cos(i·θ + φ) of the radius function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub i: u32,
    pub eps: f64,
    pub phase: f64,
}

/// Closed-form C² pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothPart {
    Zero,
    Constant { value: f64 },
    /// a·(1 − |x−c|²/R²)³ inside the ball, 0 outside (C²).
    Bump { center: (f64, f64), radius: f64, amplitude: f64 },
    /// a·sin(πk₁x₁)·sin(πk₂x₂)
    Sine { amplitude: f64, k1: u32, k2: u32 },
    /// a + b·x₁ + c·x₂
    Affine { a: f64, b: f64, c: f64 },
}

impl SmoothPart {
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match *self {
            SmoothPart::Zero => 0.0,
            SmoothPart::Constant { value } => value,
            SmoothPart::Bump { center, radius, amplitude } => {
                let r2 = ((x1 - center.0).powi(2) + (x2 - center.1).powi(2)) / (radius * radius);
                if r2 < 1.0 {
                    amplitude * (1.0 - r2).powi(3)
                } else {
                    0.0
                }
            }
            SmoothPart::Sine { amplitude, k1, k2 } => {
                amplitude * (PI * k1 as f64 * x1).sin() * (PI * k2 as f64 * x2).sin()
            }
            SmoothPart::Affine { a, b, c } => a + b * x1 + c * x2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartoonSpec {
    pub center: (f64, f64),
    /// ρ(θ) = r₀·(1 + Σ ε_i cos(iθ + φ_i))
    pub r0: f64,
    #[serde(default)]
    pub lobes: Vec<Lobe>,
    /// Declared curvature bound ν.
    pub nu: f64,
    pub f1: SmoothPart,
    pub f2: SmoothPart,
    /// Allowed number of intersections of ∂B with ∂Ω.
    #[serde(default)]
    pub max_boundary_intersections: u32,
}

impl CartoonSpec {
    /// Indicator of the disc B_r(c).
    pub fn disc(center: (f64, f64), r: f64) -> Self {
        Self {
            center,
            r0: r,
            lobes: Vec::new(),
            nu: 1.0 / r,
            f1: SmoothPart::Zero,
            f2: SmoothPart::Constant { value: 1.0 },
            max_boundary_intersections: 0,
        }
    }

    /// (ρ, ρ′, ρ″) at θ.
    pub fn radius(&self, theta: f64) -> (f64, f64, f64) {
        let (mut s, mut d1, mut d2) = (1.0, 0.0, 0.0);
        for l in &self.lobes {
            let i = l.i as f64;
            let a = i * theta + l.phase;
            s += l.eps * a.cos();
            d1 -= l.eps * i * a.sin();
            d2 -= l.eps * i * i * a.cos();
        }
        (self.r0 * s, self.r0 * d1, self.r0 * d2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) {
            return Err(Error::Config(format!("r0 must be positive, got {}", self.r0)));
        }
        let min = (0..4096).map(|i| self.radius(2.0 * PI * i as f64 / 4096.0).0).fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::Config(format!("radius function is not positive (min {min})")));
        }
        Ok(())
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        let (d1, d2) = (x1 - self.center.0, x2 - self.center.1);
        let r = d1.hypot(d2);
        if r == 0.0 {
            return true;
        }
        r < self.radius(d2.atan2(d1)).0
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let inside = if self.contains(x1, x2) { self.f2.eval(x1, x2) } else { 0.0 };
        self.f1.eval(x1, x2) + inside
    }
}

/// Point samples at cell centres (no antialiasing).
pub fn sample_cartoon(spec: &CartoonSpec, n: usize) -> Result<GridFunction> {
    spec.validate()?;
    GridFunction::from_fn(n, |x1, x2| spec.eval(x1, x2))
}

/// max_θ |ρ² + 2ρ′² − ρρ″| / (ρ² + ρ′²)^{3/2} on a 4096-point θ grid.
pub fn curvature_check(spec: &CartoonSpec) -> f64 {
    (0..4096)
        .map(|i| {
            let (r, d1, d2) = spec.radius(2.0 * PI * i as f64 / 4096.0);
            (r * r + 2.0 * d1 * d1 - r * d2).abs() / (r * r + d1 * d1).powf(1.5)
        })
        .fold(0.0, f64::max)
}

pub fn experiment_disc() -> CartoonSpec {
    CartoonSpec::disc((0.5, 0.5), 1.0 / 6.0)
}

/// Indicator with its jump smeared over `width` by a C¹ cubic ramp in the
/// radial distance; for sensitivity studies only.
pub fn mollified_disc(n: usize, width: f64) -> Result<GridFunction> {
    let r0 = 1.0 / 6.0;
    GridFunction::from_fn(n, |x1, x2| {
        let d = (r0 - (x1 - 0.5).hypot(x2 - 0.5)) / width + 0.5;
        let t = d.clamp(0.0, 1.0);
        t * t * (3.0 - 2.0 * t)
    })
}

/// (g, f) with g the disc indicator and f = D₁g + D₂g. `mollify` replaces the
/// sharp indicator by [`mollified_disc`] with the given width.
pub fn experiment_rhs_with(n: usize, mollify: Option<f64>) -> Result<(GridFunction, GridFunction)> {
    check_grid_size(n)?;
    let g = match mollify {
        Some(w) => mollified_disc(n, w)?,
        None => sample_cartoon(&experiment_disc(), n)?,
    };
    let f = partial_diff(&g, Axis::X1).add(&partial_diff(&g, Axis::X2))?;
    Ok((g, f))
}

pub fn experiment_rhs(n: usize) -> Result<(GridFunction, GridFunction)> {
    experiment_rhs_with(n, None)
}

/// Piecewise-constant prolongation by an integer factor.
pub fn prolong(f: &GridFunction, factor: usize) -> Result<GridFunction> {
    let n = f.n();
    let m = n * factor;
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            v[i * m + k] = f.get(i / factor, k / factor);
        }
    }
    GridFunction::new(m, v)
}

/// Block-average restriction by an integer factor.
pub fn restrict(f: &GridFunction, factor: usize) -> Result<GridFunction> {
    let m = f.n();
    let n = m / factor;
    let mut v = vec![0.0; n * n];
    for i in 0..m {
        for k in 0..m {
            v[(i / factor) * n + k / factor] += f.get(i, k);
        }
    }
    let s = 1.0 / (factor * factor) as f64;
    v.iter_mut().for_each(|x| *x *= s);
    GridFunction::new(n, v)
}

/// Oracle for −Δu = f with homogeneous Dirichlet data: exact sine-spectral
/// solve of the grid Laplacian at 4× resolution (f prolonged piecewise
/// constant), block-averaged back to the working grid.
pub fn reference_solution(f: &GridFunction) -> Result<GridFunction> {
    let fine = prolong(f, 4)?;
    restrict(&poisson_solve(&fine)?, 4)
}

/// Reference solution of the disc experiment with the right-hand side built
/// directly at 4× resolution (the jump is resolved there, not prolonged).
pub fn experiment_solution(n: usize) -> Result<GridFunction> {
    check_grid_size(n)?;
    let (_, f_fine) = experiment_rhs(4 * n)?;
    restrict(&poisson_solve(&f_fine)?, 4)
}
