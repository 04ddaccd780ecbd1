//! Sine-spectral (DST-II) diagonalisation of the Dirichlet Laplacian. Used by
//! the reference-solution oracle and for fractional powers of (I − Δ) in frame
//! bound estimation; never on the production solve path.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{check_grid_size, GridFunction};
use crate::error::Result;

pub struct SineTransform {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SineTransform {
    pub fn new(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        let mut planner = FftPlanner::new();
        Ok(Self { n, fwd: planner.plan_fft_forward(2 * n), inv: planner.plan_fft_inverse(2 * n) })
    }

    /// `X[p−1] = Σ_m x[m]·sin(πp(2m+1)/(2n))`, p = 1..n.
    fn dst2(&self, x: &[f64], out: &mut [f64], buf: &mut [Complex64]) {
        let n = self.n;
        for m in 0..n {
            buf[m] = Complex64::new(x[m], 0.0);
            buf[2 * n - 1 - m] = Complex64::new(-x[m], 0.0);
        }
        self.fwd.process(buf);
        for p in 1..=n {
            let tw = Complex64::from_polar(0.5, -PI * p as f64 / (2 * n) as f64);
            out[p - 1] = (buf[p] * tw * Complex64::i()).re;
        }
    }

    /// Transpose of `dst2`: `x[m] = Σ_p c[p−1]·sin(πp(2m+1)/(2n))`.
    fn dst3(&self, c: &[f64], out: &mut [f64], buf: &mut [Complex64]) {
        let n = self.n;
        buf.iter_mut().for_each(|z| *z = Complex64::default());
        for p in 1..=n {
            buf[p] = Complex64::from_polar(c[p - 1], PI * p as f64 / (2 * n) as f64);
        }
        self.inv.process(buf);
        for m in 0..n {
            out[m] = buf[m].im;
        }
    }

    fn separable(&self, data: &mut [f64], f: impl Fn(&Self, &[f64], &mut [f64], &mut [Complex64])) {
        let n = self.n;
        let mut buf = vec![Complex64::default(); 2 * n];
        let mut line = vec![0.0; n];
        let mut res = vec![0.0; n];
        for i in 0..n {
            line.copy_from_slice(&data[i * n..(i + 1) * n]);
            f(self, &line, &mut res, &mut buf);
            data[i * n..(i + 1) * n].copy_from_slice(&res);
        }
        for k in 0..n {
            for i in 0..n {
                line[i] = data[i * n + k];
            }
            f(self, &line, &mut res, &mut buf);
            for i in 0..n {
                data[i * n + k] = res[i];
            }
        }
    }

    /// Applies `mult(p, q)` (p, q = 1..n) in the sine eigenbasis.
    pub fn apply(&self, f: &GridFunction, mult: impl Fn(usize, usize) -> f64) -> GridFunction {
        let n = self.n;
        assert_eq!(f.n(), n);
        let mut data = f.values().to_vec();
        self.separable(&mut data, Self::dst2);
        let w = |p: usize| if p == n { 1.0 / n as f64 } else { 2.0 / n as f64 };
        for p in 1..=n {
            for q in 1..=n {
                data[(p - 1) * n + q - 1] *= mult(p, q) * w(p) * w(q);
            }
        }
        self.separable(&mut data, Self::dst3);
        GridFunction::from_raw(n, data)
    }
}

/// Eigenvalue of the 1-D factor of −Δ (grid Laplacian) for sine mode p.
pub fn laplacian_eigenvalue(n: usize, p: usize) -> f64 {
    let s = (PI * p as f64 / (2 * n) as f64).sin();
    4.0 * (n * n) as f64 * s * s
}

/// `(I − Δ)^power f` through the exact eigen-decomposition of the grid Laplacian.
pub fn identity_minus_laplacian_power(st: &SineTransform, f: &GridFunction, power: f64) -> GridFunction {
    let n = f.n();
    let lam: Vec<f64> = (1..=n).map(|p| laplacian_eigenvalue(n, p)).collect();
    st.apply(f, |p, q| (1.0 + lam[p - 1] + lam[q - 1]).powf(power))
}

/// Solves `−Δu = f` exactly for the grid Laplacian.
pub fn poisson_solve(f: &GridFunction) -> Result<GridFunction> {
    let n = f.n();
    let st = SineTransform::new(n)?;
    let lam: Vec<f64> = (1..=n).map(|p| laplacian_eigenvalue(n, p)).collect();
    Ok(st.apply(f, |p, q| 1.0 / (lam[p - 1] + lam[q - 1])))
}
