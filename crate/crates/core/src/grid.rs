//! Cell-centred grid functions on (0,1)², the discrete Laplacian, discrete
//! inner products and FFT-based circular convolution.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// `n × n` samples at the cell centres `((i+½)/n, (k+½)/n)`, stored row-major
/// with `i` (the x₁ index) as the row.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    n: usize,
    values: Vec<f64>,
}

pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= 4 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGridSize(n))
    }
}

/// Cell-centre coordinate of index `i` on an `n`-grid.
#[inline]
pub fn coord(n: usize, i: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

impl GridFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_grid_size(n)?;
        if values.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        Ok(Self { n, values: vec![0.0; n * n] })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_grid_size(n)?;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                values.push(f(coord(n, i), coord(n, k)));
            }
        }
        Self::new(n, values)
    }

    /// Unchecked constructor for values produced by this crate's own kernels.
    pub(crate) fn from_raw(n: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n * n);
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.n + k]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.n, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    /// `self + a·other`
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        same_size(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Ok(Self::from_raw(self.n, values))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Discrete L² norm, `sqrt(inner_l2(f, f))`.
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / (self.n * self.n) as f64).sqrt()
    }

    /// Largest magnitude over the outermost ring of cells.
    pub fn boundary_max_abs(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for a in 0..n {
            for (i, k) in [(0, a), (n - 1, a), (a, 0), (a, n - 1)] {
                m = m.max(self.get(i, k).abs());
            }
        }
        m
    }
}

fn same_size(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.n != g.n {
        return Err(Error::SizeMismatch { expected: f.n, found: g.n });
    }
    Ok(())
}

/// Five-point Laplacian scaled by n². Ghost cells outside Ω carry the negated
/// boundary value, which places the homogeneous Dirichlet condition exactly on
/// ∂Ω (half a cell from the outermost centres). The stencil is symmetric and
/// diagonalised by the DST-II basis.
pub fn laplacian(f: &GridFunction) -> GridFunction {
    let n = f.n;
    let s = (n * n) as f64;
    let v = &f.values;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let c = v[i * n + k];
            let up = if i > 0 { v[(i - 1) * n + k] } else { -c };
            let down = if i + 1 < n { v[(i + 1) * n + k] } else { -c };
            let left = if k > 0 { v[i * n + k - 1] } else { -c };
            let right = if k + 1 < n { v[i * n + k + 1] } else { -c };
            out[i * n + k] = s * (up + down + left + right - 4.0 * c);
        }
    }
    GridFunction::from_raw(n, out)
}

/// `f − Δf`
pub fn identity_minus_laplacian(f: &GridFunction) -> GridFunction {
    let lap = laplacian(f);
    let values = f.values.iter().zip(lap.values).map(|(a, b)| a - b).collect();
    GridFunction::from_raw(f.n, values)
}

pub fn inner_l2(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    same_size(f, g)?;
    let s: f64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum();
    Ok(s / (f.n * f.n) as f64)
}

/// `inner_l2(f, g − Δg)`
pub fn inner_h1(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    same_size(f, g)?;
    inner_l2(f, &identity_minus_laplacian(g))
}

pub fn norm_h1(f: &GridFunction) -> f64 {
    inner_h1(f, f).unwrap_or(0.0).max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Centred difference scaled by n (n/2 per two-cell span); one-sided at the
/// first and last row/column along `axis`.
pub fn partial_diff(f: &GridFunction, axis: Axis) -> GridFunction {
    let n = f.n;
    let nf = n as f64;
    let (si, sk) = match axis {
        Axis::X1 => (n, 1),
        Axis::X2 => (1, n),
    };
    let v = &f.values;
    let mut out = vec![0.0; n * n];
    for line in 0..n {
        let base = line * sk;
        let at = |a: usize| v[base + a * si];
        for a in 0..n {
            let d = if a == 0 {
                (at(1) - at(0)) * nf
            } else if a == n - 1 {
                (at(n - 1) - at(n - 2)) * nf
            } else {
                (at(a + 1) - at(a - 1)) * nf / 2.0
            };
            out[base + a * si] = d;
        }
    }
    GridFunction::from_raw(n, out)
}

/// Cached 2-D FFT for one grid size. Shareable read-only across threads.
#[derive(Clone)]
pub struct ConvolutionPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ConvolutionPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvolutionPlan").field("n", &self.n).finish()
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for k in i + 1..n {
            data.swap(i * n + k, k * n + i);
        }
    }
}

impl ConvolutionPlan {
    pub fn new(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        let mut planner = FftPlanner::new();
        Ok(Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn pass(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
    }

    /// Unnormalised forward 2-D DFT in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n * self.n);
        self.pass(&self.fwd, data);
    }

    /// Inverse 2-D DFT in place, normalised so that `inverse(forward(x)) = x`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n * self.n);
        self.pass(&self.inv, data);
        let s = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn spectrum(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut data);
        data
    }

    /// Spectra of two real arrays with one complex transform.
    pub fn spectrum_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.forward(&mut z);
        let mut sa = vec![Complex64::default(); n * n];
        let mut sb = vec![Complex64::default(); n * n];
        for i in 0..n {
            let ni = (n - i) % n;
            for k in 0..n {
                let nk = (n - k) % n;
                let p = z[i * n + k];
                let q = z[ni * n + nk].conj();
                sa[i * n + k] = (p + q) * 0.5;
                sb[i * n + k] = (p - q) * Complex64::new(0.0, -0.5);
            }
        }
        (sa, sb)
    }
}

/// Circular convolution `(f ⊛ w)[a] = Σ_b f[b]·w[a−b]` with indices taken mod n.
pub fn convolve(f: &GridFunction, filter: &[f64], plan: &ConvolutionPlan) -> Result<GridFunction> {
    let n = plan.n;
    if f.n != n {
        return Err(Error::SizeMismatch { expected: n, found: f.n });
    }
    if filter.len() != n * n {
        return Err(Error::SizeMismatch { expected: n * n, found: filter.len() });
    }
    let (sf, sw) = plan.spectrum_pair(&f.values, filter);
    let mut prod: Vec<Complex64> = sf.iter().zip(&sw).map(|(a, b)| a * b).collect();
    plan.inverse(&mut prod);
    Ok(GridFunction::from_raw(n, prod.iter().map(|z| z.re).collect()))
}

/// `w̃[d] = w[−d]`, the point reflection used to turn correlation into convolution.
pub fn reversed(filter: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            out[((n - i) % n) * n + (n - k) % n] = filter[i * n + k];
        }
    }
    out
}
