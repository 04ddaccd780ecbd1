//! Cone-adapted, compactly supported shearlets built from tensor B-splines.
//!
//! Directional generator ψ(y) = B_{m₁}''(y₁/h)·B_{m₂}(y₂/h) (unit L² norm),
//! scaling generator φ = B_{m_φ}(x₁/h)·B_{m_φ}(x₂/h). The element for
//! (j, k, ι = 1) is 2^{3j/4} ψ(S_k A_j x); ι = −1 swaps the roles of x₁ and x₂.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_grid_size, ConvolutionPlan, GridFunction};
use crate::spline::{bspline, bspline_d2, bspline_d2_norm2, bspline_norm2};

pub fn scaling_matrix(j: i32) -> [[f64; 2]; 2] {
    [[2f64.powi(j), 0.0], [0.0, 2f64.powf(j as f64 / 2.0)]]
}

pub fn scaling_matrix_tilde(j: i32) -> [[f64; 2]; 2] {
    [[2f64.powf(j as f64 / 2.0), 0.0], [0.0, 2f64.powi(j)]]
}

pub fn shear_matrix(k: i32) -> [[f64; 2]; 2] {
    [[1.0, k as f64], [0.0, 1.0]]
}

pub fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            c[i][k] = a[i][0] * b[0][k] + a[i][1] * b[1][k];
        }
    }
    c
}

/// (j, k, ι) — a shearlet index without its translate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Direction {
    pub j: u32,
    pub k: i32,
    pub iota: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShearletIndex {
    pub j: u32,
    pub k: i32,
    pub iota: i8,
    pub m1: u32,
    pub m2: u32,
}

impl ShearletIndex {
    pub fn direction(&self) -> Direction {
        Direction { j: self.j, k: self.k, iota: self.iota }
    }
}

/// Shear bound 2^{⌈j/2⌉}.
pub fn shear_bound(j: u32) -> i32 {
    1 << j.div_ceil(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearletGenerator {
    /// ψ₁ = B''_{psi1_order}
    pub psi1_order: usize,
    /// ψ₂ = B_{psi2_order}
    pub psi2_order: usize,
    pub phi_order: usize,
    /// Base width h of the generator, a power-of-two reciprocal.
    pub base_width: f64,
    /// Translate sampling constants, in units of the element width at each scale.
    pub c: (f64, f64),
    pub alpha_sh: f64,
    pub beta_sh: f64,
}

impl Default for ShearletGenerator {
    fn default() -> Self {
        Self { psi1_order: 6, psi2_order: 4, phi_order: 4, base_width: 0.125, c: (1.0, 1.0), alpha_sh: 2.0, beta_sh: 4.0 }
    }
}

impl ShearletGenerator {
    pub fn validate(&self) -> Result<()> {
        if self.psi1_order < 3 || self.psi2_order < 1 || self.phi_order < 1 {
            return Err(Error::Config("spline orders too small (psi1 >= 3, psi2, phi >= 1)".into()));
        }
        let inv = 1.0 / self.base_width;
        if !(self.base_width > 0.0 && self.base_width <= 0.5) || (inv.round() - inv).abs() > 1e-12 || !(inv.round() as u64).is_power_of_two() {
            return Err(Error::Config(format!("base_width must be 2^-k with k >= 1, got {}", self.base_width)));
        }
        if !(self.c.0 > 0.0 && self.c.1 > 0.0) {
            return Err(Error::Config("sampling constants c must be positive".into()));
        }
        Ok(())
    }

    /// log₂(1/h) − 1: shearlet scale j has its frequency band at wavelet scale j + offset.
    pub fn scale_offset(&self) -> u32 {
        (1.0 / self.base_width).log2().round() as u32 - 1
    }

    /// Finest shearlet scale that keeps every ψ₁ period resolved on an n-grid: log₂(h·n).
    pub fn finest_scale(&self, n: usize) -> Option<u32> {
        let hn = self.base_width * n as f64;
        if hn < 1.0 {
            None
        } else {
            Some(hn.log2().floor() as u32)
        }
    }

    fn psi_norm(&self) -> f64 {
        (bspline_d2_norm2(self.psi1_order) * bspline_norm2(self.psi2_order)).sqrt()
    }

    /// Continuous element 2^{3j/4}ψ(S_k A_j x) (or φ) at offset x from its translate.
    pub fn element_value(&self, dir: Direction, x1: f64, x2: f64) -> f64 {
        let h = self.base_width;
        if dir.iota == 0 {
            let nrm = bspline_norm2(self.phi_order);
            return bspline(x1 / h, self.phi_order) * bspline(x2 / h, self.phi_order) / (h * nrm);
        }
        let (u1, u2) = if dir.iota == 1 { (x1, x2) } else { (x2, x1) };
        let j = dir.j as f64;
        let y2 = 2f64.powf(j / 2.0) * u2;
        let b2 = bspline(y2 / h, self.psi2_order);
        if b2 == 0.0 {
            return 0.0;
        }
        let y1 = 2f64.powf(j) * u1 + dir.k as f64 * y2;
        2f64.powf(0.75 * j) * bspline_d2(y1 / h, self.psi1_order) * b2 / (h * self.psi_norm())
    }

    /// Corners of the analytic support parallelogram, relative to the translate.
    pub fn support_vertices(&self, dir: Direction) -> [(f64, f64); 4] {
        let h = self.base_width;
        if dir.iota == 0 {
            let a = self.phi_order as f64 / 2.0 * h;
            return [(a, a), (-a, a), (a, -a), (-a, -a)];
        }
        let j = dir.j as f64;
        let a1 = self.psi1_order as f64 / 2.0 * h * 2f64.powf(-j);
        let a2 = self.psi2_order as f64 / 2.0 * h * 2f64.powf(-j / 2.0);
        let mut v = [(0.0, 0.0); 4];
        let mut idx = 0;
        for s2 in [-1.0, 1.0] {
            for s1 in [-1.0, 1.0] {
                let x2 = s2 * a2;
                let x1 = s1 * a1 - dir.k as f64 * 2f64.powf(-j / 2.0) * x2;
                v[idx] = if dir.iota == 1 { (x1, x2) } else { (x2, x1) };
                idx += 1;
            }
        }
        v
    }

    /// (lo₁, hi₁, lo₂, hi₂): extent of the support box below/above the translate.
    pub fn support_box(&self, dir: Direction) -> (f64, f64, f64, f64) {
        let v = self.support_vertices(dir);
        let lo1 = -v.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi1 = v.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let lo2 = -v.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi2 = v.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        (lo1, hi1, lo2, hi2)
    }

    /// Radius of the analytic support around the translate.
    pub fn analytic_radius(&self, dir: Direction) -> f64 {
        self.support_vertices(dir).iter().map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }

    /// Translate lattice steps (pixels) for a direction on an n-grid.
    pub fn lattice_steps(&self, dir: Direction, n: usize) -> (usize, usize) {
        let h = self.base_width;
        let nf = n as f64;
        if dir.iota == 0 {
            let s = floor_pow2(self.c.0 * h * nf);
            return (s, s);
        }
        let j = dir.j as f64;
        let s1 = floor_pow2(self.c.0 * h * 2f64.powf(-j) * nf);
        let s2 = floor_pow2(self.c.1 * h * 2f64.powf(-j / 2.0) * nf);
        if dir.iota == 1 {
            (s1, s2)
        } else {
            (s2, s1)
        }
    }
}

fn floor_pow2(x: f64) -> usize {
    if x < 2.0 {
        1
    } else {
        1usize << (x.log2().floor() as u32)
    }
}

/// ι = 0 layer plus both cones for j = 0..=J with |k| ≤ 2^{⌈j/2⌉}.
pub fn lambda_index_set(j_max: u32, n: usize) -> Result<Vec<Direction>> {
    check_grid_size(n)?;
    if (1usize << j_max) > n {
        return Err(Error::ScaleTooLarge { scale: j_max, n, constraint: "shearlet scales need 2^J <= n" });
    }
    let mut out = vec![Direction { j: 0, k: 0, iota: 0 }];
    for j in 0..=j_max {
        let b = shear_bound(j);
        for iota in [1i8, -1] {
            for k in -b..=b {
                out.push(Direction { j, k, iota });
            }
        }
    }
    Ok(out)
}

/// Samples of the element at wrapped offsets d/n, d ∈ (−n/2, n/2], normalised
/// to unit discrete L² norm. Index `[d₁·n + d₂]` with negative offsets wrapped.
pub fn digital_filter(dir: Direction, gen: &ShearletGenerator, n: usize) -> Result<Vec<f64>> {
    check_grid_size(n)?;
    let (lo1, hi1, lo2, hi2) = gen.support_box(dir);
    if lo1.max(hi1) >= 0.5 || lo2.max(hi2) >= 0.5 {
        return Err(Error::FilterWraps { j: dir.j, k: dir.k, iota: dir.iota });
    }
    let nf = n as f64;
    let off = |d: usize| if d > n / 2 { d as f64 - nf } else { d as f64 } / nf;
    let mut f = vec![0.0; n * n];
    for d1 in 0..n {
        let x1 = off(d1);
        if x1 < -lo1 || x1 > hi1 {
            continue;
        }
        for d2 in 0..n {
            let x2 = off(d2);
            if x2 < -lo2 || x2 > hi2 {
                continue;
            }
            f[d1 * n + d2] = gen.element_value(dir, x1, x2);
        }
    }
    let norm = (f.iter().map(|v| v * v).sum::<f64>() / (nf * nf)).sqrt();
    if norm == 0.0 {
        return Err(Error::ScaleTooLarge { scale: dir.j, n, constraint: "filter not resolved by the grid" });
    }
    f.iter_mut().for_each(|v| *v /= norm);
    Ok(f)
}

/// Discrete L² norm of the raw (unnormalised) samples; ≈ 1 when the grid resolves the element.
pub fn raw_filter_norm(dir: Direction, gen: &ShearletGenerator, n: usize) -> f64 {
    let nf = n as f64;
    let off = |d: usize| if d > n / 2 { d as f64 - nf } else { d as f64 } / nf;
    let mut s = 0.0;
    for d1 in 0..n {
        for d2 in 0..n {
            s += gen.element_value(dir, off(d1), off(d2)).powi(2);
        }
    }
    (s / (nf * nf)).sqrt()
}

/// Largest distance from the translate to a tap above 1e-12.
pub fn support_radius(filter: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    let off = |d: usize| if d > n / 2 { d as f64 - nf } else { d as f64 } / nf;
    let mut r: f64 = 0.0;
    for d1 in 0..n {
        for d2 in 0..n {
            if filter[d1 * n + d2].abs() > 1e-12 {
                r = r.max(off(d1).hypot(off(d2)));
            }
        }
    }
    r
}

#[derive(Clone, Debug)]
struct Channel {
    dir: Direction,
    spectrum: Vec<Complex64>,
}

/// The shearlet system over the full translate lattice of an n-grid.
#[derive(Clone, Debug)]
pub struct ShearletSystem {
    n: usize,
    j_max: u32,
    gen: ShearletGenerator,
    plan: ConvolutionPlan,
    channels: Vec<Channel>,
    skipped: Vec<Direction>,
}

impl ShearletSystem {
    /// Directions whose filters would wrap around the periodic grid are left
    /// out and reported by [`skipped`](Self::skipped).
    pub fn new(gen: &ShearletGenerator, j_max: u32, n: usize) -> Result<Self> {
        gen.validate()?;
        let finest = gen.finest_scale(n).ok_or(Error::ScaleTooLarge { scale: 0, n, constraint: "shearlets need h*n >= 1" })?;
        if j_max > finest {
            return Err(Error::ScaleTooLarge { scale: j_max, n, constraint: "shearlet scales need 2^J <= h*n" });
        }
        let plan = ConvolutionPlan::new(n)?;
        let dirs = lambda_index_set(j_max, n)?;
        let built: Vec<(Direction, Result<Vec<f64>>)> =
            dirs.par_iter().map(|&d| (d, digital_filter(d, gen, n))).collect();
        let mut channels = Vec::new();
        let mut skipped = Vec::new();
        for (dir, f) in built {
            match f {
                Ok(f) => channels.push(Channel { dir, spectrum: plan.spectrum(&f) }),
                Err(Error::FilterWraps { .. }) => skipped.push(dir),
                Err(e) => return Err(e),
            }
        }
        Ok(Self { n, j_max, gen: gen.clone(), plan, channels, skipped })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn j_max(&self) -> u32 {
        self.j_max
    }
    pub fn generator(&self) -> &ShearletGenerator {
        &self.gen
    }
    pub fn plan(&self) -> &ConvolutionPlan {
        &self.plan
    }
    pub fn directions(&self) -> Vec<Direction> {
        self.channels.iter().map(|c| c.dir).collect()
    }
    pub fn skipped(&self) -> &[Direction] {
        &self.skipped
    }
    pub fn channel_of(&self, dir: Direction) -> Option<usize> {
        self.channels.iter().position(|c| c.dir == dir)
    }

    pub fn filter(&self, dir: Direction) -> Result<Vec<f64>> {
        digital_filter(dir, &self.gen, self.n)
    }

    /// Per-direction coefficient planes `⟨f, ψ_{j,k,m,ι}⟩_{L²}` for every grid translate m.
    pub fn analysis(&self, f: &GridFunction) -> Result<Vec<GridFunction>> {
        if f.n() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: f.n() });
        }
        let n = self.n;
        let spec = self.plan.spectrum(f.values());
        let all: Vec<usize> = (0..self.channels.len()).collect();
        let planes = self.analysis_from_spectrum(&spec, &all);
        Ok(planes.into_iter().map(|p| GridFunction::from_raw(n, p)).collect())
    }

    /// Correlation planes for the channels in `subset` from a precomputed
    /// input spectrum, two channels per complex inverse transform.
    pub(crate) fn analysis_from_spectrum(&self, spec: &[Complex64], subset: &[usize]) -> Vec<Vec<f64>> {
        let n = self.n;
        let scale = 1.0 / (n * n) as f64;
        let pairs: Vec<&[usize]> = subset.chunks(2).collect();
        let out: Vec<Vec<Vec<f64>>> = pairs
            .par_iter()
            .map(|pair| {
                let mut z: Vec<Complex64> = match *pair {
                    [a, b] => {
                        let (ha, hb) = (&self.channels[*a].spectrum, &self.channels[*b].spectrum);
                        spec.iter()
                            .zip(ha.iter().zip(hb))
                            .map(|(s, (ha, hb))| s * (ha.conj() + Complex64::i() * hb.conj()))
                            .collect()
                    }
                    [a] => spec.iter().zip(&self.channels[*a].spectrum).map(|(s, ha)| s * ha.conj()).collect(),
                    _ => unreachable!(),
                };
                self.plan.inverse(&mut z);
                let re = z.iter().map(|v| v.re * scale).collect();
                if pair.len() == 2 {
                    vec![re, z.iter().map(|v| v.im * scale).collect()]
                } else {
                    vec![re]
                }
            })
            .collect();
        out.into_iter().flatten().collect()
    }

    /// Adjoint of [`analysis`](Self::analysis) under `inner_l2`: Σ_m c_m ψ_m.
    pub fn synthesis(&self, planes: &[GridFunction]) -> Result<GridFunction> {
        if planes.len() != self.channels.len() {
            return Err(Error::SizeMismatch { expected: self.channels.len(), found: planes.len() });
        }
        for p in planes {
            if p.n() != self.n {
                return Err(Error::SizeMismatch { expected: self.n, found: p.n() });
            }
        }
        let raw: Vec<(usize, &[f64])> = planes.iter().enumerate().map(|(i, p)| (i, p.values())).collect();
        Ok(self.synthesis_from_planes(&raw))
    }

    /// Σ over (channel, plane) pairs of plane ⊛ filter.
    pub(crate) fn synthesis_from_planes(&self, planes: &[(usize, &[f64])]) -> GridFunction {
        let n = self.n;
        let zero = || vec![Complex64::default(); n * n];
        let mut acc = planes
            .par_chunks(2)
            .map(|pair| {
                let mut acc = zero();
                match pair {
                    [(a, pa), (b, pb)] => {
                        let (sa, sb) = self.plan.spectrum_pair(pa, pb);
                        let (ha, hb) = (&self.channels[*a].spectrum, &self.channels[*b].spectrum);
                        for i in 0..n * n {
                            acc[i] = sa[i] * ha[i] + sb[i] * hb[i];
                        }
                    }
                    [(a, pa)] => {
                        let sa = self.plan.spectrum(pa);
                        let ha = &self.channels[*a].spectrum;
                        for i in 0..n * n {
                            acc[i] = sa[i] * ha[i];
                        }
                    }
                    _ => unreachable!(),
                }
                acc
            })
            .reduce(zero, |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            });
        self.plan.inverse(&mut acc);
        GridFunction::from_raw(n, acc.iter().map(|z| z.re).collect())
    }

    /// Samples of ψ_{j,k,m,ι} placed at translate m.
    pub fn element(&self, idx: &ShearletIndex) -> Result<GridFunction> {
        let n = self.n;
        let f = self.filter(idx.direction())?;
        let (m1, m2) = (idx.m1 as usize, idx.m2 as usize);
        let mut v = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                v[a * n + b] = f[((a + n - m1) % n) * n + (b + n - m2) % n];
            }
        }
        Ok(GridFunction::from_raw(n, v))
    }

    /// Largest analytic support radius times 2·2^{j/2}: the constant q_sh with
    /// supp ψ_{j,k,m,ι} ⊂ B_{q_sh 2^{−j/2}/2}(m) over all included directions.
    pub fn q_sh(&self) -> f64 {
        q_sh_constant(&self.gen, self.j_max)
    }
}

/// q_sh = max over directions up to `j_max` (excluding wrapping ones) of
/// 2·radius·2^{j/2}, so that supp ψ_{j,k,m,ι} ⊂ B_{q_sh 2^{−j/2}/2}(m).
pub fn q_sh_constant(gen: &ShearletGenerator, j_max: u32) -> f64 {
    let mut q: f64 = 0.0;
    for j in 0..=j_max {
        let b = shear_bound(j);
        for k in -b..=b {
            let dir = Direction { j, k, iota: 1 };
            let (lo1, hi1, lo2, hi2) = gen.support_box(dir);
            if lo1.max(hi1).max(lo2).max(hi2) >= 0.5 {
                continue;
            }
            q = q.max(2.0 * gen.analytic_radius(dir) * 2f64.powf(j as f64 / 2.0));
        }
    }
    q
}

/// Fitted Fourier envelope of the generator.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    /// Fitted exponent of |ψ̂₁(ξ)| ~ |ξ|^α near ξ = 0.
    pub alpha_fit: f64,
    /// Fitted decay exponents of ψ̂₁ and ψ̂₂ over |ξ| ∈ [1/h, n/2].
    pub beta_fit_psi1: f64,
    pub beta_fit_psi2: f64,
    /// sup |ψ̂| · max(1,|ξ₁|^β) max(1,|ξ₂|^β) / min(1,|ξ₁|^α) with the declared exponents.
    pub envelope_constant: f64,
    pub declared_alpha: f64,
    pub declared_beta: f64,
    pub holds: bool,
}

/// |∫ f(x) e^{−2πixξ} dx| by the midpoint rule over [−r, r].
fn fourier_magnitude(f: &dyn Fn(f64) -> f64, r: f64, xi: f64, steps: usize) -> f64 {
    let dx = 2.0 * r / steps as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..steps {
        let x = -r + (i as f64 + 0.5) * dx;
        let v = f(x);
        if v != 0.0 {
            let ph = -2.0 * std::f64::consts::PI * x * xi;
            re += v * ph.cos();
            im += v * ph.sin();
        }
    }
    (re * dx).hypot(im * dx)
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(1e-300).ln()).collect();
    crate::approx::least_squares(&lx, &ly).0
}

/// Scans |ψ̂| of the 1-D generator factors and fits the (α, β) envelope.
pub fn decay_envelope_check(gen: &ShearletGenerator, n: usize) -> DecayReport {
    let h = gen.base_width;
    let (m1, m2) = (gen.psi1_order, gen.psi2_order);
    let n1 = (h * bspline_d2_norm2(m1)).sqrt();
    let n2 = (h * bspline_norm2(m2)).sqrt();
    let psi1 = move |x: f64| bspline_d2(x / h, m1) / n1;
    let psi2 = move |x: f64| bspline(x / h, m2) / n2;
    let (r1, r2) = (m1 as f64 / 2.0 * h, m2 as f64 / 2.0 * h);
    let steps = 8192;
    let small: Vec<f64> = (0..12).map(|i| 1e-3 / h * 1.5f64.powi(i)).collect();
    let small_vals: Vec<f64> = small.iter().map(|&xi| fourier_magnitude(&psi1, r1, xi, steps)).collect();
    let alpha_fit = log_slope(&small, &small_vals);
    // Octave maxima of the spectrum from 1/h to n/2.
    let octave_max = |f: &dyn Fn(f64) -> f64, r: f64| -> (Vec<f64>, Vec<f64>) {
        let mut centres = Vec::new();
        let mut maxima = Vec::new();
        let mut lo = 1.0 / h;
        while lo * 2.0 <= n as f64 / 2.0 + 1e-9 {
            // Fit against where the maximum sits: side lobes do not sit at octave centres.
            let (at, m) = (0..64)
                .map(|i| lo * (1.0 + i as f64 / 64.0))
                .map(|xi| (xi, fourier_magnitude(f, r, xi, steps)))
                .fold((lo, 0.0), |best, c| if c.1 > best.1 { c } else { best });
            centres.push(at);
            maxima.push(m);
            lo *= 2.0;
        }
        (centres, maxima)
    };
    let (c1, v1) = octave_max(&psi1, r1);
    let (c2, v2) = octave_max(&psi2, r2);
    let beta_fit_psi1 = if c1.len() >= 2 { -log_slope(&c1, &v1) } else { f64::NAN };
    let beta_fit_psi2 = if c2.len() >= 2 { -log_slope(&c2, &v2) } else { f64::NAN };
    let (a, b) = (gen.alpha_sh, gen.beta_sh);
    let mut env: f64 = 0.0;
    let grid: Vec<f64> = (0..200).map(|i| 1e-3 * (n as f64 / 2e-3).powf(i as f64 / 199.0)).collect();
    let f1: Vec<f64> = grid.iter().map(|&x| fourier_magnitude(&psi1, r1, x, steps)).collect();
    let f2: Vec<f64> = grid.iter().map(|&x| fourier_magnitude(&psi2, r2, x, steps)).collect();
    for (i, &x1) in grid.iter().enumerate() {
        let w1 = 1f64.max(x1.powf(b)) / 1f64.min(x1.powf(a));
        for (k, &x2) in grid.iter().enumerate() {
            env = env.max(f1[i] * f2[k] * w1 * 1f64.max(x2.powf(b)));
        }
    }
    let holds = env.is_finite()
        && alpha_fit >= a - 0.1
        && beta_fit_psi1 >= b - 0.25
        && beta_fit_psi2 >= b - 0.25;
    DecayReport { alpha_fit, beta_fit_psi1, beta_fit_psi2, envelope_constant: env, declared_alpha: a, declared_beta: b, holds }
}
