//! Folded (odd-periodic) Daubechies wavelets on (0,1)².
//!
//! A grid function is extended oddly across every edge of the square to a
//! 2n×2n periodic image and analysed with the periodic orthogonal transform.
//! Every resulting element restricted to Ω vanishes on ∂Ω, the system is a
//! Parseval frame for the grid (redundancy 4), and scale `j` carries
//! `4·2^{2j}` translates per type.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_grid_size, identity_minus_laplacian, GridFunction};

const DB2: [f64; 4] = [
    0.48296291314453414337,
    0.83651630373780790558,
    0.22414386804201338103,
    -0.12940952255126038117,
];
const DB3: [f64; 6] = [
    0.332670552950082616,
    0.80689150931109257649,
    0.4598775021184915701,
    -0.1350110200102545887,
    -0.085441273882026661693,
    0.035226291885709536603,
];
const DB4: [f64; 8] = [
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
];

/// Daubechies low-pass taps with `p` vanishing moments (p ∈ {2,3,4}).
pub fn daubechies(p: usize) -> Result<Vec<f64>> {
    match p {
        2 => Ok(DB2.to_vec()),
        3 => Ok(DB3.to_vec()),
        4 => Ok(DB4.to_vec()),
        _ => Err(Error::Config(format!("no built-in Daubechies filter with p = {p} (use 2, 3 or 4)"))),
    }
}

/// Quadrature-mirror high-pass `g[k] = (−1)^k h[L−1−k]`.
pub fn high_pass(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect()
}

/// Reads low-pass taps from a whitespace-separated column file (`#` comments allowed).
pub fn taps_from_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut taps = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for tok in line.split_whitespace() {
            taps.push(tok.parse::<f64>().map_err(|e| Error::Format(format!("{tok}: {e}")))?);
        }
    }
    check_orthogonal(&taps)?;
    Ok(taps)
}

fn check_orthogonal(h: &[f64]) -> Result<()> {
    if h.len() < 2 || h.len() % 2 != 0 {
        return Err(Error::Config("filter length must be even and >= 2".into()));
    }
    let sum: f64 = h.iter().sum();
    if (sum - std::f64::consts::SQRT_2).abs() > 1e-8 {
        return Err(Error::Config(format!("taps sum to {sum}, expected sqrt(2)")));
    }
    for shift in (0..h.len()).step_by(2) {
        let s: f64 = (0..h.len() - shift).map(|k| h[k] * h[k + shift]).sum();
        let want = if shift == 0 { 1.0 } else { 0.0 };
        if (s - want).abs() > 1e-8 {
            return Err(Error::Config(format!("taps not orthogonal at shift {shift}")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub j: u32,
    pub m1: u32,
    pub m2: u32,
    /// 0 = scaling type (only at J₀); 1 = high-pass along x₁, 2 = along x₂, 3 = both.
    pub v: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSystemConfig {
    pub j0: u32,
    /// Finest scale; `None` means the finest the grid supports (log₂n − 1).
    #[serde(default)]
    pub j_max: Option<u32>,
    pub p: usize,
    /// Custom orthogonal low-pass taps; overrides the Daubechies filter for `p`.
    #[serde(default)]
    pub taps: Option<Vec<f64>>,
}

impl Default for WaveletSystemConfig {
    fn default() -> Self {
        Self { j0: 1, j_max: None, p: 3, taps: None }
    }
}

impl WaveletSystemConfig {
    pub fn low_pass(&self) -> Result<Vec<f64>> {
        if self.p < 2 {
            return Err(Error::Config("wavelet p must be >= 2".into()));
        }
        match &self.taps {
            Some(t) => {
                check_orthogonal(t)?;
                Ok(t.clone())
            }
            None => daubechies(self.p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Band {
    pub j: u32,
    pub v: u8,
    /// translates per axis (2^{j+1})
    pub size: usize,
    pub offset: usize,
}

#[derive(Clone, Debug)]
pub struct WaveletSystem {
    n: usize,
    levels: u32,
    j0: u32,
    j_max: u32,
    p: usize,
    h: Vec<f64>,
    g: Vec<f64>,
    bands: Vec<Band>,
    total: usize,
}

impl WaveletSystem {
    pub fn new(cfg: &WaveletSystemConfig, n: usize) -> Result<Self> {
        check_grid_size(n)?;
        let h = cfg.low_pass()?;
        let levels = n.trailing_zeros();
        let finest = levels - 1;
        let j_max = cfg.j_max.unwrap_or(finest);
        if j_max > finest {
            return Err(Error::ScaleTooLarge { scale: j_max, n, constraint: "wavelet scales need 2^(J+1) <= n" });
        }
        if cfg.j0 > j_max {
            return Err(Error::Config(format!("J0 = {} exceeds J = {}", cfg.j0, j_max)));
        }
        let p = h.len() / 2;
        let mut bands = Vec::new();
        let mut offset = 0;
        let mut push = |j: u32, v: u8| {
            let size = 1usize << (j + 1);
            bands.push(Band { j, v, size, offset });
            offset += size * size;
        };
        push(cfg.j0, 0);
        for j in cfg.j0..=j_max {
            for v in 1..=3 {
                push(j, v);
            }
        }
        let g = high_pass(&h);
        Ok(Self { n, levels, j0: cfg.j0, j_max, p, h, g, bands, total: offset })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn j0(&self) -> u32 {
        self.j0
    }
    pub fn j_max(&self) -> u32 {
        self.j_max
    }
    /// Vanishing moments of the generator (half the filter length).
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn low_pass(&self) -> &[f64] {
        &self.h
    }
    pub fn high_pass(&self) -> &[f64] {
        &self.g
    }
    pub fn bands(&self) -> &[Band] {
        &self.bands
    }
    pub fn len(&self) -> usize {
        self.total
    }
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn band(&self, j: u32, v: u8) -> Option<&Band> {
        self.bands.iter().find(|b| b.j == j && b.v == v)
    }

    pub fn position(&self, idx: &WaveletIndex) -> Result<usize> {
        let b = self.band(idx.j, idx.v).ok_or_else(|| Error::UnknownIndex(format!("{idx:?}")))?;
        let (m1, m2) = (idx.m1 as usize, idx.m2 as usize);
        if m1 >= b.size || m2 >= b.size {
            return Err(Error::UnknownIndex(format!("{idx:?}")));
        }
        Ok(b.offset + m1 * b.size + m2)
    }

    pub fn index(&self, pos: usize) -> WaveletIndex {
        let b = self.bands.iter().rev().find(|b| b.offset <= pos).expect("position out of range");
        let r = pos - b.offset;
        WaveletIndex { j: b.j, m1: (r / b.size) as u32, m2: (r % b.size) as u32, v: b.v }
    }

    pub fn indices(&self) -> Vec<WaveletIndex> {
        (0..self.total).map(|p| self.index(p)).collect()
    }

    /// Support constant q with supp ω_{j,m,υ} ⊂ B_{q·2^{-j}}(m) per axis: (2p−1)/2.
    pub fn support_constant(&self) -> f64 {
        (2 * self.p - 1) as f64 / 2.0
    }

    /// Exact per-axis support half-width of a level-j element.
    pub fn support_radius(&self, j: u32) -> f64 {
        let d = (self.levels - j) as i32;
        let taps = (2 * self.p - 1) as f64;
        (taps * (2f64.powi(d) - 1.0) / 2.0 + 0.5) / self.n as f64
    }

    /// Centre of translate `m` at scale `j` along one axis, on the unfolded
    /// period [0, 2).
    pub fn unfolded_center(&self, j: u32, m: u32) -> f64 {
        let d = 2f64.powi((self.levels - j) as i32);
        let taps = (2 * self.p - 1) as f64;
        let c = d * m as f64 + taps * (d - 1.0) / 2.0;
        ((c + 0.5) / self.n as f64).rem_euclid(2.0)
    }

    /// Centre of translate `m` folded into [0, 1].
    pub fn center_1d(&self, j: u32, m: u32) -> f64 {
        fold(self.unfolded_center(j, m))
    }

    pub fn center(&self, idx: &WaveletIndex) -> (f64, f64) {
        (self.center_1d(idx.j, idx.m1), self.center_1d(idx.j, idx.m2))
    }

    /// `⟨f, ω_{j,m,υ}⟩_{L²}` for every index of Θ.
    pub fn analysis(&self, f: &GridFunction) -> Result<Vec<f64>> {
        self.check(f)?;
        let n = self.n;
        let big = 2 * n;
        let mut cur = odd_extension(f.values(), n);
        let s = 0.5 / n as f64;
        cur.iter_mut().for_each(|v| *v *= s);
        let mut out = vec![0.0; self.total];
        let mut size = big;
        for j in (self.j0..self.levels).rev() {
            let (lo_r, hi_r) = dwt_rows(&cur, size, &self.h, &self.g);
            let (ll, gl) = dwt_cols(&lo_r, size, size / 2, &self.h, &self.g);
            let (lg, gg) = dwt_cols(&hi_r, size, size / 2, &self.h, &self.g);
            if j <= self.j_max {
                for (v, data) in [(1u8, &gl), (2, &lg), (3, &gg)] {
                    let b = self.band(j, v).unwrap();
                    out[b.offset..b.offset + b.size * b.size].copy_from_slice(data);
                }
            }
            cur = ll;
            size /= 2;
        }
        let b = self.bands[0];
        out[b.offset..b.offset + b.size * b.size].copy_from_slice(&cur);
        Ok(out)
    }

    /// Adjoint of [`analysis`](Self::analysis) with respect to `inner_l2`.
    pub fn synthesis(&self, c: &[f64]) -> Result<GridFunction> {
        if c.len() != self.total {
            return Err(Error::SizeMismatch { expected: self.total, found: c.len() });
        }
        let n = self.n;
        let b0 = self.bands[0];
        let mut cur = c[b0.offset..b0.offset + b0.size * b0.size].to_vec();
        let mut size = b0.size;
        for j in self.j0..self.levels {
            let half = size;
            let band = |v: u8| -> Vec<f64> {
                match self.band(j, v) {
                    Some(b) if j <= self.j_max => c[b.offset..b.offset + b.size * b.size].to_vec(),
                    _ => vec![0.0; half * half],
                }
            };
            let lo_r = idwt_cols(&cur, &band(1), 2 * half, half, &self.h, &self.g);
            let hi_r = idwt_cols(&band(2), &band(3), 2 * half, half, &self.h, &self.g);
            cur = idwt_rows(&lo_r, &hi_r, 2 * half, &self.h, &self.g);
            size = 2 * half;
        }
        debug_assert_eq!(size, 2 * n);
        let mut values = odd_extension_adjoint(&cur, n);
        let s = 0.5 * n as f64;
        values.iter_mut().for_each(|v| *v *= s);
        Ok(GridFunction::from_raw(n, values))
    }

    /// Analysis of `f − Δf`: the H¹ pairing for elements vanishing on ∂Ω.
    pub fn h1_analysis(&self, f: &GridFunction) -> Result<Vec<f64>> {
        self.check(f)?;
        self.analysis(&identity_minus_laplacian(f))
    }

    /// Samples of a single element.
    pub fn element(&self, idx: &WaveletIndex) -> Result<GridFunction> {
        let mut c = vec![0.0; self.total];
        c[self.position(idx)?] = 1.0;
        self.synthesis(&c)
    }

    /// Max over degrees < p of |Σ_k g[k]·k^d| for the high-pass filter.
    pub fn vanishing_moments_check(&self) -> f64 {
        discrete_moments(&self.g, self.p).into_iter().fold(0.0, f64::max)
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: f.n() });
        }
        Ok(())
    }
}

/// `|Σ_k taps[k]·k^d|` for d = 0..degrees.
pub fn discrete_moments(taps: &[f64], degrees: usize) -> Vec<f64> {
    (0..degrees)
        .map(|d| taps.iter().enumerate().map(|(k, t)| t * (k as f64).powi(d as i32)).sum::<f64>().abs())
        .collect()
}

/// Enumerates Θ up to the configured finest scale.
pub fn theta_index_set(cfg: &WaveletSystemConfig, n: usize) -> Result<Vec<WaveletIndex>> {
    Ok(WaveletSystem::new(cfg, n)?.indices())
}

fn fold(x: f64) -> f64 {
    if x > 1.0 {
        2.0 - x
    } else {
        x
    }
}

/// 2n×2n image: f in the first quadrant, mirrored with a sign flip across
/// each edge (the odd extension on the period [0,2)²).
pub fn odd_extension(f: &[f64], n: usize) -> Vec<f64> {
    let big = 2 * n;
    let mut e = vec![0.0; big * big];
    for i in 0..n {
        for k in 0..n {
            let v = f[i * n + k];
            let (ri, rk) = (big - 1 - i, big - 1 - k);
            e[i * big + k] = v;
            e[ri * big + k] = -v;
            e[i * big + rk] = -v;
            e[ri * big + rk] = v;
        }
    }
    e
}

pub fn odd_extension_adjoint(e: &[f64], n: usize) -> Vec<f64> {
    let big = 2 * n;
    let mut f = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let (ri, rk) = (big - 1 - i, big - 1 - k);
            f[i * n + k] = e[i * big + k] - e[ri * big + k] - e[i * big + rk] + e[ri * big + rk];
        }
    }
    f
}

fn analyze_line(x: &[f64], h: &[f64], g: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let len = x.len();
    for m in 0..len / 2 {
        let (mut a, mut b) = (0.0, 0.0);
        for t in 0..h.len() {
            let v = x[(2 * m + t) % len];
            a += h[t] * v;
            b += g[t] * v;
        }
        lo[m] = a;
        hi[m] = b;
    }
}

fn synthesize_line(lo: &[f64], hi: &[f64], h: &[f64], g: &[f64], x: &mut [f64]) {
    let len = x.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    for m in 0..len / 2 {
        for t in 0..h.len() {
            x[(2 * m + t) % len] += h[t] * lo[m] + g[t] * hi[m];
        }
    }
}

/// Filters each row (length `size`) of a size×size image along x₂.
fn dwt_rows(data: &[f64], size: usize, h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let half = size / 2;
    let mut lo = vec![0.0; size * half];
    let mut hi = vec![0.0; size * half];
    for i in 0..size {
        analyze_line(
            &data[i * size..(i + 1) * size],
            h,
            g,
            &mut lo[i * half..(i + 1) * half],
            &mut hi[i * half..(i + 1) * half],
        );
    }
    (lo, hi)
}

/// Filters each column (length `rows`) of a rows×cols image along x₁.
fn dwt_cols(data: &[f64], rows: usize, cols: usize, h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let half = rows / 2;
    let mut lo = vec![0.0; half * cols];
    let mut hi = vec![0.0; half * cols];
    let mut line = vec![0.0; rows];
    let (mut a, mut b) = (vec![0.0; half], vec![0.0; half]);
    for k in 0..cols {
        for i in 0..rows {
            line[i] = data[i * cols + k];
        }
        analyze_line(&line, h, g, &mut a, &mut b);
        for m in 0..half {
            lo[m * cols + k] = a[m];
            hi[m * cols + k] = b[m];
        }
    }
    (lo, hi)
}

fn idwt_cols(lo: &[f64], hi: &[f64], rows: usize, cols: usize, h: &[f64], g: &[f64]) -> Vec<f64> {
    let half = rows / 2;
    let mut out = vec![0.0; rows * cols];
    let (mut a, mut b) = (vec![0.0; half], vec![0.0; half]);
    let mut line = vec![0.0; rows];
    for k in 0..cols {
        for m in 0..half {
            a[m] = lo[m * cols + k];
            b[m] = hi[m * cols + k];
        }
        synthesize_line(&a, &b, h, g, &mut line);
        for i in 0..rows {
            out[i * cols + k] = line[i];
        }
    }
    out
}

fn idwt_rows(lo: &[f64], hi: &[f64], size: usize, h: &[f64], g: &[f64]) -> Vec<f64> {
    let half = size / 2;
    let mut out = vec![0.0; size * size];
    for i in 0..size {
        synthesize_line(
            &lo[i * half..(i + 1) * half],
            &hi[i * half..(i + 1) * half],
            h,
            g,
            &mut out[i * size..(i + 1) * size],
        );
    }
    out
}
