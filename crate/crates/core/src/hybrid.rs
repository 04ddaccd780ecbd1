//! Hybrid shearlet–wavelet frame: wavelets restricted to a boundary strip,
//! shearlets restricted to elements supported inside Ω, both reweighted by
//! 2^{−js}, with H¹ analysis through the (I − Δ) prefilter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{coord, identity_minus_laplacian, inner_h1, GridFunction};
use crate::krylov::lanczos_extremes;
use crate::shearlet::{q_sh_constant, Direction, ShearletGenerator, ShearletIndex, ShearletSystem};
use crate::spectral::{identity_minus_laplacian_power, SineTransform};
use crate::wavelet::{WaveletIndex, WaveletSystem, WaveletSystemConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameConfig {
    /// Sobolev order of the reweighting.
    pub s: f64,
    /// Strip offset.
    pub t: f64,
    /// Strip exponent, > 1/3.
    pub tau: f64,
    /// Strip constant; `None` derives it from the shearlet supports.
    pub q_sh: Option<f64>,
    /// Finest (wavelet) scale; `None` uses log₂n − 1. Shearlets run up to
    /// J − scale_offset.
    pub j_max: Option<u32>,
    pub wavelet: WaveletSystemConfig,
    pub shearlet: ShearletGenerator,
    /// Include shearlets (false gives the wavelet-only system).
    pub use_shearlets: bool,
    /// Restrict wavelets to the strip (false keeps all of Θ).
    pub use_strip: bool,
    /// Keep the finest wavelet band everywhere. The finest digital shearlets
    /// do not tile the Nyquist band, so without it the lower frame bound
    /// collapses once the strip stops covering Ω at scale J.
    pub keep_finest_band: bool,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            s: 1.0,
            t: 2.0,
            tau: 0.5,
            q_sh: None,
            j_max: None,
            wavelet: WaveletSystemConfig::default(),
            shearlet: ShearletGenerator::default(),
            use_shearlets: true,
            use_strip: true,
            keep_finest_band: true,
        }
    }
}

impl FrameConfig {
    /// Full wavelet system with the same generator and weights; no strip, no shearlets.
    pub fn wavelet_only(&self) -> Self {
        Self { use_shearlets: false, use_strip: false, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 1.0 / 3.0) || !self.tau.is_finite() {
            return Err(Error::Config(format!("tau must be > 1/3, got {}", self.tau)));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::Config(format!("t must be > 0, got {}", self.t)));
        }
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(Error::Config(format!("s must be >= 0, got {}", self.s)));
        }
        if let Some(q) = self.q_sh {
            if !(q > 0.0) || !q.is_finite() {
                return Err(Error::Config(format!("q_sh must be > 0, got {q}")));
            }
        }
        if let (Some(a), Some(b)) = (self.j_max, self.wavelet.j_max) {
            if a != b {
                return Err(Error::Config(format!("j_max = {a} conflicts with wavelet.j_max = {b}")));
            }
        }
        self.shearlet.validate()
    }

    /// Width of Γ_{τ(j−t)}: q_sh·2^{−τ(j−t)}.
    pub fn strip_width(&self, q_sh: f64, j: u32) -> f64 {
        q_sh * 2f64.powf(-self.tau * (j as f64 - self.t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HybridIndex {
    Wavelet(WaveletIndex),
    /// `scale_offset` aligns shearlet scale j with wavelet scale j + offset.
    Shearlet { index: ShearletIndex, scale_offset: u32 },
}

impl HybridIndex {
    /// Dyadic frequency level shared by both sub-systems.
    pub fn scale(&self) -> u32 {
        match self {
            HybridIndex::Wavelet(w) => w.j,
            HybridIndex::Shearlet { index, scale_offset } => index.j + scale_offset,
        }
    }
}

/// 2^{−j·s} with j = scale(idx).
pub fn weight(idx: &HybridIndex, s: f64) -> f64 {
    2f64.powf(-(idx.scale() as f64) * s)
}

/// Sparse coefficient vector over the slots of a [`HybridFrame`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoefficientVector {
    len: usize,
    slots: Vec<usize>,
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn empty(len: usize) -> Self {
        Self { len, slots: Vec::new(), values: Vec::new() }
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(dense: &[f64]) -> Self {
        let mut slots = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                slots.push(i);
                values.push(v);
            }
        }
        Self { len: dense.len(), slots, values }
    }

    pub fn from_entries(len: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        let mut out = Self::empty(len);
        for (s, v) in entries {
            if s >= len {
                return Err(Error::UnknownIndex(format!("slot {s} >= {len}")));
            }
            if out.slots.last() == Some(&s) {
                return Err(Error::UnknownIndex(format!("duplicate slot {s}")));
            }
            if v != 0.0 {
                out.slots.push(s);
                out.values.push(v);
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.len];
        for (&s, &v) in self.slots.iter().zip(&self.values) {
            d[s] = v;
        }
        d
    }

    /// Number of admissible slots (the dense length).
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn nnz(&self) -> usize {
        self.slots.len()
    }
    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.slots.iter().copied().zip(self.values.iter().copied())
    }
    pub fn get(&self, slot: usize) -> f64 {
        match self.slots.binary_search(&slot) {
            Ok(i) => self.values[i],
            Err(_) => 0.0,
        }
    }
    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn dot(&self, other: &Self) -> f64 {
        self.iter().map(|(s, v)| v * other.get(s)).sum()
    }
}

#[derive(Clone, Debug)]
struct ShearSelection {
    channel: usize,
    dir: Direction,
    rows: Vec<usize>,
    cols: Vec<usize>,
    weight: f64,
    offset: usize,
}

/// Boundary-strip indicator: 1 at cells with d(x, ∂Ω) < q_sh·2^{−r}.
pub fn boundary_strip_indicator(r: f64, n: usize, q_sh: f64) -> Result<GridFunction> {
    let w = q_sh * 2f64.powf(-r);
    GridFunction::from_fn(n, |x1, x2| {
        let d = x1.min(1.0 - x1).min(x2).min(1.0 - x2);
        if d < w {
            1.0
        } else {
            0.0
        }
    })
}

/// Θ_{t,τ}: keeps (j, m, υ) iff B_{2^{−j}(q₀+q₁)}(m) meets Γ_{τ(j−t)}.
pub fn wavelet_mask(sys: &WaveletSystem, cfg: &FrameConfig, q_sh: f64) -> Vec<bool> {
    let q = 2.0 * sys.support_constant();
    sys.indices()
        .iter()
        .map(|idx| {
            let (x1, x2) = sys.center(idx);
            let d = x1.min(1.0 - x1).min(x2).min(1.0 - x2);
            d - 2f64.powi(-(idx.j as i32)) * q < cfg.strip_width(q_sh, idx.j)
        })
        .collect()
}

/// Number of retained detail indices at scale j, counted per axis
/// (the mask fails only when both axes are far from ∂Ω).
pub fn strip_count(sys: &WaveletSystem, cfg: &FrameConfig, q_sh: f64, j: u32) -> u64 {
    let q = 2.0 * sys.support_constant();
    let size = 1u64 << (j + 1);
    let lim = cfg.strip_width(q_sh, j) + 2f64.powi(-(j as i32)) * q;
    let far = (0..size as u32)
        .filter(|&m| {
            let x = sys.center_1d(j, m);
            x.min(1.0 - x) >= lim
        })
        .count() as u64;
    3 * (size * size - far * far)
}

/// Λ₀ for one direction: lattice rows/cols whose analytic support lies inside (0,1)².
pub fn shearlet_mask(gen: &ShearletGenerator, dir: Direction, n: usize) -> (Vec<usize>, Vec<usize>) {
    let (lo1, hi1, lo2, hi2) = gen.support_box(dir);
    let (s1, s2) = gen.lattice_steps(dir, n);
    let axis = |step: usize, lo: f64, hi: f64| -> Vec<usize> {
        (0..n)
            .step_by(step)
            .filter(|&m| {
                let x = coord(n, m);
                x - lo > 0.0 && x + hi < 1.0
            })
            .collect()
    };
    (axis(s1, lo1, hi1), axis(s2, lo2, hi2))
}

/// The assembled frame for one grid size.
#[derive(Clone, Debug)]
pub struct HybridFrame {
    cfg: FrameConfig,
    n: usize,
    q_sh: f64,
    wavelets: WaveletSystem,
    shearlets: Option<ShearletSystem>,
    w_pos: Vec<usize>,
    w_weight: Vec<f64>,
    shear: Vec<ShearSelection>,
    n_wavelet: usize,
    total: usize,
}

impl HybridFrame {
    pub fn new(cfg: &FrameConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let mut wcfg = cfg.wavelet.clone();
        wcfg.j_max = cfg.j_max.or(cfg.wavelet.j_max);
        let wavelets = WaveletSystem::new(&wcfg, n)?;
        let j_max = wavelets.j_max();
        let gen = &cfg.shearlet;
        let offset = gen.scale_offset();
        let shearlets = if cfg.use_shearlets && j_max >= offset {
            Some(ShearletSystem::new(gen, j_max - offset, n)?)
        } else {
            None
        };
        let q_sh = cfg.q_sh.unwrap_or_else(|| q_sh_constant(gen, j_max.saturating_sub(offset)));
        let mut keep = if cfg.use_strip { wavelet_mask(&wavelets, cfg, q_sh) } else { vec![true; wavelets.len()] };
        if cfg.keep_finest_band {
            for (pos, k) in keep.iter_mut().enumerate() {
                *k |= wavelets.index(pos).j == j_max;
            }
        }
        let mut w_pos = Vec::new();
        let mut w_weight = Vec::new();
        for (pos, &k) in keep.iter().enumerate() {
            if k {
                let j = wavelets.index(pos).j;
                w_pos.push(pos);
                w_weight.push(2f64.powf(-(j as f64) * cfg.s));
            }
        }
        let n_wavelet = w_pos.len();
        let mut shear = Vec::new();
        let mut total = n_wavelet;
        if let Some(sys) = &shearlets {
            for (channel, dir) in sys.directions().into_iter().enumerate() {
                let (rows, cols) = shearlet_mask(gen, dir, n);
                if rows.is_empty() || cols.is_empty() {
                    continue;
                }
                let count = rows.len() * cols.len();
                let weight = 2f64.powf(-((dir.j + offset) as f64) * cfg.s);
                shear.push(ShearSelection { channel, dir, rows, cols, weight, offset: total });
                total += count;
            }
        }
        Ok(Self { cfg: cfg.clone(), n, q_sh, wavelets, shearlets, w_pos, w_weight, shear, n_wavelet, total })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q_sh(&self) -> f64 {
        self.q_sh
    }
    pub fn wavelets(&self) -> &WaveletSystem {
        &self.wavelets
    }
    pub fn shearlets(&self) -> Option<&ShearletSystem> {
        self.shearlets.as_ref()
    }
    /// Number of admissible indices.
    pub fn len(&self) -> usize {
        self.total
    }
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
    pub fn wavelet_count(&self) -> usize {
        self.n_wavelet
    }
    pub fn shearlet_count(&self) -> usize {
        self.total - self.n_wavelet
    }

    pub fn index(&self, slot: usize) -> Result<HybridIndex> {
        if slot >= self.total {
            return Err(Error::UnknownIndex(format!("slot {slot} >= {}", self.total)));
        }
        if slot < self.n_wavelet {
            return Ok(HybridIndex::Wavelet(self.wavelets.index(self.w_pos[slot])));
        }
        let sel = self.shear.iter().rev().find(|s| s.offset <= slot).unwrap();
        let r = slot - sel.offset;
        let (a, b) = (r / sel.cols.len(), r % sel.cols.len());
        let index = ShearletIndex {
            j: sel.dir.j,
            k: sel.dir.k,
            iota: sel.dir.iota,
            m1: sel.rows[a] as u32,
            m2: sel.cols[b] as u32,
        };
        Ok(HybridIndex::Shearlet { index, scale_offset: self.cfg.shearlet.scale_offset() })
    }

    pub fn slot(&self, idx: &HybridIndex) -> Result<usize> {
        let missing = || Error::UnknownIndex(format!("{idx:?}"));
        match idx {
            HybridIndex::Wavelet(w) => {
                let pos = self.wavelets.position(w)?;
                self.w_pos.binary_search(&pos).map_err(|_| missing())
            }
            HybridIndex::Shearlet { index, .. } => {
                let sel = self.shear.iter().find(|s| s.dir == index.direction()).ok_or_else(missing)?;
                let a = sel.rows.binary_search(&(index.m1 as usize)).map_err(|_| missing())?;
                let b = sel.cols.binary_search(&(index.m2 as usize)).map_err(|_| missing())?;
                Ok(sel.offset + a * sel.cols.len() + b)
            }
        }
    }

    pub fn weight_of(&self, slot: usize) -> f64 {
        if slot < self.n_wavelet {
            self.w_weight[slot]
        } else {
            self.shear.iter().rev().find(|s| s.offset <= slot).unwrap().weight
        }
    }

    /// Per-scale counts (wavelets by j, shearlets by aligned scale).
    pub fn counts_by_scale(&self) -> Vec<(u32, usize, usize)> {
        let mut map = std::collections::BTreeMap::<u32, (usize, usize)>::new();
        for &pos in &self.w_pos {
            map.entry(self.wavelets.index(pos).j).or_default().0 += 1;
        }
        let off = self.cfg.shearlet.scale_offset();
        for s in &self.shear {
            map.entry(s.dir.j + off).or_default().1 += s.rows.len() * s.cols.len();
        }
        map.into_iter().map(|(j, (a, b))| (j, a, b)).collect()
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.n() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: f.n() });
        }
        Ok(())
    }

    /// Weighted, masked L²-pairing coefficients `2^{−js}⟨f, element⟩_{L²}`.
    pub fn analysis_l2_dense(&self, f: &GridFunction) -> Result<Vec<f64>> {
        self.check(f)?;
        let mut out = vec![0.0; self.total];
        let wc = self.wavelets.analysis(f)?;
        for (slot, (&pos, &w)) in self.w_pos.iter().zip(&self.w_weight).enumerate() {
            out[slot] = w * wc[pos];
        }
        if let Some(sys) = &self.shearlets {
            if !self.shear.is_empty() {
                let spec = sys.plan().spectrum(f.values());
                let subset: Vec<usize> = self.shear.iter().map(|s| s.channel).collect();
                let planes = sys.analysis_from_spectrum(&spec, &subset);
                for (sel, plane) in self.shear.iter().zip(planes) {
                    let mut slot = sel.offset;
                    for &a in &sel.rows {
                        for &b in &sel.cols {
                            out[slot] = sel.weight * plane[a * self.n + b];
                            slot += 1;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// H¹ analysis: the L²-pairing analysis of `f − Δf`.
    pub fn analysis_dense(&self, f: &GridFunction) -> Result<Vec<f64>> {
        self.check(f)?;
        self.analysis_l2_dense(&identity_minus_laplacian(f))
    }

    /// Σ c_λ 2^{−j_λ s} element_λ. Adjoint of `analysis_l2_dense` under
    /// `inner_l2` and of `analysis_dense` under `inner_h1`.
    pub fn synthesis_dense(&self, c: &[f64]) -> Result<GridFunction> {
        if c.len() != self.total {
            return Err(Error::SizeMismatch { expected: self.total, found: c.len() });
        }
        let mut wc = vec![0.0; self.wavelets.len()];
        for (slot, (&pos, &w)) in self.w_pos.iter().zip(&self.w_weight).enumerate() {
            wc[pos] = w * c[slot];
        }
        let mut out = self.wavelets.synthesis(&wc)?;
        if let Some(sys) = &self.shearlets {
            if !self.shear.is_empty() {
                let n = self.n;
                let planes: Vec<Vec<f64>> = self
                    .shear
                    .iter()
                    .map(|sel| {
                        let mut p = vec![0.0; n * n];
                        let mut slot = sel.offset;
                        for &a in &sel.rows {
                            for &b in &sel.cols {
                                p[a * n + b] = sel.weight * c[slot];
                                slot += 1;
                            }
                        }
                        p
                    })
                    .collect();
                let refs: Vec<(usize, &[f64])> =
                    self.shear.iter().zip(&planes).map(|(s, p)| (s.channel, p.as_slice())).collect();
                out = out.add(&sys.synthesis_from_planes(&refs))?;
            }
        }
        Ok(out)
    }

    pub fn hybrid_analysis(&self, f: &GridFunction) -> Result<CoefficientVector> {
        Ok(CoefficientVector::from_dense(&self.analysis_dense(f)?))
    }

    pub fn hybrid_synthesis(&self, c: &CoefficientVector) -> Result<GridFunction> {
        if c.len() != self.total {
            return Err(Error::UnknownIndex(format!("vector over {} slots, frame has {}", c.len(), self.total)));
        }
        self.synthesis_dense(&c.to_dense())
    }

    /// Frame operator f ↦ synthesis(analysis(f)), self-adjoint in H¹.
    pub fn frame_operator(&self, f: &GridFunction) -> Result<GridFunction> {
        self.synthesis_dense(&self.analysis_dense(f)?)
    }

    /// Unweighted samples of the element at `slot`.
    pub fn element(&self, slot: usize) -> Result<GridFunction> {
        match self.index(slot)? {
            HybridIndex::Wavelet(w) => self.wavelets.element(&w),
            HybridIndex::Shearlet { index, .. } => self.shearlets.as_ref().unwrap().element(&index),
        }
    }

    /// Centre of the element at `slot` and the radius of a ball containing its support.
    pub fn element_geometry(&self, slot: usize) -> Result<((f64, f64), f64)> {
        match self.index(slot)? {
            HybridIndex::Wavelet(w) => {
                let r = self.wavelets.support_radius(w.j) * std::f64::consts::SQRT_2;
                Ok((self.wavelets.center(&w), r))
            }
            HybridIndex::Shearlet { index, .. } => {
                let c = (coord(self.n, index.m1 as usize), coord(self.n, index.m2 as usize));
                Ok((c, self.cfg.shearlet.analytic_radius(index.direction())))
            }
        }
    }

    /// ‖analysis(f)‖² / ‖f‖²_{H¹}
    pub fn rayleigh_quotient(&self, f: &GridFunction) -> Result<f64> {
        let c = self.analysis_dense(f)?;
        let num: f64 = c.iter().map(|v| v * v).sum();
        Ok(num / inner_h1(f, f)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameBounds {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Extreme eigenvalues of the frame operator relative to the H¹ norm, i.e. of
/// (I−Δ)^{1/2} S (I−Δ)^{−1/2} with S = synthesis∘analysis, by Lanczos. Every
/// grid function satisfies the discrete Dirichlet condition, so the whole
/// grid space is the boundary-vanishing subspace.
pub fn frame_bounds_estimate(frame: &HybridFrame, seed: u64, tol: f64, max_iter: usize) -> Result<FrameBounds> {
    let n = frame.n();
    let st = SineTransform::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut failure = None;
    let res = lanczos_extremes(
        |y| {
            let y = GridFunction::from_raw(n, y.to_vec());
            let x = identity_minus_laplacian_power(&st, &y, -0.5);
            match frame.frame_operator(&x) {
                Ok(s) => identity_minus_laplacian_power(&st, &s, 0.5).into_values(),
                Err(e) => {
                    failure = Some(e);
                    vec![0.0; n * n]
                }
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
        return Err(Error::NonConvergence { what: "frame bound estimation", iterations: res.iterations });
    }
    Ok(FrameBounds { a: res.min, b: res.max, ratio: res.max / res.min, iterations: res.iterations, converged: true })
}
