//! Coefficient decay, best N-term curves in H¹ and the wavelet-only baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner_h1, inner_l2, GridFunction};
use crate::hybrid::{FrameConfig, HybridFrame};
use crate::krylov::conjugate_gradient;

/// Ordinary least squares y ≈ slope·x + intercept; the third value is the RMS deviation.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len().min(y.len());
    if m == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mf = m as f64;
    let mx = x[..m].iter().sum::<f64>() / mf;
    let my = y[..m].iter().sum::<f64>() / mf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..m {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = ((0..m).map(|i| (y[i] - slope * x[i] - intercept).powi(2)).sum::<f64>() / mf).sqrt();
    (slope, intercept, rms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    /// ‖u − u_N‖²_{H¹} / ‖u‖²_{H¹}
    pub err2_h1: f64,
    pub err_h1: f64,
    /// Magnitude of the N-th largest coefficient.
    pub threshold: f64,
    pub cg_iters: usize,
    pub cg_converged: bool,
    /// ‖u − u_N‖²_{L²} / ‖u‖²_{L²}
    pub err2_l2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Slope after dividing the squared error by log³N.
    pub slope_log_compensated: f64,
    pub rows_used: usize,
    pub rows_excluded: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateTable {
    pub total: usize,
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn fit(&self) -> Result<RateFit> {
        rate_fit(&self.rows)
    }

    pub fn valid_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.cg_converged).count() as f64 / self.rows.len() as f64
    }
}

/// Least squares of log err² against log N over rows whose N lies in the
/// middle 80% of the log N range. Rows with non-positive error are skipped.
pub fn rate_fit(rows: &[RateRow]) -> Result<RateFit> {
    let good: Vec<&RateRow> = rows.iter().filter(|r| r.err2_h1 > 0.0 && r.err2_h1.is_finite() && r.n > 0).collect();
    let excluded = rows.len() - good.len();
    if good.len() < 5 {
        return Err(Error::InsufficientData(format!("{} usable rows, need at least 5", good.len())));
    }
    let lo = good.iter().map(|r| (r.n as f64).ln()).fold(f64::INFINITY, f64::min);
    let hi = good.iter().map(|r| (r.n as f64).ln()).fold(f64::NEG_INFINITY, f64::max);
    let (a, b) = (lo + 0.1 * (hi - lo) - 1e-9, hi - 0.1 * (hi - lo) + 1e-9);
    let used: Vec<&&RateRow> = good.iter().filter(|r| (a..=b).contains(&(r.n as f64).ln())).collect();
    let x: Vec<f64> = used.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = used.iter().map(|r| r.err2_h1.ln()).collect();
    let (slope, intercept, residual) = least_squares(&x, &y);
    let yc: Vec<f64> = used.iter().map(|r| r.err2_h1.ln() - 3.0 * (r.n as f64 + 2.0).ln().ln()).collect();
    let (slope_c, _, _) = least_squares(&x, &yc);
    Ok(RateFit { slope, intercept, residual, slope_log_compensated: slope_c, rows_used: used.len(), rows_excluded: excluded })
}

/// 16 geometric points from 2⁴ to min(2¹⁴, total/2), rounded and deduplicated.
pub fn n_schedule(total: usize) -> Vec<usize> {
    let hi = (1usize << 14).min(total / 2);
    if hi < 16 {
        return if hi == 0 { Vec::new() } else { vec![hi] };
    }
    let (l0, l1) = ((16f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..16).map(|i| (l0 + (l1 - l0) * i as f64 / 15.0).exp().round() as usize).collect();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NtermConfig {
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for NtermConfig {
    fn default() -> Self {
        Self { cg_tol: 1e-8, cg_max_iter: 1000 }
    }
}

/// Indices of `c` ordered by decreasing magnitude, ties by index.
pub fn greedy_order(c: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()).then(a.cmp(&b)));
    order
}

/// Canonical-dual reconstruction from the coefficients on `keep`: solves
/// S u_N = T*(c|keep) in the H¹ inner product, S = T*T.
pub fn dual_reconstruction(
    frame: &HybridFrame,
    c: &[f64],
    keep: &[usize],
    warm: Option<Vec<f64>>,
    cfg: &NtermConfig,
) -> Result<(GridFunction, usize, bool)> {
    let n = frame.n();
    let mut cn = vec![0.0; c.len()];
    for &s in keep {
        cn[s] = c[s];
    }
    let b = frame.synthesis_dense(&cn)?;
    let mut failure = None;
    let res = conjugate_gradient(
        |x| match frame.frame_operator(&GridFunction::from_raw(n, x.to_vec())) {
            Ok(y) => y.into_values(),
            Err(e) => {
                failure = Some(e);
                vec![0.0; x.len()]
            }
        },
        b.values(),
        warm,
        |x, y| inner_h1(&GridFunction::from_raw(n, x.to_vec()), &GridFunction::from_raw(n, y.to_vec())).unwrap_or(f64::NAN),
        cfg.cg_tol,
        cfg.cg_max_iter,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((GridFunction::from_raw(n, res.x), res.iterations, res.converged))
}

/// Best N-term errors of `u` in H¹ for the given increasing `ns`, each u_N
/// reconstructed through the canonical dual frame (CG, warm-started from the
/// previous row).
pub fn nterm_curve(u: &GridFunction, frame: &HybridFrame, ns: &[usize], cfg: &NtermConfig) -> Result<RateTable> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("N schedule must be strictly increasing".into()));
    }
    let c = frame.analysis_dense(u)?;
    let order = greedy_order(&c);
    let nu_h1 = inner_h1(u, u)?;
    let nu_l2 = inner_l2(u, u)?;
    let mut rows = Vec::with_capacity(ns.len());
    let mut warm: Option<Vec<f64>> = None;
    for &nn in ns {
        let nn = nn.min(c.len());
        let (un, iters, converged) = dual_reconstruction(frame, &c, &order[..nn], warm.take(), cfg)?;
        let e = u.sub(&un)?;
        let e2 = if nu_h1 > 0.0 { inner_h1(&e, &e)? / nu_h1 } else { 0.0 };
        let e2l = if nu_l2 > 0.0 { inner_l2(&e, &e)? / nu_l2 } else { 0.0 };
        rows.push(RateRow {
            n: nn,
            err2_h1: e2,
            err_h1: e2.max(0.0).sqrt(),
            threshold: if nn > 0 { c[order[nn - 1]].abs() } else { f64::INFINITY },
            cg_iters: iters,
            cg_converged: converged,
            err2_l2: e2l,
        });
        warm = Some(un.into_values());
    }
    Ok(RateTable { total: c.len(), rows })
}

/// The same curve for the plain wavelet system: no boundary strip, no shearlets.
pub fn wavelet_baseline(u: &GridFunction, cfg: &FrameConfig, ns: &[usize], ncfg: &NtermConfig) -> Result<RateTable> {
    let frame = HybridFrame::new(&cfg.wavelet_only(), u.n())?;
    nterm_curve(u, &frame, ns, ncfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    /// Fit window [lo, hi] in N.
    pub range: (usize, usize),
    /// Exponent of Ξ_N·log^{−3/2}(N+2).
    pub exponent: f64,
    pub exponent_raw: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientDecay {
    /// Non-zero magnitudes, non-increasing.
    #[serde(skip)]
    pub magnitudes: Vec<f64>,
    pub fit: Option<DecayFit>,
}

/// Non-increasing rearrangement of |hybrid_analysis(u)| and its decay
/// exponent over the two decades centred geometrically in 1..M, M the number of
/// non-zero coefficients.
pub fn coefficient_decay(u: &GridFunction, frame: &HybridFrame) -> Result<CoefficientDecay> {
    let c = frame.analysis_dense(u)?;
    let max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut mags: Vec<f64> = c.iter().map(|v| v.abs()).filter(|v| *v > 1e-14 * max && max > 0.0).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    if mags.is_empty() {
        return Ok(CoefficientDecay { magnitudes: mags, fit: None });
    }
    if mags.len() < 100 {
        return Err(Error::InsufficientData(format!("{} non-zero coefficients, need at least 100", mags.len())));
    }
    let centre = (mags.len() as f64).sqrt();
    let lo = ((centre / 10.0).floor() as usize).max(1);
    let hi = ((centre * 10.0).ceil() as usize).min(mags.len());
    let x: Vec<f64> = (lo..=hi).map(|k| (k as f64).ln()).collect();
    let yr: Vec<f64> = (lo..=hi).map(|k| mags[k - 1].ln()).collect();
    let yc: Vec<f64> = (lo..=hi).map(|k| mags[k - 1].ln() - 1.5 * (k as f64 + 2.0).ln().ln()).collect();
    let (exponent, _, residual) = least_squares(&x, &yc);
    let (exponent_raw, _, _) = least_squares(&x, &yr);
    Ok(CoefficientDecay { magnitudes: mags, fit: Some(DecayFit { range: (lo, hi), exponent, exponent_raw, residual }) })
}

#[derive(Clone, Debug, Serialize)]
pub struct HigherOrderReport {
    pub l: u32,
    pub p: f64,
    /// (scale, Σ_{j' ≤ j} Σ |c|^p) for every scale present.
    pub partial_sums: Vec<(u32, f64)>,
    /// Relative increase of the partial sum over the last two scales.
    pub last_increment: f64,
    pub nterm_slope: Option<f64>,
    pub target_slope: f64,
}

/// ℓ^{2/(l+3)} partial sums of the frame coefficients by scale and, when `ns`
/// is given, the fitted N-term slope to compare against −(l+2).
pub fn higher_order_decay(
    u: &GridFunction,
    frame: &HybridFrame,
    l: u32,
    ns: Option<&[usize]>,
    ncfg: &NtermConfig,
) -> Result<HigherOrderReport> {
    let p_w = frame.wavelets().p();
    if p_w < l as usize + 2 {
        return Err(Error::Config(format!(
            "l = {l} needs at least {} vanishing moments, the wavelet has {p_w}",
            l + 2
        )));
    }
    let p = 2.0 / (l as f64 + 3.0);
    let c = frame.analysis_dense(u)?;
    let mut by_scale = std::collections::BTreeMap::<u32, f64>::new();
    for (slot, v) in c.iter().enumerate() {
        *by_scale.entry(frame.index(slot)?.scale()).or_default() += v.abs().powf(p);
    }
    let mut acc = 0.0;
    let partial_sums: Vec<(u32, f64)> = by_scale.into_iter().map(|(j, s)| {
        acc += s;
        (j, acc)
    }).collect();
    let last_increment = match partial_sums.len() {
        0 | 1 => 0.0,
        k => {
            let base = if k >= 3 { partial_sums[k - 3].1 } else { partial_sums[0].1 };
            if base > 0.0 { (partial_sums[k - 1].1 - base) / base } else { f64::INFINITY }
        }
    };
    let nterm_slope = match ns {
        Some(ns) => Some(nterm_curve(u, frame, ns, ncfg)?.fit()?.slope),
        None => None,
    };
    Ok(HigherOrderReport { l, p, partial_sums, last_increment, nterm_slope, target_slope: -(l as f64 + 2.0) })
}
