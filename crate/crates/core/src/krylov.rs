//! Matrix-free eigenvalue and linear-solve iterations.

use nalgebra::{DMatrix, SymmetricEigen};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

#[derive(Clone, Debug)]
pub struct PowerResult {
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration with Rayleigh-quotient estimates; stops once the relative
/// increment of the estimate drops below `tol`.
pub fn power_iteration(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> PowerResult {
    let mut x = start;
    let nx = dot(&x, &x).sqrt();
    if nx == 0.0 {
        return PowerResult { lambda: 0.0, iterations: 0, converged: true };
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let y = apply(&x);
        let next = dot(&x, &y);
        let ny = dot(&y, &y).sqrt();
        if ny == 0.0 {
            return PowerResult { lambda: 0.0, iterations: it, converged: true };
        }
        let done = it > 1 && (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if done {
            return PowerResult { lambda, iterations: it, converged: true };
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    PowerResult { lambda, iterations: max_iter, converged: false }
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub min: f64,
    pub max: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Extreme eigenvalues of a symmetric operator by Lanczos with full
/// reorthogonalisation. Converged when both extreme Ritz pairs have residual
/// `β_k |s_k|` below `tol·|θ|`.
pub fn lanczos_extremes(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> LanczosResult {
    let dim = start.len();
    let mut q = start;
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v /= nq);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = LanczosResult { min: f64::NAN, max: f64::NAN, iterations: 0, converged: false };
    for it in 1..=max_iter.min(dim) {
        let qk = basis.last().unwrap().clone();
        let mut w = apply(&qk);
        let a = dot(&w, &qk);
        alpha.push(a);
        axpy(&mut w, -a, &qk);
        if basis.len() >= 2 {
            let b = *beta.last().unwrap();
            axpy(&mut w, -b, &basis[basis.len() - 2]);
        }
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                axpy(&mut w, -c, v);
            }
        }
        let b = dot(&w, &w).sqrt();
        let k = alpha.len();
        if it % 5 == 0 || b < 1e-12 * a.abs().max(1.0) || it == max_iter.min(dim) {
            let mut t = DMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alpha[i];
                if i + 1 < k {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let (mut imin, mut imax) = (0, 0);
            for i in 0..k {
                if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                    imin = i;
                }
                if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                    imax = i;
                }
            }
            let (tmin, tmax) = (eig.eigenvalues[imin], eig.eigenvalues[imax]);
            let rmin = b * eig.eigenvectors[(k - 1, imin)].abs();
            let rmax = b * eig.eigenvectors[(k - 1, imax)].abs();
            let converged = rmin <= tol * tmin.abs() && rmax <= tol * tmax.abs();
            last = LanczosResult { min: tmin, max: tmax, iterations: it, converged };
            if converged || b < 1e-12 * a.abs().max(1.0) {
                last.converged = true;
                return last;
            }
        }
        beta.push(b);
        basis.push(w.into_iter().map(|v| v / b).collect());
    }
    last
}

#[derive(Clone, Debug)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Conjugate gradients for an operator self-adjoint in the inner product `inner`.
pub fn conjugate_gradient(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Option<Vec<f64>>,
    inner: impl Fn(&[f64], &[f64]) -> f64,
    tol: f64,
    max_iter: usize,
) -> CgResult {
    let bb = inner(b, b);
    let mut x = x0.unwrap_or_else(|| vec![0.0; b.len()]);
    if bb == 0.0 {
        return CgResult { x: vec![0.0; b.len()], iterations: 0, relative_residual: 0.0, converged: true };
    }
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = inner(&r, &r);
    let mut it = 0;
    while (rr / bb).sqrt() > tol && it < max_iter {
        let ap = apply(&p);
        let pap = inner(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let al = rr / pap;
        axpy(&mut x, al, &p);
        axpy(&mut r, -al, &ap);
        let rn = inner(&r, &r);
        let be = rn / rr;
        p.iter_mut().zip(&r).for_each(|(p, r)| *p = r + be * *p);
        rr = rn;
        it += 1;
    }
    let rel = (rr / bb).sqrt();
    CgResult { x, iterations: it, relative_residual: rel, converged: rel <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: &[f64]) -> impl FnMut(&[f64]) -> Vec<f64> + '_ {
        move |x| x.iter().zip(d).map(|(a, b)| a * b).collect()
    }

    #[test]
    fn lanczos_finds_extremes_of_diagonal() {
        let d: Vec<f64> = (0..300).map(|i| 1.0 + i as f64 * 0.1).collect();
        let start: Vec<f64> = (0..300).map(|i| ((i * 7919) % 101) as f64 / 101.0 + 0.1).collect();
        let r = lanczos_extremes(diag_op(&d), start, 1e-8, 300);
        assert!(r.converged);
        assert!((r.min - 1.0).abs() < 1e-6);
        assert!((r.max - 30.9).abs() < 1e-6);
    }

    #[test]
    fn power_iteration_top_eigenvalue() {
        let d = [1.0, 2.0, 5.0, 3.0];
        let r = power_iteration(diag_op(&d), vec![1.0; 4], 1e-12, 1000);
        assert!(r.converged);
        assert!((r.lambda - 5.0).abs() < 1e-6);
    }

    #[test]
    fn cg_solves_spd_system() {
        let d = [1.0, 4.0, 9.0, 16.0];
        let b = [1.0, 1.0, 1.0, 1.0];
        let r = conjugate_gradient(diag_op(&d), &b, None, dot, 1e-12, 50);
        assert!(r.converged);
        for i in 0..4 {
            assert!((r.x[i] - 1.0 / d[i]).abs() < 1e-10);
        }
    }
}
