//! Centred cardinal B-splines.

/// B_m, order m (degree m−1), supported on [−m/2, m/2); B₁ is the half-open box.
pub fn bspline(x: f64, m: usize) -> f64 {
    let half = m as f64 / 2.0;
    if m == 0 || x < -half || x >= half {
        return 0.0;
    }
    if m == 1 {
        return 1.0;
    }
    ((x + half) * bspline(x + 0.5, m - 1) + (half - x) * bspline(x - 0.5, m - 1)) / (m - 1) as f64
}

/// Second derivative of B_m: B_{m−2}(x+1) − 2B_{m−2}(x) + B_{m−2}(x−1).
pub fn bspline_d2(x: f64, m: usize) -> f64 {
    assert!(m >= 3, "B_m'' needs m >= 3");
    bspline(x + 1.0, m - 2) - 2.0 * bspline(x, m - 2) + bspline(x - 1.0, m - 2)
}

/// ‖B_m‖²_{L²} = B_{2m}(0).
pub fn bspline_norm2(m: usize) -> f64 {
    bspline(0.0, 2 * m)
}

/// ‖B_m''‖²_{L²}, the fourth central difference of B_{2m−4} at 0.
pub fn bspline_d2_norm2(m: usize) -> f64 {
    let w = [1.0, -4.0, 6.0, -4.0, 1.0];
    (0..5).map(|r| w[r] * bspline(r as f64 - 2.0, 2 * m - 4)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity() {
        for m in 1..=8 {
            for &x in &[0.0, 0.13, 0.5, 0.77] {
                let s: f64 = (-10..=10).map(|i| bspline(x + i as f64, m)).sum();
                assert!((s - 1.0).abs() < 1e-13, "m={m} x={x} s={s}");
            }
        }
    }

    #[test]
    fn norms_match_quadrature() {
        for m in [4usize, 6] {
            let steps = 200_000;
            let dx = m as f64 / steps as f64;
            let (mut a, mut b) = (0.0, 0.0);
            for i in 0..steps {
                let x = -(m as f64) / 2.0 + (i as f64 + 0.5) * dx;
                a += bspline(x, m).powi(2) * dx;
                b += bspline_d2(x, m).powi(2) * dx;
            }
            assert!((a - bspline_norm2(m)).abs() < 1e-8);
            assert!((b - bspline_d2_norm2(m)).abs() < 1e-6);
        }
    }
}
