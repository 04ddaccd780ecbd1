use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearwave::grid::{inner_h1, inner_l2, laplacian, GridFunction};
use shearwave::wavelet::*;

fn random(n: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::new(n, (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn system(n: usize, p: usize) -> WaveletSystem {
    WaveletSystem::new(&WaveletSystemConfig { p, ..Default::default() }, n).unwrap()
}

#[test]
fn filters_are_orthogonal_with_vanishing_moments() {
    for p in 2..=4 {
        let h = daubechies(p).unwrap();
        assert_eq!(h.len(), 2 * p);
        let g = high_pass(&h);
        let m = discrete_moments(&g, p + 1);
        assert!(m[0] <= 1e-10, "p={p} degree 0: {}", m[0]);
        for (d, v) in m.iter().enumerate().take(p) {
            assert!(*v <= 1e-8, "p={p} degree {d}: {v}");
        }
        // One-sided: degree p is not small.
        assert!(m[p] > 1e-3, "p={p}");
        for s in (0..h.len()).step_by(2) {
            let a: f64 = (0..h.len() - s).map(|k| h[k] * h[k + s]).sum();
            assert!((a - if s == 0 { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
        assert!(system(16, p).vanishing_moments_check() <= 1e-8);
    }
    assert!(daubechies(5).is_err());
}

#[test]
fn custom_taps_are_validated() {
    let bad = WaveletSystemConfig { taps: Some(vec![1.0, 0.5]), ..Default::default() };
    assert!(WaveletSystem::new(&bad, 16).is_err());
    let haar = WaveletSystemConfig { taps: Some(vec![0.5f64.sqrt(), 0.5f64.sqrt()]), p: 2, ..Default::default() };
    assert_eq!(WaveletSystem::new(&haar, 16).unwrap().p(), 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("db2.txt");
    std::fs::write(&path, "# db2\n0.48296291314453414337\n0.83651630373780790558 0.22414386804201338103\n-0.12940952255126038117\n").unwrap();
    assert_eq!(taps_from_file(&path).unwrap(), daubechies(2).unwrap());
}

#[test]
fn index_set_structure() {
    let cfg = WaveletSystemConfig { j0: 2, j_max: Some(2), ..Default::default() };
    let idx = theta_index_set(&cfg, 64).unwrap();
    let types: std::collections::BTreeSet<u8> = idx.iter().map(|i| i.v).collect();
    assert_eq!(types.len(), 4);
    assert!(idx.iter().all(|i| i.j == 2));
    assert!(idx.iter().filter(|i| i.v == 0).all(|i| i.j == cfg.j0));

    let sys = system(128, 3);
    for j in sys.j0()..=sys.j_max() {
        let count = sys.indices().iter().filter(|i| i.j == j && i.v != 0).count() as f64;
        let ratio = count / 4f64.powi(j as i32);
        assert_eq!(ratio, 12.0, "j={j}");
    }
    let too_fine = WaveletSystemConfig { j_max: Some(6), ..Default::default() };
    assert!(matches!(WaveletSystem::new(&too_fine, 64), Err(shearwave::Error::ScaleTooLarge { .. })));
}

#[test]
fn positions_roundtrip() {
    let sys = system(32, 2);
    for pos in (0..sys.len()).step_by(7) {
        assert_eq!(sys.position(&sys.index(pos)).unwrap(), pos);
    }
    assert!(sys.position(&WaveletIndex { j: 9, m1: 0, m2: 0, v: 1 }).is_err());
    assert!(sys.position(&WaveletIndex { j: 1, m1: 99, m2: 0, v: 1 }).is_err());
}

#[test]
fn supports_lie_in_enlarged_square() {
    // Support balls around the folded centres stay within q·2^{-j} of the square.
    let cfg = WaveletSystemConfig { j_max: Some(4), ..Default::default() };
    let sys = WaveletSystem::new(&cfg, 64).unwrap();
    let q = sys.support_constant();
    for idx in sys.indices() {
        let (x1, x2) = sys.center(&idx);
        let r = sys.support_radius(idx.j);
        assert!(r <= q * 2f64.powi(-(idx.j as i32)) + 1.0 / 64.0);
        let lim = q * 2f64.powi(-(idx.j as i32));
        for x in [x1, x2] {
            assert!(x - r >= -lim - 1e-12 && x + r <= 1.0 + lim + 1e-12);
        }
    }
}

#[test]
fn element_support_matches_centre_and_radius() {
    // Measured support (cells with |value| > 1e-12) is within radius of the
    // folded centre, per axis.
    let n = 64;
    let sys = system(n, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let idx = sys.index(rng.random_range(0..sys.len()));
        let e = sys.element(&idx).unwrap();
        let (c1, c2) = sys.center(&idx);
        let r = sys.support_radius(idx.j);
        // the folded element is a sum of the element and its mirror images, so
        // test against the nearest image of the unfolded centre
        for i in 0..n {
            for k in 0..n {
                if e.get(i, k).abs() > 1e-12 {
                    let (x1, x2) = ((i as f64 + 0.5) / n as f64, (k as f64 + 0.5) / n as f64);
                    let d1 = (x1 - c1).abs().min(x1 + c1).min(2.0 - x1 - c1);
                    let d2 = (x2 - c2).abs().min(x2 + c2).min(2.0 - x2 - c2);
                    assert!(d1 <= r + 1e-12 && d2 <= r + 1e-12, "{idx:?} at ({i},{k})");
                }
            }
        }
    }
}

#[test]
fn analysis_matches_brute_force_inner_products() {
    for n in [16, 32] {
        for p in [2, 3] {
            let sys = system(n, p);
            let f = random(n, n as u64 + p as u64);
            let c = sys.analysis(&f).unwrap();
            for pos in 0..sys.len() {
                let e = sys.element(&sys.index(pos)).unwrap();
                let want = inner_l2(&f, &e).unwrap();
                assert!((c[pos] - want).abs() <= 1e-8, "n={n} p={p} pos={pos}");
            }
        }
    }
}

#[test]
fn adjointness() {
    for n in [64, 128] {
        let sys = system(n, 3);
        let f = random(n, 11);
        let c = random_vec(sys.len(), 12);
        let lhs = dot(&sys.analysis(&f).unwrap(), &c);
        let rhs = inner_l2(&f, &sys.synthesis(&c).unwrap()).unwrap();
        let scale = f.norm_l2() * c.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((lhs - rhs).abs() <= 1e-10 * scale, "n={n}");
    }
}

#[test]
fn parseval_reconstruction() {
    for p in 2..=4 {
        let sys = system(64, p);
        let f = random(64, 13);
        let c = sys.analysis(&f).unwrap();
        let g = sys.synthesis(&c).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).abs() <= 1e-8);
        }
        let energy: f64 = c.iter().map(|v| v * v).sum();
        assert!((energy - inner_l2(&f, &f).unwrap()).abs() <= 1e-10 * energy);
    }
}

#[test]
fn analysis_of_an_element_is_a_projection() {
    // For a Parseval frame, T T* is the orthogonal projection onto range T:
    // the coefficient of an element at its own index is its squared norm (≤ 1),
    // and re-analysing the synthesis of those coefficients reproduces them.
    let sys = system(32, 3);
    let idx = WaveletIndex { j: 3, m1: 5, m2: 9, v: 3 };
    let pos = sys.position(&idx).unwrap();
    let e = sys.element(&idx).unwrap();
    let c = sys.analysis(&e).unwrap();
    let own = inner_l2(&e, &e).unwrap();
    assert!((c[pos] - own).abs() < 1e-12);
    assert!(own > 0.0 && own <= 1.0 + 1e-12);
    let c2 = sys.analysis(&sys.synthesis(&c).unwrap()).unwrap();
    for (a, b) in c.iter().zip(&c2) {
        assert!((a - b).abs() < 1e-10);
    }
    // An element clear of the fold is one of four mirror copies of the same
    // function, each carrying a quarter of the energy.
    let interior = WaveletIndex { j: 3, m1: 2, m2: 2, v: 1 };
    assert_eq!(sys.center(&interior), (0.5, 0.5));
    let e = sys.element(&interior).unwrap();
    assert!((inner_l2(&e, &e).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn zero_in_zero_out() {
    let sys = system(16, 2);
    assert!(sys.analysis(&GridFunction::zeros(16).unwrap()).unwrap().iter().all(|v| *v == 0.0));
    assert_eq!(sys.synthesis(&vec![0.0; sys.len()]).unwrap().max_abs(), 0.0);
    assert!(sys.synthesis(&[0.0; 3]).is_err());
    assert!(sys.analysis(&GridFunction::zeros(32).unwrap()).is_err());
}

#[test]
fn h1_analysis_matches_inner_h1() {
    let n = 32;
    let sys = system(n, 3);
    let f = random(n, 14);
    let c = sys.h1_analysis(&f).unwrap();
    for pos in (0..sys.len()).step_by(3) {
        let e = sys.element(&sys.index(pos)).unwrap();
        let want = inner_h1(&e, &f).unwrap();
        assert!((c[pos] - want).abs() <= 1e-6 * (1.0 + want.abs()), "pos={pos}");
    }
}

#[test]
fn h1_analysis_of_eigenfunction() {
    let n = 128;
    let sys = system(n, 3);
    let f = GridFunction::from_fn(n, |x, y| (PI * x).sin() * (PI * y).sin()).unwrap();
    let a = sys.analysis(&f).unwrap();
    let h = sys.h1_analysis(&f).unwrap();
    let lam = 1.0 + 2.0 * PI * PI;
    let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.iter().zip(&h) {
        assert!((y - lam * x).abs() <= 1e-2 * lam * amax);
    }
    // the grid eigenvalue is exact
    let lap = laplacian(&f);
    let ratio = lap.get(n / 2, n / 2) / f.get(n / 2, n / 2);
    for (x, y) in a.iter().zip(&h) {
        assert!((y - (1.0 - ratio) * x).abs() <= 1e-9 * amax * lam);
    }
}

#[test]
fn coefficient_decay_for_smooth_interior_function() {
    // Smooth bump supported in the interior: the largest detail coefficient per
    // scale falls like 2^{-(p+1)j} once the scale resolves the bump. Coarse
    // scales are pre-asymptotic, so the fit uses the three finest.
    let n = 512;
    let f = GridFunction::from_fn(n, |x, y| {
        let r2 = ((x - 0.5).powi(2) + (y - 0.5).powi(2)) / 0.16;
        if r2 < 1.0 { (-1.0 / (1.0 - r2)).exp() } else { 0.0 }
    })
    .unwrap();
    for (p, bound) in [(2, -2.9), (3, -3.6)] {
        let sys = system(n, p);
        let c = sys.analysis(&f).unwrap();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for j in sys.j_max() - 2..=sys.j_max() {
            let m = sys
                .bands()
                .iter()
                .filter(|b| b.j == j && b.v != 0)
                .flat_map(|b| c[b.offset..b.offset + b.size * b.size].iter())
                .fold(0.0f64, |m, v| m.max(v.abs()));
            xs.push(j as f64);
            ys.push(m.log2());
        }
        let (slope, _, _) = shearwave::approx::least_squares(&xs, &ys);
        assert!(slope <= bound, "p={p} slope {slope}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_identity_random(seed in any::<u64>(), p in 2usize..=4) {
        let n = 16;
        let sys = system(n, p);
        let f = random(n, seed);
        let c = random_vec(sys.len(), seed ^ 0xabc);
        let lhs = dot(&sys.analysis(&f).unwrap(), &c);
        let rhs = inner_l2(&f, &sys.synthesis(&c).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn analysis_is_linear(seed in any::<u64>(), a in -2.0f64..2.0) {
        let sys = system(16, 3);
        let f = random(16, seed);
        let g = random(16, seed.wrapping_add(1));
        let lhs = sys.analysis(&f.axpy(a, &g).unwrap()).unwrap();
        let cf = sys.analysis(&f).unwrap();
        let cg = sys.analysis(&g).unwrap();
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - cf[i] - a * cg[i]).abs() < 1e-12);
        }
    }
}
