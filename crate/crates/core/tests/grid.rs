use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearwave::grid::*;
use shearwave::io::{decode_grid, encode_grid};
use shearwave::spectral::{laplacian_eigenvalue, poisson_solve, SineTransform};

fn random(n: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::new(n, (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn sine(n: usize) -> GridFunction {
    GridFunction::from_fn(n, |x, y| (PI * x).sin() * (PI * y).sin()).unwrap()
}

#[test]
fn rejects_bad_sizes_and_values() {
    for n in [0, 1, 2, 3, 6, 12, 100] {
        assert!(GridFunction::zeros(n).is_err(), "n = {n}");
    }
    assert!(GridFunction::new(4, vec![0.0; 15]).is_err());
    let mut v = vec![0.0; 16];
    v[3] = f64::NAN;
    assert!(GridFunction::new(4, v).is_err());
}

#[test]
fn laplacian_of_zero_is_zero() {
    assert_eq!(laplacian(&GridFunction::zeros(16).unwrap()).max_abs(), 0.0);
}

#[test]
fn laplacian_of_sine_product() {
    let n = 256;
    let f = sine(n);
    let l = laplacian(&f);
    let mut worst: f64 = 0.0;
    for i in 1..n - 1 {
        for k in 1..n - 1 {
            let want = -2.0 * PI * PI * f.get(i, k);
            worst = worst.max((l.get(i, k) - want).abs() / want.abs());
        }
    }
    assert!(worst <= 1e-3, "{worst}");
}

#[test]
fn laplacian_spike_stencil() {
    let n = 8;
    let mut v = vec![0.0; n * n];
    v[3 * n + 4] = 1.0;
    let l = laplacian(&GridFunction::new(n, v).unwrap());
    let s = (n * n) as f64;
    assert_eq!(l.get(3, 4), -4.0 * s);
    for (i, k) in [(2, 4), (4, 4), (3, 3), (3, 5)] {
        assert_eq!(l.get(i, k), s);
    }
    assert_eq!(l.values().iter().filter(|v| **v != 0.0).count(), 5);
}

#[test]
fn laplacian_is_diagonalised_by_sines() {
    // Discrete sine modes sin(πp(i+½)/n) are exact eigenvectors.
    let n = 16;
    for (p, q) in [(1, 1), (3, 7), (16, 2), (16, 16)] {
        let f = GridFunction::from_fn(n, |x, y| (PI * p as f64 * x).sin() * (PI * q as f64 * y).sin()).unwrap();
        let want = -(laplacian_eigenvalue(n, p) + laplacian_eigenvalue(n, q));
        let l = laplacian(&f);
        for (a, b) in l.values().iter().zip(f.values()) {
            assert!((a - want * b).abs() <= 1e-9 * want.abs(), "p={p} q={q}");
        }
    }
}

#[test]
fn sine_transform_inverts_identity() {
    let n = 32;
    let f = random(n, 1);
    let st = SineTransform::new(n).unwrap();
    let g = st.apply(&f, |_, _| 1.0);
    for (a, b) in f.values().iter().zip(g.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn poisson_solve_residual() {
    let n = 64;
    let f = random(n, 2);
    let u = poisson_solve(&f).unwrap();
    let r = laplacian(&u).scale(-1.0).sub(&f).unwrap();
    assert!(r.norm_l2() <= 1e-10 * f.norm_l2(), "{}", r.norm_l2());
}

#[test]
fn inner_l2_examples() {
    let one = GridFunction::from_fn(8, |_, _| 1.0).unwrap();
    assert!((inner_l2(&one, &one).unwrap() - 1.0).abs() < 1e-15);
    let a = GridFunction::from_fn(8, |x, _| if x < 0.5 { 1.0 } else { 0.0 }).unwrap();
    let b = GridFunction::from_fn(8, |x, _| if x > 0.5 { 1.0 } else { 0.0 }).unwrap();
    assert_eq!(inner_l2(&a, &b).unwrap(), 0.0);
    let s = sine(256);
    assert!((inner_l2(&s, &s).unwrap() - 0.25).abs() <= 1e-4);
    assert!(inner_l2(&s, &sine(128)).is_err());
}

#[test]
fn inner_h1_examples() {
    let s = sine(256);
    let want = 0.25 * (1.0 + 2.0 * PI * PI);
    assert!((inner_h1(&s, &s).unwrap() - want).abs() <= 1e-2 * want);
    assert_eq!(inner_h1(&s, &GridFunction::zeros(256).unwrap()).unwrap(), 0.0);
}

#[test]
fn convolution_matches_direct_sum() {
    for n in [16, 32, 64] {
        let f = random(n, 3);
        let h = random(n, 4).into_values();
        let plan = ConvolutionPlan::new(n).unwrap();
        let fast = convolve(&f, &h, &plan).unwrap();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for c in 0..n {
                    for d in 0..n {
                        s += f.get(c, d) * h[((a + n - c) % n) * n + (b + n - d) % n];
                    }
                }
                worst = worst.max((s - fast.get(a, b)).abs());
                scale = scale.max(s.abs());
            }
        }
        assert!(worst <= 1e-10 * scale, "n={n}: {worst} vs {scale}");
    }
}

#[test]
fn convolution_with_delta_and_constants() {
    let n = 16;
    let plan = ConvolutionPlan::new(n).unwrap();
    let f = random(n, 5);
    let mut delta = vec![0.0; n * n];
    delta[0] = 1.0;
    let g = convolve(&f, &delta, &plan).unwrap();
    for (a, b) in f.values().iter().zip(g.values()) {
        assert!((a - b).abs() < 1e-13);
    }
    let h = random(n, 6).into_values();
    let c = convolve(&GridFunction::from_fn(n, |_, _| 2.0).unwrap(), &h, &plan).unwrap();
    let want = 2.0 * h.iter().sum::<f64>();
    assert!(c.values().iter().all(|v| (v - want).abs() < 1e-11));
    assert!(convolve(&f, &h[..10], &plan).is_err());
}

#[test]
fn partial_diff_examples() {
    let n = 32;
    let c = GridFunction::from_fn(n, |_, _| 3.0).unwrap();
    assert_eq!(partial_diff(&c, Axis::X1).max_abs(), 0.0);
    let lin = GridFunction::from_fn(n, |x, _| x).unwrap();
    let d = partial_diff(&lin, Axis::X1);
    assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    assert!(partial_diff(&lin, Axis::X2).max_abs() < 1e-12);
}

#[test]
fn partial_diff_of_disc_has_crescent_signs() {
    // D₁χ is positive on the left arc (x₁ < ½) and negative on the right.
    let n = 128;
    let g = GridFunction::from_fn(n, |x, y| if (x - 0.5).hypot(y - 0.5) < 1.0 / 6.0 { 1.0 } else { 0.0 }).unwrap();
    let d = partial_diff(&g, Axis::X1);
    for i in 0..n {
        for k in 0..n {
            let v = d.get(i, k);
            if v != 0.0 {
                let x = coord(n, i);
                assert!((x < 0.5) == (v > 0.0), "({i},{k}) {v}");
                let r = (x - 0.5).hypot(coord(n, k) - 0.5);
                assert!((r - 1.0 / 6.0).abs() <= 1.5 / n as f64);
            }
        }
    }
}

fn grid_strategy(n: usize) -> impl Strategy<Value = GridFunction> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| GridFunction::new(n, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laplacian_is_symmetric(f in grid_strategy(16), g in grid_strategy(16)) {
        let a = inner_l2(&laplacian(&f), &g).unwrap();
        let b = inner_l2(&f, &laplacian(&g)).unwrap();
        let scale = 16.0 * 16.0 * 8.0;
        prop_assert!((a - b).abs() <= 1e-10 * scale);
    }

    #[test]
    fn inner_h1_is_symmetric_and_positive(f in grid_strategy(16), g in grid_strategy(16)) {
        let a = inner_h1(&f, &g).unwrap();
        let b = inner_h1(&g, &f).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        if f.max_abs() > 0.0 {
            prop_assert!(inner_h1(&f, &f).unwrap() > 0.0);
        }
    }

    #[test]
    fn binary_roundtrip(f in grid_strategy(8)) {
        prop_assert_eq!(decode_grid(&encode_grid(&f)).unwrap(), f);
    }

    #[test]
    fn inner_l2_is_bilinear(f in grid_strategy(8), g in grid_strategy(8), a in -3.0f64..3.0) {
        let lhs = inner_l2(&f.scale(a), &g).unwrap();
        prop_assert!((lhs - a * inner_l2(&f, &g).unwrap()).abs() < 1e-12);
    }
}
