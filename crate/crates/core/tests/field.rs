use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use parabolic_lp::error::PlpError;
use parabolic_lp::field::{antiderivative, gradient, mean_subtract, spectral_derivative, DerivativeOrder, Field};
use parabolic_lp::geometry::Anisotropy;
use parabolic_lp::grid::Grid;
use proptest::prelude::*;

fn grid(nx: usize, nt: usize) -> Arc<Grid> {
    Arc::new(Grid::periodic(vec![nx, nt], Anisotropy::parabolic(1)).unwrap())
}

/// Naive forward DFT over a 2-axis row-major array.
fn naive_dft(values: &[f64], nx: usize, nt: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); nx * nt];
    for kx in 0..nx {
        for kt in 0..nt {
            let mut acc = Complex64::default();
            for x in 0..nx {
                for t in 0..nt {
                    let phase = -2.0 * PI * ((kx * x) as f64 / nx as f64 + (kt * t) as f64 / nt as f64);
                    acc += values[x * nt + t] * Complex64::from_polar(1.0, phase);
                }
            }
            out[kx * nt + kt] = acc;
        }
    }
    out
}

#[test]
fn constant_field_is_dc_only() {
    let f = Field::constant(grid(8, 8), 2.5);
    let spec = f.spectrum();
    assert!((spec[0].re - 2.5 * 64.0).abs() < 1e-12);
    assert!(spec.iter().skip(1).all(|c| c.norm() < 1e-12));
}

#[test]
fn cosine_has_two_coefficients() {
    let g = grid(16, 8);
    let f = Field::from_fn(g, |z| (3.0 * z[0]).cos()).unwrap();
    let spec = f.spectrum();
    let big: Vec<usize> = (0..spec.len()).filter(|k| spec[*k].norm() > 1e-9).collect();
    // Row-major, time fastest: modes (3, 0) and (−3, 0).
    assert_eq!(big, vec![3 * 8, 13 * 8]);
    assert!((spec[24].re - 64.0).abs() < 1e-10);
}

#[test]
fn spectrum_matches_naive_transform() {
    let g = grid(8, 4);
    let f = Field::from_fn(g, |z| (z[0] + 0.3).sin() * (2.0 * z[1]).cos() + 0.1 * z[0]).unwrap();
    let want = naive_dft(f.values(), 8, 4);
    for (a, b) in f.spectrum().iter().zip(&want) {
        assert!((a - b).norm() < 1e-11);
    }
}

#[test]
fn sine_derivatives() {
    let g = grid(32, 32);
    let f = Field::from_fn(g.clone(), |z| (2.0 * z[0]).sin() * z[1].sin()).unwrap();
    let dx = spectral_derivative(&f, &DerivativeOrder::new(0, vec![1])).unwrap();
    let want = Field::from_fn(g.clone(), |z| 2.0 * (2.0 * z[0]).cos() * z[1].sin()).unwrap();
    assert!(dx.sub(&want).unwrap().max_abs() < 1e-12);
    let dtx = spectral_derivative(&f, &DerivativeOrder::new(1, vec![1])).unwrap();
    let want = Field::from_fn(g, |z| 2.0 * (2.0 * z[0]).cos() * z[1].cos()).unwrap();
    assert!(dtx.sub(&want).unwrap().max_abs() < 1e-9);
}

#[test]
fn derivative_order_axes_must_match() {
    let f = Field::zeros(grid(8, 8));
    let r = spectral_derivative(&f, &DerivativeOrder::new(0, vec![1, 0]));
    assert!(matches!(r, Err(PlpError::Structural(_))));
}

#[test]
fn mean_subtraction_removes_dc() {
    let g = grid(16, 16);
    let f = Field::from_fn(g, |z| 4.0 + z[0].sin()).unwrap();
    let h = mean_subtract(&f);
    assert!(h.mean().abs() < 1e-14);
    assert!(h.spectrum()[0].norm() < 1e-13 * h.len() as f64);
}

#[test]
fn antiderivative_examples() {
    let g = grid(32, 16);
    let f = Field::from_fn(g.clone(), |z| (3.0 * z[0]).cos()).unwrap();
    let a = antiderivative(&f, 0).unwrap();
    let want = Field::from_fn(g.clone(), |z| (3.0 * z[0]).sin() / 3.0).unwrap();
    assert!(a.sub(&want).unwrap().max_abs() < 1e-13);

    let shifted = Field::from_fn(g, |z| 1.0 + (3.0 * z[0]).cos()).unwrap();
    assert!(matches!(antiderivative(&shifted, 0), Err(PlpError::Precondition(_))));
}

#[test]
fn gradient_of_single_mode() {
    let g = grid(32, 32);
    let f = Field::from_fn(g.clone(), |z| (z[0] + 2.0 * z[1]).sin()).unwrap();
    let grad = gradient(&f).unwrap();
    assert_eq!(grad.len(), 2);
    let fx = Field::from_fn(g.clone(), |z| (z[0] + 2.0 * z[1]).cos()).unwrap();
    let ft = fx.scaled(2.0);
    assert!(grad.components()[0].sub(&fx).unwrap().max_abs() < 1e-12);
    assert!(grad.components()[1].sub(&ft).unwrap().max_abs() < 1e-12);
}

#[test]
fn non_finite_samples_are_data_errors() {
    let g = grid(4, 4);
    let mut v = vec![0.0; 16];
    v[5] = f64::NAN;
    assert!(matches!(Field::new(g.clone(), v), Err(PlpError::Data(_))));
    assert!(matches!(Field::new(g, vec![0.0; 3]), Err(PlpError::Structural(_))));
}

fn random_field() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 16 * 8)
}

proptest! {
    #[test]
    fn parseval(v in random_field()) {
        let f = Field::new(grid(16, 8), v).unwrap();
        let phys: f64 = f.values().iter().map(|x| x * x).sum();
        let spec: f64 = f.spectrum().iter().map(|c| c.norm_sqr()).sum::<f64>() / f.len() as f64;
        prop_assert!((phys - spec).abs() <= 1e-10 * phys.max(1.0));
    }

    #[test]
    fn spectral_round_trip(v in random_field()) {
        let f = Field::new(grid(16, 8), v).unwrap();
        let back = Field::from_spectrum(f.grid_arc().clone(), f.spectrum().to_vec()).unwrap();
        prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn derivative_is_linear(u in random_field(), w in random_field(), a in -3.0f64..3.0) {
        let g = grid(16, 8);
        let (u, w) = (Field::new(g.clone(), u).unwrap(), Field::new(g, w).unwrap());
        let order = DerivativeOrder::new(1, vec![1]);
        let lhs = spectral_derivative(&u.axpby(a, &w, 1.0).unwrap(), &order).unwrap();
        let rhs = spectral_derivative(&u, &order).unwrap().axpby(a, &spectral_derivative(&w, &order).unwrap(), 1.0).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-9 * (1.0 + lhs.max_abs()));
    }
}
