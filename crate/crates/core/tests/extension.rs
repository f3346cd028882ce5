use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parabolic_lp::boxfield::{fornberg_weights, BoxField, BoxGrid};
use parabolic_lp::error::PlpError;
use parabolic_lp::extension::{
    build_plateau_cutoff, build_plateau_cutoff_box, default_plateau_boxes, embed_periodic, extend_along, extend_to_box,
    extension_coefficients, localize, Plateau,
};
use parabolic_lp::field::Field;
use parabolic_lp::geometry::{Anisotropy, AxisBox};
use parabolic_lp::grid::Grid;
use proptest::prelude::*;

/// `c` solving `Σ_j c_j (−2^{−j})^k = 1`, `k < K`, by exact elimination.
fn exact_coefficients(order: usize) -> Vec<BigRational> {
    let node = |j: usize| -BigRational::new(BigInt::one(), BigInt::one() << j);
    let mut rows: Vec<Vec<BigRational>> = (0..order)
        .map(|k| {
            let mut row: Vec<BigRational> = (0..order)
                .map(|j| (0..k).fold(BigRational::one(), |acc, _| acc * node(j)))
                .collect();
            row.push(BigRational::one());
            row
        })
        .collect();
    for col in 0..order {
        let pivot = (col..order).find(|r| !rows[*r][col].is_zero()).expect("nonsingular");
        rows.swap(col, pivot);
        let p = rows[col][col].clone();
        for v in rows[col].iter_mut() {
            *v = v.clone() / p.clone();
        }
        for r in 0..order {
            if r != col && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                let pivot_row = rows[col].clone();
                for (v, pv) in rows[r].iter_mut().zip(pivot_row) {
                    *v = v.clone() - factor.clone() * pv;
                }
            }
        }
    }
    rows.into_iter().map(|r| r[order].clone()).collect()
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

#[test]
fn order_two_coefficients() {
    let c = extension_coefficients(2).unwrap();
    assert!((c.cs[0] + 3.0).abs() < 1e-12 && (c.cs[1] - 4.0).abs() < 1e-12);
    assert_eq!(c.lambdas, vec![1.0, 0.5]);
    let one = extension_coefficients(1).unwrap();
    assert_eq!(one.cs, vec![1.0]);
    assert!(matches!(extension_coefficients(0), Err(PlpError::Config(_))));
}

#[test]
fn coefficients_match_exact_solution() {
    for order in 1..=8 {
        let c = extension_coefficients(order).unwrap();
        let exact = exact_coefficients(order);
        for (j, want) in exact.iter().enumerate() {
            let got = rational(c.cs[j]) + rational(c.cs_lo[j]);
            let err = ((got - want.clone()).abs() / want.abs()).to_f64().unwrap();
            assert!(err < 1e-15, "K = {order}, j = {j}: relative error {err:e}");
        }
        // Moment residual of the stored weights, in exact arithmetic.
        let mut worst = 0.0f64;
        for k in 0..order {
            let mut sum = BigRational::zero();
            for j in 0..order {
                let x = rational(-c.lambdas[j]);
                let p = (0..k).fold(BigRational::one(), |acc, _| acc * x.clone());
                sum += (rational(c.cs[j]) + rational(c.cs_lo[j])) * p;
            }
            worst = worst.max((sum - BigRational::one()).abs().to_f64().unwrap());
        }
        assert!(worst <= 1e-10, "K = {order}: exact residual {worst:e}");
        assert!(c.residual <= 1e-10);
    }
}

fn omega(m_intervals: usize) -> Arc<BoxGrid> {
    Arc::new(BoxGrid::omega_t(1, 1.0, m_intervals).unwrap())
}

#[test]
fn cubic_is_reproduced() {
    let f = BoxField::from_fn(omega(32), |z| z[0].powi(3)).unwrap();
    let e = extend_to_box(&f, 2).unwrap();
    let g = e.field.grid();
    assert_eq!(g.domain().lower(), &[-1.0, -1.0]);
    assert_eq!(g.domain().upper(), &[2.0, 2.0]);
    let nt = g.dims()[1];
    let mut worst = 0.0f64;
    for i in 0..g.dims()[0] {
        let x = g.coordinate(0, i);
        if x > -1.0 && x < 0.0 {
            for k in 0..nt {
                worst = worst.max((e.field.values()[i * nt + k] - x.powi(3)).abs());
            }
        }
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn constants_are_preserved_and_interior_untouched() {
    let one = BoxField::from_fn(omega(16), |_| 1.0).unwrap();
    for m in 1..=3 {
        let e = extend_to_box(&one, m).unwrap();
        assert!(e.field.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }
    let f = BoxField::from_fn(omega(16), |z| (3.0 * z[0]).sin() * z[1]).unwrap();
    let e = extend_to_box(&f, 1).unwrap();
    let g = e.field.grid();
    let nt = g.dims()[1];
    for i in 0..=16 {
        for k in 0..=16 {
            assert_eq!(e.field.values()[(i + 16) * nt + k + 16], f.values()[i * 17 + k]);
        }
    }
}

#[test]
fn axis_order_does_not_matter() {
    let f = BoxField::from_fn(omega(32), |z| (2.0 * z[0]).sin() * (1.3 * z[1]).cos() + z[0] * z[1]).unwrap();
    for m in 1..=2 {
        let a = extend_along(&f, m, &[0, 1]).unwrap();
        let b = extend_along(&f, m, &[1, 0]).unwrap();
        assert!(a.field.sub(&b.field).unwrap().max_abs() <= 1e-10 * a.field.max_abs());
    }
    assert!(matches!(extend_along(&f, 1, &[0, 0]), Err(PlpError::Structural(_))));
}

#[test]
fn extension_is_continuous_across_the_faces() {
    let f = BoxField::from_fn(omega(64), |z| (2.0 * z[0] + 0.3).cos() * (1.0 + z[1] * z[1])).unwrap();
    let e = extend_to_box(&f, 1).unwrap();
    let g = e.field.grid();
    let nt = g.dims()[1];
    let h = g.spacing(0);
    // Jumps between neighbours are O(h) everywhere, the faces included.
    let mut worst = 0.0f64;
    for i in 0..g.dims()[0] - 1 {
        for k in 0..nt {
            worst = worst.max((e.field.values()[(i + 1) * nt + k] - e.field.values()[i * nt + k]).abs());
        }
    }
    assert!(worst < 40.0 * h, "largest neighbour jump {worst}");
}

#[test]
fn rejects_boxes_other_than_omega() {
    let g = Arc::new(
        BoxGrid::new(
            vec![17, 17],
            AxisBox::new(vec![0.5, 0.0], vec![1.5, 1.0]).unwrap(),
            Anisotropy::parabolic(1),
        )
        .unwrap(),
    );
    let f = BoxField::from_fn(g, |_| 0.0).unwrap();
    assert!(matches!(extend_to_box(&f, 1), Err(PlpError::Structural(_))));
    let tiny = BoxField::from_fn(omega(2), |_| 0.0).unwrap();
    assert!(extend_to_box(&tiny, 2).is_err());
}

#[test]
fn plateau_values() {
    let (z1, z2) = default_plateau_boxes(1, 1.0).unwrap();
    let psi = Plateau::new(z1.clone(), z2.clone()).unwrap();
    assert_eq!(psi.eval(&[0.5, 0.5]), 1.0);
    assert_eq!(psi.eval(&[-0.25, 1.25]), 1.0);
    assert_eq!(psi.eval(&[-0.75, 0.5]), 0.0);
    assert_eq!(psi.eval(&[1.9, 0.5]), 0.0);
    // Midway through both ramps: each factor is χ(3/2) = 1/2.
    assert!((psi.eval(&[-0.5, 1.5]) - 0.25).abs() < 1e-15);
    assert!(Plateau::new(z2.clone(), z1.clone()).is_err());

    let bg = Arc::new(
        BoxGrid::new(
            vec![61, 61],
            AxisBox::new(vec![-1.0, -1.0], vec![2.0, 2.0]).unwrap(),
            Anisotropy::parabolic(1),
        )
        .unwrap(),
    );
    let sampled = build_plateau_cutoff_box(&z1, &z2, &bg).unwrap();
    assert!(sampled.values().iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn localization_basics() {
    let g = Arc::new(
        Grid::new(
            vec![64, 64],
            AxisBox::new(vec![-1.5, -1.5], vec![2.5, 2.5]).unwrap(),
            Anisotropy::parabolic(1),
        )
        .unwrap(),
    );
    let (z1, z2) = default_plateau_boxes(1, 1.0).unwrap();
    let psi = build_plateau_cutoff(&z1, &z2, &g).unwrap();
    let zero = localize(&Field::zeros(g.clone()), &psi, 0).unwrap();
    assert_eq!(zero.g.max_abs(), 0.0);

    let f = Field::from_fn(g.clone(), |z| 2.0 + (3.0 * z[0]).sin() * z[1]).unwrap();
    let loc = localize(&f, &psi, 0).unwrap();
    assert!(loc.product.max_abs() <= f.max_abs());
    let one = Field::constant(g, 1.0);
    assert_eq!(localize(&f, &one, 0).unwrap().product, f);
}

/// Cumulative trapezoid along a periodic line from index `k0`, with the
/// Euler–Maclaurin end corrections `−h²/12·Δf′ + h⁴/720·Δf‴` (derivatives
/// by 7-point finite differences).
fn corrected_cumulative(line: &[f64], h: f64, k0: usize) -> Vec<f64> {
    let n = line.len();
    let nodes: Vec<f64> = (-3..=3).map(|i| f64::from(i) * h).collect();
    let (w1, w3) = (fornberg_weights(0.0, &nodes, 1), fornberg_weights(0.0, &nodes, 3));
    let deriv = |w: &[f64], k: usize| -> f64 {
        w.iter()
            .enumerate()
            .map(|(i, c)| c * line[(k + n + i - 3) % n])
            .sum()
    };
    let mut cum = vec![0.0; n];
    for k in k0 + 1..n {
        cum[k] = cum[k - 1] + 0.5 * h * (line[k - 1] + line[k]);
    }
    for k in (0..k0).rev() {
        cum[k] = cum[k + 1] - 0.5 * h * (line[k + 1] + line[k]);
    }
    let (d1, d3) = (deriv(&w1, k0), deriv(&w3, k0));
    (0..n)
        .map(|k| cum[k] - h * h / 12.0 * (deriv(&w1, k) - d1) + h.powi(4) / 720.0 * (deriv(&w3, k) - d3))
        .collect()
}

#[test]
fn antiderivative_matches_quadrature() {
    // Ω_T at 256 intervals: a 1024² torus after extension and padding.
    let m_int = 256;
    let bump = |z: &[f64]| {
        let r2 = ((z[0] - 0.5) / 0.3).powi(2) + ((z[1] - 0.5) / 0.3).powi(2);
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    };
    let f = BoxField::from_fn(omega(m_int), bump).unwrap();
    let e = extend_to_box(&f, 1).unwrap();
    let p = embed_periodic(&e.field).unwrap();
    let (z1, z2) = default_plateau_boxes(1, 1.0).unwrap();
    let psi = build_plateau_cutoff(&z1, &z2, p.grid_arc()).unwrap();
    let loc = localize(&p, &psi, 0).unwrap();

    let g = p.grid();
    let n = g.dims()[0];
    let h = g.spacing(0);
    let k0 = 3 * n / 8;
    assert!(g.coordinate(0, k0).abs() < 1e-12);
    let mut worst = 0.0f64;
    for t in 0..n {
        let line: Vec<f64> = (0..n).map(|k| loc.product.values()[k * n + t]).collect();
        let want = corrected_cumulative(&line, h, k0);
        for (k, w) in want.iter().enumerate() {
            // Stop short of the compensating bump.
            if g.coordinate(0, k) < 1.85 {
                worst = worst.max((loc.g.values()[k * n + t] - w).abs());
            }
        }
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn extension_is_linear(a in -3.0f64..3.0, k in 1.0f64..4.0, w in 0.5f64..3.0) {
        let g = omega(16);
        let u = BoxField::from_fn(g.clone(), |z| (k * z[0]).sin() + z[1]).unwrap();
        let v = BoxField::from_fn(g.clone(), |z| (w * z[1]).cos() * z[0]).unwrap();
        let combo = BoxField::new(g, u.values().iter().zip(v.values()).map(|(x, y)| a * x + y).collect()).unwrap();
        let (eu, ev, ec) = (extend_to_box(&u, 2).unwrap(), extend_to_box(&v, 2).unwrap(), extend_to_box(&combo, 2).unwrap());
        let want = eu.field.scaled(a);
        let want = BoxField::new(want.grid_arc().clone(), want.values().iter().zip(ev.field.values()).map(|(x, y)| x + y).collect()).unwrap();
        prop_assert!(ec.field.sub(&want).unwrap().max_abs() <= 1e-9 * (1.0 + want.max_abs()));
    }

    #[test]
    fn polynomials_below_the_order_are_reproduced(k in 0i32..4, t_power in 0i32..2) {
        // K = 2m = 4 in space and K = m = 2 in time.
        let f = BoxField::from_fn(omega(24), |z| z[0].powi(k) * z[1].powi(t_power)).unwrap();
        let e = extend_to_box(&f, 2).unwrap();
        let want = BoxField::from_fn(e.field.grid_arc().clone(), |z| z[0].powi(k) * z[1].powi(t_power)).unwrap();
        prop_assert!(e.field.sub(&want).unwrap().max_abs() <= 1e-9);
    }
}
