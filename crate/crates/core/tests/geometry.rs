use parabolic_lp::error::PlpError;
use parabolic_lp::geometry::{
    aniso_distance, cube_sampler, dilate, Anisotropy, AxisBox, Containment, LatticePolicy, ParabolicCube, Point,
    SamplerPolicy,
};
use proptest::prelude::*;

fn p(v: &[f64]) -> Point {
    Point::new(v.to_vec())
}

#[test]
fn dilation_examples() {
    let a = Anisotropy::parabolic(1);
    assert_eq!(dilate(&p(&[1.0, 1.0]), &a, 2.0).unwrap().coords(), &[2.0, 4.0]);
    assert_eq!(dilate(&p(&[2.0, 4.0]), &a, 0.5).unwrap().coords(), &[1.0, 1.0]);
    let err = dilate(&p(&[1.0, 1.0, 1.0]), &a, 2.0).unwrap_err();
    assert!(matches!(err, PlpError::Structural(_)));
}

#[test]
fn distance_examples() {
    let a = Anisotropy::parabolic(1);
    assert_eq!(aniso_distance(&p(&[0.0, 9.0]), &a), 3.0);
    assert_eq!(aniso_distance(&p(&[0.0, 0.0]), &a), 0.0);
    // μ² is the golden ratio for (1, 1).
    let golden: f64 = 0.5 * (1.0 + 5f64.sqrt());
    assert!((aniso_distance(&p(&[1.0, 1.0]), &a) - golden.sqrt()).abs() < 1e-12);
    assert!((aniso_distance(&p(&[1.0, 1.0]), &a) - 1.272019650).abs() < 1e-9);
    let iso = Anisotropy::isotropic(2);
    assert_eq!(aniso_distance(&p(&[3.0, 4.0, 0.0]), &iso), 5.0);
}

/// Independent root finder for `Σ z_i² μ^{−2a_i} = 1` (plain bisection on
/// a log scale).
fn reference_norm(z: &[f64], w: &[f64]) -> f64 {
    let f = |mu: f64| z.iter().zip(w).map(|(v, a)| v * v * mu.powf(-2.0 * a)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid.exp2()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp2()
}

#[test]
fn general_weights_match_reference_root() {
    let a = Anisotropy::new(vec![1.0, 1.5, 3.0]).unwrap();
    for z in [[0.3, -2.0, 0.7], [1.0, 1.0, 1.0], [1e-3, 4.0, -50.0]] {
        let got = aniso_distance(&p(&z), &a);
        let want = reference_norm(&z, a.weights());
        assert!((got - want).abs() <= 1e-10 * want, "{z:?}: {got} vs {want}");
    }
}

#[test]
fn invalid_weights_are_rejected() {
    assert!(Anisotropy::new(vec![]).is_err());
    assert!(Anisotropy::new(vec![1.0, -2.0]).is_err());
    assert!(Anisotropy::new(vec![1.0, f64::NAN]).is_err());
}

#[test]
fn cube_measures_scale_with_homogeneous_dimension() {
    let a = Anisotropy::parabolic(1);
    let unit = ParabolicCube::lattice(0, vec![0, 0]);
    assert_eq!(unit.measure(&a), 1.0);
    assert_eq!(ParabolicCube::lattice(1, vec![0, 0]).measure(&a), 8.0);
    let ball = ParabolicCube::ball(p(&[0.0, 0.0]), 2.0).unwrap();
    assert!((ball.measure(&a) - 8.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!(ParabolicCube::ball(p(&[0.0, 0.0]), 0.0).is_err());
}

#[test]
fn sampler_is_deterministic_and_respects_containment() {
    let a = Anisotropy::parabolic(1);
    let domain = AxisBox::omega_t(1, 1.0).unwrap();
    let policy = SamplerPolicy {
        lattice: LatticePolicy::Full,
        random: 40,
        seed: 3,
        scales: None,
        containment: Containment::Inside,
    };
    let h = [1.0 / 64.0, 1.0 / 64.0];
    let first = cube_sampler(&domain, &a, &policy, Some(&h)).unwrap();
    let second = cube_sampler(&domain, &a, &policy, Some(&h)).unwrap();
    assert_eq!(first, second);
    assert!(!first.is_empty());
    for cube in &first {
        let (lo, side) = cube.bounding_box(&a);
        for axis in 0..2 {
            assert!(lo[axis] >= -1e-12 && lo[axis] + side[axis] <= domain.upper()[axis] + 1e-12);
        }
    }
    let other = cube_sampler(&domain, &a, &SamplerPolicy { seed: 4, ..policy.clone() }, Some(&h)).unwrap();
    assert_ne!(first, other);

    let empty = SamplerPolicy {
        lattice: LatticePolicy::None,
        random: 0,
        ..policy
    };
    assert!(matches!(cube_sampler(&domain, &a, &empty, Some(&h)), Err(PlpError::Config(_))));
}

fn point_pair() -> impl Strategy<Value = (Vec<f64>, f64, f64)> {
    (
        prop::collection::vec(-50.0f64..50.0, 3),
        0.05f64..20.0,
        0.05f64..20.0,
    )
}

proptest! {
    #[test]
    fn dilations_compose((z, mu, nu) in point_pair()) {
        let a = Anisotropy::parabolic(2);
        let once = dilate(&dilate(&p(&z), &a, mu).unwrap(), &a, nu).unwrap();
        let direct = dilate(&p(&z), &a, mu * nu).unwrap();
        for (x, y) in once.coords().iter().zip(direct.coords()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn norm_is_homogeneous((z, mu, _) in point_pair()) {
        let a = Anisotropy::parabolic(2);
        let base = aniso_distance(&p(&z), &a);
        let scaled = aniso_distance(&dilate(&p(&z), &a, mu).unwrap(), &a);
        prop_assert!((scaled - mu * base).abs() <= 1e-12 * (1.0 + mu * base));
    }

    #[test]
    fn closed_form_matches_bisection(z in prop::collection::vec(-10.0f64..10.0, 2)) {
        prop_assume!(z.iter().any(|v| v.abs() > 1e-6));
        let a = Anisotropy::parabolic(1);
        let got = aniso_distance(&p(&z), &a);
        let want = reference_norm(&z, a.weights());
        prop_assert!((got - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn within_agrees_with_norm(z in prop::collection::vec(-3.0f64..3.0, 2), r in 0.1f64..3.0) {
        let a = Anisotropy::parabolic(1);
        let d = aniso_distance(&p(&z), &a);
        prop_assume!((d - r).abs() > 1e-9 * r);
        prop_assert_eq!(a.within(&z, r), d < r);
    }
}
