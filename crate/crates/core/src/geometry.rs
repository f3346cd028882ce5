//! Anisotropic scaling arithmetic.
//!
//! Space-time points are `z = (x, t)` with the `n` spatial coordinates first
//! and time last. An [`Anisotropy`] assigns a positive weight to every axis;
//! the parabolic choice `(1, …, 1, 2)` makes `μ^a z = (μx, μ²t)` and turns
//! `|z|_a` into the parabolic distance.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};

/// Axis weights `a = (a_1, …, a_{n+1})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Anisotropy {
    weights: Vec<f64>,
}

impl Anisotropy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(PlpError::config(
                "an anisotropy needs at least one spatial axis and a time axis",
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(PlpError::config(format!(
                "anisotropy weights must be finite and positive, got {w}"
            )));
        }
        Ok(Self { weights })
    }

    /// `(1, …, 1, 2)` with `n` spatial axes.
    pub fn parabolic(n: usize) -> Self {
        assert!(n >= 1, "at least one spatial axis");
        let mut weights = vec![1.0; n];
        weights.push(2.0);
        Self { weights }
    }

    /// `(1, …, 1)` on `n + 1` axes.
    pub fn isotropic(n: usize) -> Self {
        assert!(n >= 1, "at least one spatial axis");
        Self {
            weights: vec![1.0; n + 1],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, axis: usize) -> f64 {
        self.weights[axis]
    }

    /// Number of axes, `n + 1`.
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Number of spatial axes `n`.
    pub fn spatial_dim(&self) -> usize {
        self.weights.len() - 1
    }

    /// Sum of the weights; `n + 2` in the parabolic case.
    pub fn homogeneous_dimension(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_parabolic(&self) -> bool {
        let (time, space) = self.weights.split_last().expect("non-empty");
        *time == 2.0 && space.iter().all(|w| *w == 1.0)
    }

    pub fn is_isotropic(&self) -> bool {
        self.weights.iter().all(|w| *w == 1.0)
    }

    /// `|z|_a`: the unique `μ > 0` with `Σ z_i² / μ^{2 a_i} = 1`, and 0 at the
    /// origin.
    ///
    /// Panics if `z` does not have one entry per axis.
    pub fn norm(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.weights.len(), "point/anisotropy length");
        if self.is_isotropic() {
            return z.iter().fold(0.0_f64, |acc, v| acc.hypot(*v));
        }
        if self.is_parabolic() {
            let (t, x) = z.split_last().expect("non-empty");
            let r2 = x.iter().map(|v| v * v).sum::<f64>();
            // μ² solves μ⁴ − r²μ² − t² = 0.
            let mu2 = 0.5 * (r2 + r2.hypot(2.0 * t));
            return mu2.sqrt();
        }
        self.norm_by_bisection(z)
    }

    fn norm_by_bisection(&self, z: &[f64]) -> f64 {
        if z.iter().all(|v| *v == 0.0) {
            return 0.0;
        }
        // F(μ) = Σ z_i² μ^{-2a_i} is strictly decreasing in μ.
        let level = |mu: f64| -> f64 {
            z.iter()
                .zip(&self.weights)
                .map(|(v, a)| v * v * mu.powf(-2.0 * a))
                .sum::<f64>()
        };
        let mut lo = 1.0;
        let mut hi = 1.0;
        while level(lo) < 1.0 {
            lo *= 0.5;
        }
        while level(hi) > 1.0 {
            hi *= 2.0;
        }
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if level(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `Σ z_i² / r^{2a_i} < 1`, i.e. `|z|_a < r`, without solving for `|z|_a`.
    pub fn within(&self, z: &[f64], radius: f64) -> bool {
        z.iter()
            .zip(&self.weights)
            .map(|(v, a)| {
                let e = weight_power(radius, *a);
                (v / e) * (v / e)
            })
            .sum::<f64>()
            < 1.0
    }
}

/// `x^w`, through `powi` for integer weights so that dilations by powers of
/// two stay exact.
pub(crate) fn weight_power(x: f64, w: f64) -> f64 {
    if w.fract() == 0.0 && w.abs() < 64.0 {
        x.powi(w as i32)
    } else {
        x.powf(w)
    }
}

impl TryFrom<Vec<f64>> for Anisotropy {
    type Error = PlpError;
    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Anisotropy::new(weights)
    }
}

impl From<Anisotropy> for Vec<f64> {
    fn from(a: Anisotropy) -> Vec<f64> {
        a.weights
    }
}

/// A space-time point; spatial coordinates first, time last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `μ^a z = (μ^{a_1} z_1, …, μ^{a_{n+1}} z_{n+1})`.
pub fn dilate(z: &Point, a: &Anisotropy, mu: f64) -> Result<Point> {
    if z.len() != a.dim() {
        return Err(PlpError::structural(format!(
            "point has {} coordinates but the anisotropy has {} axes",
            z.len(),
            a.dim()
        )));
    }
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(PlpError::config(format!(
            "dilation factor must be finite and non-negative, got {mu}"
        )));
    }
    Ok(Point(
        z.0.iter()
            .zip(a.weights())
            .map(|(v, w)| weight_power(mu, *w) * v)
            .collect(),
    ))
}

/// `|z|_a`.
pub fn aniso_distance(z: &Point, a: &Anisotropy) -> f64 {
    a.norm(&z.0)
}

/// Axis-aligned box with per-axis bounds, used for `Ω_T`, its enlargement,
/// the plateau sets and periodic fundamental domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(PlpError::structural("box bounds must have equal, non-zero length"));
        }
        for (axis, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(PlpError::config(format!(
                    "box axis {axis}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[0, side)^{d}`.
    pub fn cube(dim: usize, side: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![side; dim])
    }

    /// `Ω_T = (0,1)^n × (0,T)`.
    pub fn omega_t(n: usize, horizon: f64) -> Result<Self> {
        let mut upper = vec![1.0; n];
        upper.push(horizon);
        Self::new(vec![0.0; n + 1], upper)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn lengths(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.length(i)).collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.length(i)).product()
    }

    pub fn center(&self) -> Point {
        Point(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(lo, hi)| 0.5 * (lo + hi))
                .collect(),
        )
    }

    /// Closed containment test.
    pub fn contains(&self, z: &[f64]) -> bool {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// True when `self` lies strictly inside `other` on every axis.
    pub fn strictly_inside(&self, other: &AxisBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|i| other.lower[i] < self.lower[i] && self.upper[i] < other.upper[i])
    }

    /// True when `self ⊆ other` (closed).
    pub fn inside(&self, other: &AxisBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|i| other.lower[i] <= self.lower[i] && self.upper[i] <= other.upper[i])
    }

    /// Anisotropic rescaling of the box, `μ^{-a}` applied to both corners.
    pub fn dilated(&self, a: &Anisotropy, mu: f64) -> Result<Self> {
        let scale = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .zip(a.weights())
                .map(|(x, w)| x / weight_power(mu, *w))
                .collect()
        };
        Self::new(scale(&self.lower), scale(&self.upper))
    }
}

/// A parabolic cube in either of its two shapes: a `|·|_a`-ball
/// `{z : |z − z₀|_a < r}` or a dilated lattice cube `2^{aj}[(0,1)^{n+1} + k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ParabolicCube {
    Ball { center: Point, radius: f64 },
    Lattice { scale: i32, offset: Vec<i64> },
}

impl ParabolicCube {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(PlpError::config(format!("cube radius must be positive, got {radius}")));
        }
        Ok(ParabolicCube::Ball { center, radius })
    }

    pub fn lattice(scale: i32, offset: Vec<i64>) -> Self {
        ParabolicCube::Lattice { scale, offset }
    }

    /// Lebesgue measure: `r^{Q}·ω_{n+1}` for a ball (the unit `|·|_a`-ball is
    /// the Euclidean unit ball), `2^{jQ}` for a lattice cube, where `Q` is the
    /// homogeneous dimension.
    pub fn measure(&self, a: &Anisotropy) -> f64 {
        let q = a.homogeneous_dimension();
        match self {
            ParabolicCube::Ball { radius, .. } => radius.powf(q) * unit_ball_volume(a.dim()),
            ParabolicCube::Lattice { scale, .. } => 2f64.powf(f64::from(*scale) * q),
        }
    }

    /// Per-axis lower corner and side lengths of the lattice form, or the
    /// bounding box `center ± r^{a_i}` of the ball form.
    pub fn bounding_box(&self, a: &Anisotropy) -> (Vec<f64>, Vec<f64>) {
        match self {
            ParabolicCube::Ball { center, radius } => {
                let ext: Vec<f64> = a.weights().iter().map(|w| weight_power(*radius, *w)).collect();
                let lo = center.0.iter().zip(&ext).map(|(c, e)| c - e).collect();
                let side = ext.iter().map(|e| 2.0 * e).collect();
                (lo, side)
            }
            ParabolicCube::Lattice { scale, offset } => {
                let side: Vec<f64> = a
                    .weights()
                    .iter()
                    .map(|w| 2f64.powf(f64::from(*scale) * w))
                    .collect();
                let lo = offset.iter().zip(&side).map(|(k, s)| *k as f64 * s).collect();
                (lo, side)
            }
        }
    }

    /// Image of the cube under `z ↦ μ^{-a} z`, the change of variables that
    /// turns `f` into `f(μ^a ·)`. For lattice cubes `μ` must be a power of two.
    pub fn dilated(&self, a: &Anisotropy, mu: f64) -> Result<Self> {
        match self {
            ParabolicCube::Ball { center, radius } => {
                let c = dilate(center, a, 1.0 / mu)?;
                ParabolicCube::ball(c, radius / mu)
            }
            ParabolicCube::Lattice { scale, offset } => {
                let shift = mu.log2();
                if shift.fract() != 0.0 {
                    return Err(PlpError::config(
                        "lattice cubes can only be dilated by powers of two",
                    ));
                }
                Ok(ParabolicCube::Lattice {
                    scale: scale - shift as i32,
                    offset: offset.clone(),
                })
            }
        }
    }
}

fn unit_ball_volume(dim: usize) -> f64 {
    // V_d = 2π/d · V_{d−2}, V_0 = 1, V_1 = 2.
    let mut v = if dim % 2 == 0 { 1.0 } else { 2.0 };
    let mut d = if dim % 2 == 0 { 2 } else { 3 };
    while d <= dim {
        v *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    v
}

/// Which lattice cubes the sampler emits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticePolicy {
    None,
    Full,
    PerScale(usize),
}

/// Whether cubes may stick out of the domain (periodic data) or must lie
/// inside it (bounded domains such as `Ω_T`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Intersect,
    Inside,
}

/// Budget and seed for [`cube_sampler`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerPolicy {
    pub lattice: LatticePolicy,
    pub random: usize,
    pub seed: u64,
    /// Explicit lattice scales; derived from the grid spacing when absent.
    pub scales: Option<(i32, i32)>,
    pub containment: Containment,
}

impl Default for SamplerPolicy {
    fn default() -> Self {
        Self {
            lattice: LatticePolicy::PerScale(64),
            random: 256,
            seed: 7,
            scales: None,
            containment: Containment::Intersect,
        }
    }
}

/// Lattice scales `j` whose cubes have at least two samples per axis and fit
/// inside the domain.
pub fn resolvable_lattice_scales(domain: &AxisBox, a: &Anisotropy, spacing: &[f64]) -> Option<(i32, i32)> {
    let mut lo = i32::MIN;
    let mut hi = i32::MAX;
    for axis in 0..domain.dim() {
        let w = a.weight(axis);
        // 2^{j w} ≥ 2h  and  2^{j w} ≤ L
        let jl = ((2.0 * spacing[axis]).log2() / w - 1e-12).ceil() as i32;
        let jh = (domain.length(axis).log2() / w + 1e-12).floor() as i32;
        lo = lo.max(jl);
        hi = hi.min(jh);
    }
    (lo <= hi).then_some((lo, hi))
}

/// Deterministic family of parabolic cubes: a dyadic lattice over the
/// resolvable scales plus seeded random `|·|_a`-balls.
pub fn cube_sampler(
    domain: &AxisBox,
    a: &Anisotropy,
    policy: &SamplerPolicy,
    spacing: Option<&[f64]>,
) -> Result<Vec<ParabolicCube>> {
    if domain.dim() != a.dim() {
        return Err(PlpError::structural("domain and anisotropy dimensions differ"));
    }
    if policy.lattice == LatticePolicy::None && policy.random == 0 {
        return Err(PlpError::config("cube sampler policy requests zero cubes"));
    }
    if let LatticePolicy::PerScale(0) = policy.lattice {
        if policy.random == 0 {
            return Err(PlpError::config("cube sampler policy requests zero cubes"));
        }
    }
    let mut cubes = Vec::new();

    if policy.lattice != LatticePolicy::None {
        let scales = match (policy.scales, spacing) {
            (Some(s), _) => Some(s),
            (None, Some(h)) => resolvable_lattice_scales(domain, a, h),
            (None, None) => {
                return Err(PlpError::config(
                    "lattice cubes need either explicit scales or the grid spacing",
                ))
            }
        };
        if let Some((j0, j1)) = scales {
            for j in j0..=j1 {
                let ranges = lattice_offset_ranges(domain, a, j, policy.containment);
                let count: usize = ranges.iter().map(|(lo, hi)| (hi - lo + 1).max(0) as usize).product();
                if count == 0 {
                    continue;
                }
                let picks: Vec<usize> = match policy.lattice {
                    LatticePolicy::PerScale(cap) if count > cap => {
                        let mut rng = ChaCha8Rng::seed_from_u64(scale_seed(policy.seed, j));
                        let mut v = index::sample(&mut rng, count, cap).into_vec();
                        v.sort_unstable();
                        v
                    }
                    _ => (0..count).collect(),
                };
                for flat in picks {
                    cubes.push(ParabolicCube::lattice(j, unflatten_offset(flat, &ranges)));
                }
            }
        }
    }

    if policy.random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed ^ 0x5EED_BA11_0000_0001);
        let dim = domain.dim();
        let shrink = if policy.containment == Containment::Inside { 0.999 } else { 1.0 };
        let r_max = (0..dim)
            .map(|i| (0.5 * domain.length(i)).powf(1.0 / a.weight(i)))
            .fold(f64::INFINITY, f64::min)
            * shrink;
        let mut r_min = match spacing {
            Some(h) => (0..dim)
                .map(|i| (2.0 * h[i]).powf(1.0 / a.weight(i)))
                .fold(0.0, f64::max),
            None => r_max / 64.0,
        };
        if r_min >= r_max {
            r_min = 0.5 * r_max;
        }
        let (ln_lo, ln_hi) = (r_min.ln(), r_max.ln());
        for _ in 0..policy.random {
            let radius = rng.random_range(ln_lo..ln_hi).exp();
            let center = (0..dim)
                .map(|i| {
                    let (lo, hi) = (domain.lower()[i], domain.upper()[i]);
                    match policy.containment {
                        Containment::Intersect => rng.random_range(lo..hi),
                        Containment::Inside => {
                            let e = weight_power(radius, a.weight(i));
                            rng.random_range(lo + e..hi - e)
                        }
                    }
                })
                .collect();
            cubes.push(ParabolicCube::Ball {
                center: Point(center),
                radius,
            });
        }
    }

    if cubes.is_empty() {
        return Err(PlpError::config("cube sampler produced no cubes for this domain"));
    }
    Ok(cubes)
}

fn scale_seed(seed: u64, scale: i32) -> u64 {
    seed ^ (i64::from(scale) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Inclusive offset ranges per axis for lattice cubes of scale `j`.
pub(crate) fn lattice_offset_ranges(
    domain: &AxisBox,
    a: &Anisotropy,
    scale: i32,
    containment: Containment,
) -> Vec<(i64, i64)> {
    (0..domain.dim())
        .map(|i| {
            let side = 2f64.powf(f64::from(scale) * a.weight(i));
            let lo = domain.lower()[i] / side;
            let hi = domain.upper()[i] / side;
            match containment {
                Containment::Intersect => {
                    ((lo + 1e-12).floor() as i64, (hi - 1e-12).ceil() as i64 - 1)
                }
                Containment::Inside => {
                    ((lo - 1e-12).ceil() as i64, (hi + 1e-12).floor() as i64 - 1)
                }
            }
        })
        .collect()
}

fn unflatten_offset(mut flat: usize, ranges: &[(i64, i64)]) -> Vec<i64> {
    let mut out = vec![0; ranges.len()];
    for (axis, (lo, hi)) in ranges.iter().enumerate().rev() {
        let len = (hi - lo + 1) as usize;
        out[axis] = lo + (flat % len) as i64;
        flat /= len;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dilate_examples() {
        let a = Anisotropy::new(vec![1.0, 2.0]).unwrap();
        let z = Point::new(vec![2.0, 4.0]);
        assert_eq!(dilate(&z, &a, 0.5).unwrap().0, vec![1.0, 1.0]);
        assert_eq!(dilate(&z, &a, 1.0).unwrap(), z);
        let z = Point::new(vec![3.0, 5.0]);
        let twice = dilate(&dilate(&z, &a, 2.0).unwrap(), &a, 0.25).unwrap();
        assert_eq!(twice.0, vec![1.5, 1.25]);
        assert_eq!(twice, dilate(&z, &a, 0.5).unwrap());
    }

    #[test]
    fn dilate_rejects_length_mismatch() {
        let a = Anisotropy::parabolic(2);
        assert!(matches!(
            dilate(&Point::new(vec![1.0, 2.0]), &a, 2.0),
            Err(PlpError::Structural(_))
        ));
    }

    #[test]
    fn parabolic_distance_examples() {
        let a2 = Anisotropy::parabolic(2);
        assert_eq!(a2.norm(&[3.0, 4.0, 0.0]), 5.0);
        let a1 = Anisotropy::parabolic(1);
        assert_eq!(a1.norm(&[0.0, 9.0]), 3.0);
        assert_eq!(a1.norm(&[0.0, 0.0]), 0.0);

        // Bisection on Σ x²/μ² + t²/μ⁴ = 1, independent of the closed form.
        let defining = |mu: f64| 1.0 / (mu * mu) + 1.0 / mu.powi(4) - 1.0;
        let (mut lo, mut hi) = (0.5_f64, 4.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if defining(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let expected = 0.5 * (lo + hi);
        assert!((expected - 1.272_019_650).abs() < 1e-9);
        assert!((a1.norm(&[1.0, 1.0]) - expected).abs() < 1e-12);
    }

    #[test]
    fn general_anisotropy_uses_bisection() {
        let a = Anisotropy::new(vec![1.0, 3.0]).unwrap();
        let z = [0.7, -1.9];
        let mu = a.norm(&z);
        let level = z[0] * z[0] / (mu * mu) + z[1] * z[1] / mu.powi(6);
        assert!((level - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lattice_count_unit_box() {
        let a = Anisotropy::parabolic(1);
        let domain = AxisBox::cube(2, 1.0).unwrap();
        let policy = SamplerPolicy {
            lattice: LatticePolicy::Full,
            random: 0,
            seed: 1,
            scales: Some((-3, 0)),
            containment: Containment::Intersect,
        };
        let cubes = cube_sampler(&domain, &a, &policy, None).unwrap();
        // Per scale j ≤ 0: 2^{-j} spatial × 4^{-j} temporal cubes.
        let expected: usize = (0..=3).map(|k| (1usize << k) * (1usize << (2 * k))).sum();
        assert_eq!(cubes.len(), expected);
        let at = |j: i32| {
            cubes
                .iter()
                .filter(|c| matches!(c, ParabolicCube::Lattice { scale, .. } if *scale == j))
                .count()
        };
        assert_eq!(at(0), 1);
        assert_eq!(at(-1), 8);

        let other = SamplerPolicy { seed: 99, ..policy };
        assert_eq!(cube_sampler(&domain, &a, &other, None).unwrap(), cubes);
    }

    #[test]
    fn sampler_is_seeded() {
        let a = Anisotropy::parabolic(1);
        let domain = AxisBox::cube(2, 2.0 * std::f64::consts::PI).unwrap();
        let h = [domain.length(0) / 64.0, domain.length(1) / 64.0];
        let policy = SamplerPolicy::default();
        let first = cube_sampler(&domain, &a, &policy, Some(&h)).unwrap();
        let second = cube_sampler(&domain, &a, &policy, Some(&h)).unwrap();
        assert_eq!(first, second);
        let other = SamplerPolicy { seed: 8, ..policy };
        assert_ne!(first, cube_sampler(&domain, &a, &other, Some(&h)).unwrap());
    }

    #[test]
    fn inside_containment_keeps_cubes_in_domain() {
        let a = Anisotropy::parabolic(1);
        let domain = AxisBox::omega_t(1, 1.0).unwrap();
        let h = [1.0 / 64.0, 1.0 / 64.0];
        let policy = SamplerPolicy {
            containment: Containment::Inside,
            ..SamplerPolicy::default()
        };
        for cube in cube_sampler(&domain, &a, &policy, Some(&h)).unwrap() {
            let (lo, side) = cube.bounding_box(&a);
            for i in 0..2 {
                assert!(lo[i] >= -1e-12 && lo[i] + side[i] <= domain.upper()[i] + 1e-12);
            }
        }
    }

    #[test]
    fn empty_policy_is_config_error() {
        let a = Anisotropy::parabolic(1);
        let domain = AxisBox::cube(2, 1.0).unwrap();
        let policy = SamplerPolicy {
            lattice: LatticePolicy::None,
            random: 0,
            ..SamplerPolicy::default()
        };
        assert!(matches!(
            cube_sampler(&domain, &a, &policy, None),
            Err(PlpError::Config(_))
        ));
    }

    #[test]
    fn cube_measures() {
        let a = Anisotropy::parabolic(1);
        assert_eq!(ParabolicCube::lattice(-1, vec![0, 0]).measure(&a), 2f64.powi(-3));
        let ball = ParabolicCube::ball(Point::new(vec![0.0, 0.0]), 2.0).unwrap();
        assert!((ball.measure(&a) - 8.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    fn point_and_scale() -> impl Strategy<Value = (Vec<f64>, f64)> {
        (prop::collection::vec(-50.0..50.0f64, 3), 0.01..100.0f64)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn homogeneity((z, mu) in point_and_scale()) {
            let a = Anisotropy::parabolic(2);
            let dz = dilate(&Point::new(z.clone()), &a, mu).unwrap();
            let base = a.norm(&z);
            prop_assert!((a.norm(&dz.0) - mu * base).abs() <= 1e-10 * (1.0 + base) * mu.max(1.0));
        }

        #[test]
        fn symmetry(z in prop::collection::vec(-50.0..50.0f64, 3)) {
            let a = Anisotropy::parabolic(2);
            let neg: Vec<f64> = z.iter().map(|v| -v).collect();
            prop_assert_eq!(a.norm(&z), a.norm(&neg));
        }

        #[test]
        fn monotone_in_each_coordinate(
            z in prop::collection::vec(-20.0..20.0f64, 3),
            axis in 0usize..3,
            grow in 0.0..10.0f64,
        ) {
            let a = Anisotropy::parabolic(2);
            let mut bigger = z.clone();
            bigger[axis] = z[axis].signum() * (z[axis].abs() + grow);
            prop_assert!(a.norm(&bigger) >= a.norm(&z));
        }

        #[test]
        fn isotropic_reduction(z in prop::collection::vec(-50.0..50.0f64, 4)) {
            let a = Anisotropy::isotropic(3);
            let euclid = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((a.norm(&z) - euclid).abs() <= 1e-14 * euclid.max(1.0));
        }
    }
}
