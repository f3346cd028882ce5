use serde::Serialize;

use crate::error::{PlpError, Result};

/// Reflection weights `c_j` at the points `−λ_j`, `λ_j = 2^{−j}`, solving the
/// moment conditions `Σ_j c_j (−λ_j)^k = 1` for `k < K`.
///
/// The weights grow like `2^{K²/2}`, so each `c_j` is kept as an unevaluated
/// sum `hi + lo` of two doubles; the extension applies both parts.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionCoefficients {
    pub order: usize,
    pub lambdas: Vec<f64>,
    pub cs: Vec<f64>,
    pub cs_lo: Vec<f64>,
    /// Max-norm moment residual of `hi + lo`, accumulated without rounding
    /// loss.
    pub residual: f64,
    /// Same residual for the rounded weights `hi` alone.
    pub rounded_residual: f64,
    /// `‖A‖_∞ ‖A^{−1}‖_∞`.
    pub condition: f64,
}

pub const MAX_ORDER: usize = 12;

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Exact-as-possible `Σ terms` (cascaded two-sum).
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for t in terms {
        let (ns, e) = two_sum(s, t);
        s = ns;
        c += e;
    }
    s + c
}

/// Solves `Σ_j z_j x_j^k = b_k` (Björck–Pereyra, dual Vandermonde form).
fn bjorck_pereyra(x: &[f64], b: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut z = b.to_vec();
    for k in 0..n.saturating_sub(1) {
        for i in (k + 1..n).rev() {
            z[i] -= x[k] * z[i - 1];
        }
    }
    for k in (0..n.saturating_sub(1)).rev() {
        for i in k + 1..n {
            z[i] /= x[i] - x[i - k - 1];
        }
        for i in k..n - 1 {
            z[i] -= z[i + 1];
        }
    }
    z
}

/// `1 − Σ_j (hi_j + lo_j) x_j^k` for every `k`. Powers of `−2^{−j}` are exact,
/// so every product is exact and only the sum needs compensation.
fn moment_residuals(x: &[f64], hi: &[f64], lo: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let terms = x.iter().zip(hi.iter().zip(lo)).flat_map(|(xj, (h, l))| {
                let p = xj.powi(k as i32);
                [-(h * p), -(l * p)]
            });
            compensated_sum(std::iter::once(1.0).chain(terms))
        })
        .collect()
}

pub fn extension_coefficients(order: usize) -> Result<ExtensionCoefficients> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(PlpError::config(format!(
            "extension order must lie in 1..={MAX_ORDER}, got {order}"
        )));
    }
    let lambdas: Vec<f64> = (0..order).map(|j| 2f64.powi(-(j as i32))).collect();
    let x: Vec<f64> = lambdas.iter().map(|l| -l).collect();
    let mut hi = bjorck_pereyra(&x, &vec![1.0; order]);
    let mut lo = vec![0.0; order];
    for _ in 0..4 {
        let r = moment_residuals(&x, &hi, &lo);
        let delta = bjorck_pereyra(&x, &r);
        for j in 0..order {
            let (s, e) = two_sum(hi[j], delta[j]);
            let (s2, e2) = two_sum(s, lo[j] + e);
            hi[j] = s2;
            lo[j] = e2;
        }
    }
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let residual = max_abs(&moment_residuals(&x, &hi, &lo));
    let rounded_residual = max_abs(&moment_residuals(&x, &hi, &vec![0.0; order]));

    let norm_a = order as f64;
    let mut inv_rows = vec![0.0; order];
    for col in 0..order {
        let mut e = vec![0.0; order];
        e[col] = 1.0;
        for (row, v) in bjorck_pereyra(&x, &e).iter().enumerate() {
            inv_rows[row] += v.abs();
        }
    }
    let condition = norm_a * max_abs(&inv_rows);
    if condition > 1e12 {
        log::warn!("extension system of order {order} has condition estimate {condition:.2e}");
    }
    Ok(ExtensionCoefficients {
        order,
        lambdas,
        cs: hi,
        cs_lo: lo,
        residual,
        rounded_residual,
        condition,
    })
}

impl ExtensionCoefficients {
    /// `Σ_j c_j v_j` with both parts of every weight.
    pub fn combine(&self, values: &[f64]) -> f64 {
        let a: f64 = self.cs.iter().zip(values).map(|(c, v)| c * v).sum();
        let b: f64 = self.cs_lo.iter().zip(values).map(|(c, v)| c * v).sum();
        a + b
    }
}
