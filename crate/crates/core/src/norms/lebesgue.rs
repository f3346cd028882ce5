use crate::boxfield::BoxField;
use crate::error::{PlpError, Result};
use crate::field::Field;

pub(crate) fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p >= 1.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(PlpError::config(format!("{name} must lie in [1, ∞], got {p}")))
    }
}

/// `(Σ w_k |v_k|^p)^{1/p}`, scaled by the max to stay finite for large `p`.
pub(crate) fn weighted_lp(values: &[f64], weight: impl Fn(usize) -> f64, p: f64) -> f64 {
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || top == 0.0 {
        return top;
    }
    let sum: f64 = values
        .iter()
        .enumerate()
        .map(|(k, v)| weight(k) * (v.abs() / top).powf(p))
        .sum();
    top * sum.powf(1.0 / p)
}

/// `‖f‖_{L^p}` with cell weights `h_1⋯h_{n+1}`; `p = ∞` gives the grid max.
pub fn norm_lp(f: &Field, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let h = f.grid().cell_volume();
    Ok(weighted_lp(f.values(), |_| h, p))
}

/// Grid max of `|f|`.
pub fn norm_linf(f: &Field) -> f64 {
    f.max_abs()
}

/// `‖f‖_{L^p}` on a closed box with trapezoid weights.
pub fn box_norm_lp(f: &BoxField, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let w = f.grid().quadrature_weights();
    Ok(weighted_lp(f.values(), |k| w[k], p))
}
