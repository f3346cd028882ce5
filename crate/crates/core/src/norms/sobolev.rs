use crate::boxfield::BoxField;
use crate::error::{PlpError, Result};
use crate::field::{derivative_tables, DerivativeOrder, Field};
use crate::grid::for_each_index;

use super::lebesgue::box_norm_lp;

/// Every `(r, s)` with `2r + |s| ≤ 2m`, `s` a multi-index over `n` spatial axes.
pub fn parabolic_orders(n: usize, m: usize) -> Vec<DerivativeOrder> {
    let mut out = Vec::new();
    for r in 0..=m {
        let budget = 2 * m - 2 * r;
        let mut spatial = Vec::new();
        multi_indices(n, budget, &mut vec![0; n], 0, &mut spatial);
        for s in spatial {
            out.push(DerivativeOrder::new(r, s));
        }
    }
    out
}

fn multi_indices(n: usize, budget: usize, cur: &mut Vec<usize>, axis: usize, out: &mut Vec<Vec<usize>>) {
    if axis == n {
        out.push(cur.clone());
        return;
    }
    for k in 0..=budget {
        cur[axis] = k;
        multi_indices(n, budget - k, cur, axis + 1, out);
    }
    cur[axis] = 0;
}

/// `‖∂^α f‖_{L²}` through Parseval, with the same multipliers as
/// [`crate::field::spectral_derivative`].
pub fn derivative_l2(f: &Field, order: &DerivativeOrder) -> f64 {
    let grid = f.grid();
    let per_axis = order.per_axis();
    let tables: Vec<Vec<f64>> = derivative_tables(grid, &per_axis)
        .into_iter()
        .map(|t| t.iter().map(|c| c.norm_sqr()).collect())
        .collect();
    let spec = f.spectrum();
    let mut sum = 0.0;
    for_each_index(grid.dims(), |flat, idx| {
        let w: f64 = idx.iter().enumerate().map(|(a, k)| tables[a][*k]).product();
        sum += w * spec[flat].norm_sqr();
    });
    let n = grid.len() as f64;
    (sum * grid.volume() / (n * n)).sqrt()
}

/// `Σ_{2r+|s| ≤ 2m} ‖∂_t^r ∂_x^s f‖_{L²}`.
pub fn norm_sobolev_parabolic(f: &Field, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(PlpError::config("Sobolev order m must be at least 1"));
    }
    let frac = f.nyquist_energy_fraction();
    if frac > 1e-6 {
        log::warn!("Nyquist modes carry {frac:.2e} of the spectral energy; Sobolev norm is unreliable");
    }
    let n = f.grid().ndim() - 1;
    Ok(parabolic_orders(n, m).iter().map(|o| derivative_l2(f, o)).sum())
}

/// The same sum on a closed box, with finite differences and trapezoid
/// quadrature.
pub fn box_norm_sobolev_parabolic(f: &BoxField, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(PlpError::config("Sobolev order m must be at least 1"));
    }
    let d = f.grid().ndim();
    let mut total = 0.0;
    for order in parabolic_orders(d - 1, m) {
        let mut g = f.clone();
        for (axis, o) in order.per_axis().iter().enumerate() {
            g = g.derivative(axis, *o)?;
        }
        total += box_norm_lp(&g, 2.0)?;
    }
    Ok(total)
}

/// `(Σ ‖ξ‖^{2s} |ĝ|²)^{1/2}` with the Euclidean `‖ξ‖` (Nyquist entries
/// dropped as for first derivatives).
pub fn norm_homogeneous_hs(g: &Field, s: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(PlpError::config(format!("smoothness s must be finite and ≥ 0, got {s}")));
    }
    let grid = g.grid();
    let xi: Vec<Vec<f64>> = (0..grid.ndim()).map(|a| grid.derivative_frequencies(a)).collect();
    let spec = g.spectrum();
    let mut sum = 0.0;
    for_each_index(grid.dims(), |flat, idx| {
        let w = if s == 0.0 {
            1.0
        } else {
            let r2: f64 = idx.iter().enumerate().map(|(a, k)| xi[a][*k] * xi[a][*k]).sum();
            r2.powf(s)
        };
        sum += w * spec[flat].norm_sqr();
    });
    let n = grid.len() as f64;
    Ok((sum * grid.volume() / (n * n)).sqrt())
}
