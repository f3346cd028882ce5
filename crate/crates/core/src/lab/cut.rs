use serde::Serialize;

use crate::error::{PlpError, Result};
use crate::field::{mean_subtract, Field};
use crate::lp::{lp_decompose, BankMode, LpDecomposition};
use crate::norms::{block_sum_sup, default_bank, fminus_of, fplus_of};

/// `C_γ = (1/(2^{2γ} − 1))^{1/2}`.
pub fn c_gamma(gamma: f64) -> f64 {
    (1.0 / (2f64.powf(2.0 * gamma) - 1.0)).sqrt()
}

/// Cut bound `(2N+1)^{1/2} F + C_γ 2^{−γN} S` with `S = ‖f₊‖ + ‖f₋‖`.
pub fn step1_bound(n: u32, gamma: f64, s: f64, f: f64) -> f64 {
    f64::from(2 * n + 1).sqrt() * f + c_gamma(gamma) * 2f64.powf(-gamma * f64::from(n)) * s
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicCut {
    pub gamma: f64,
    /// `‖f₊‖_{Ḟ^{γ}_{∞,2}} + ‖f₋‖_{Ḟ^{−γ}_{∞,2}}`.
    pub s: f64,
    /// `‖f‖_{Ḟ⁰_{∞,2}}`.
    pub f: f64,
    pub analytic_n: u32,
    /// `β ∈ [1, 2^γ)` making `log_{2^γ}(β S/F) − 1/2` the integer `analytic_n`.
    pub beta: f64,
    pub brute_n: u32,
    /// `(N, bound(N))` for `N = 1..=n_max`.
    pub curve: Vec<(u32, f64)>,
    pub agrees: bool,
}

/// The analytic cut and the brute-force minimizer of the cut bound.
pub fn optimize_dyadic_cut_values(s: f64, f: f64, gamma: f64, n_max: u32) -> Result<DyadicCut> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(PlpError::config(format!("γ must lie in (0, 1], got {gamma}")));
    }
    if !(s.is_finite() && f.is_finite() && s >= 0.0 && f > 0.0) {
        return Err(PlpError::Hypothesis(format!(
            "the cut needs finite norms with ‖f‖ > 0 (got S = {s}, F = {f})"
        )));
    }
    if n_max == 0 {
        return Err(PlpError::config("n_max must be at least 1"));
    }
    let base = 2f64.powf(gamma);
    let (analytic_n, beta) = if s <= base * f {
        (1, 1.0)
    } else {
        let n1 = (s / f).ln() / base.ln() - 0.5;
        let n = n1.ceil().max(1.0);
        let beta = base.powf(n + 0.5) * f / s;
        (n as u32, beta)
    };
    let curve: Vec<(u32, f64)> = (1..=n_max).map(|n| (n, step1_bound(n, gamma, s, f))).collect();
    let brute_n = curve
        .iter()
        .fold((1, f64::INFINITY), |best, (n, b)| if *b < best.1 { (*n, *b) } else { best })
        .0;
    Ok(DyadicCut {
        gamma,
        s,
        f,
        analytic_n,
        beta,
        brute_n,
        curve,
        agrees: analytic_n.abs_diff(brute_n) <= 1,
    })
}

/// The cut for a field: `S` from the pointwise `f₊`/`f₋` square functions,
/// `F` from the pointwise square function over all scales.
pub fn optimize_dyadic_cut(f: &Field, gamma: f64, n_max: u32) -> Result<DyadicCut> {
    let d = decompose_mean_free(f)?;
    let (s, f2) = cut_norms(&d, gamma)?;
    optimize_dyadic_cut_values(s, f2, gamma, n_max)
}

pub(crate) fn decompose_mean_free(f: &Field) -> Result<LpDecomposition> {
    let f0 = mean_subtract(f);
    lp_decompose(&f0, &default_bank(&f0, BankMode::Homogeneous)?)
}

pub(crate) fn cut_norms(d: &LpDecomposition, gamma: f64) -> Result<(f64, f64)> {
    let s = fplus_of(d, gamma, 2.0)? + fminus_of(d, -gamma, 2.0)?;
    let (lo, hi) = d.j_range();
    Ok((s, block_sum_sup(d, lo..=hi, 2.0)))
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitCheck {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    /// Right-hand side with `C = 1` for the branch selected by `x`.
    pub rhs_unit: f64,
    pub c_min: f64,
}

/// `x (log(e + y/x))^{1/2}` against `1 + x(log(e+y))^{1/2}` (x ≤ 1) or
/// `x(log(e+y))^{1/2}` (x > 1).
pub fn check_split_inequality(x: f64, y: f64) -> Result<SplitCheck> {
    if !(x > 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(PlpError::config(format!("split inequality needs x > 0, y ≥ 0 (got {x}, {y})")));
    }
    let e = std::f64::consts::E;
    let lhs = x * (e + y / x).ln().sqrt();
    let tail = x * (e + y).ln().sqrt();
    let rhs_unit = if x <= 1.0 { 1.0 + tail } else { tail };
    Ok(SplitCheck {
        x,
        y,
        lhs,
        rhs_unit,
        c_min: lhs / rhs_unit,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitScan {
    pub points: usize,
    pub c_global: f64,
    pub argmax: (f64, f64),
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

/// Grid points of the scan: `x` log-spaced in `[10⁻⁶, 10]`, `y = 0` plus
/// log-spaced `[10⁻⁶, 10⁶]`.
pub fn split_scan_axes(points: usize) -> (Vec<f64>, Vec<f64>) {
    let log_space = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect()
    };
    let xs = log_space(-6.0, 1.0, points.max(2));
    let mut ys = vec![0.0];
    ys.extend(log_space(-6.0, 6.0, points.max(2)));
    (xs, ys)
}

pub fn scan_split_inequality(points: usize) -> Result<SplitScan> {
    let (xs, ys) = split_scan_axes(points);
    let mut best = (0.0f64, (0.0, 0.0));
    for &x in &xs {
        for &y in &ys {
            let c = check_split_inequality(x, y)?.c_min;
            if c > best.0 {
                best = (c, (x, y));
            }
        }
    }
    Ok(SplitScan {
        points: xs.len() * ys.len(),
        c_global: best.0,
        argmax: best.1,
        x_range: (xs[0], xs[xs.len() - 1]),
        y_range: (0.0, ys[ys.len() - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_gamma_constant_is_one() {
        assert_eq!(c_gamma(0.5), 1.0);
    }

    #[test]
    fn small_ratio_takes_the_first_branch() {
        let cut = optimize_dyadic_cut_values(1.5, 1.0, 1.0, 64).unwrap();
        assert_eq!(cut.analytic_n, 1);
        assert_eq!(cut.beta, 1.0);
    }

    #[test]
    fn ratio_eight() {
        let cut = optimize_dyadic_cut_values(8.0, 1.0, 1.0, 64).unwrap();
        assert_eq!(cut.analytic_n, 3);
        assert!((1.0..2.0).contains(&cut.beta));
        assert!(((8.0 * cut.beta).log2() - 0.5 - 3.0).abs() < 1e-12);
        assert!(cut.agrees);
    }

    #[test]
    fn split_examples() {
        let c = check_split_inequality(1.0, 0.0).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15);
        assert!((c.c_min - 0.5).abs() < 1e-15);
        let big = check_split_inequality(1e6, 0.0).unwrap();
        assert!((big.c_min - 1.0).abs() < 1e-12);
    }
}
