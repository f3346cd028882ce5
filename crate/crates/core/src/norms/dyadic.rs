use rayon::prelude::*;
use serde::Serialize;

use super::cubes::SampleLayout;
use super::lebesgue::{check_exponent, norm_lp};
use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::geometry::{cube_sampler, resolvable_lattice_scales, Containment, LatticePolicy, SamplerPolicy};
use crate::lp::{build_symbol_bank, lp_decompose, BankMode, CutoffProfile, DyadicSymbolBank, LpDecomposition};

fn check_q(q: f64) -> Result<()> {
    check_exponent("q", q)
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(PlpError::config(format!("smoothness s must be finite, got {s}")))
    }
}

/// `(Σ_j 2^{sqj} ‖φ_j * f‖_{L^p}^q)^{1/q}`, sup over `j` for `q = ∞`.
pub fn besov_of(d: &LpDecomposition, s: f64, p: f64, q: f64) -> Result<f64> {
    check_s(s)?;
    check_exponent("p", p)?;
    check_q(q)?;
    let terms = d
        .blocks()
        .map(|(j, b)| Ok(2f64.powf(s * f64::from(j)) * norm_lp(b, p)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(lq_sum(&terms, q))
}

fn lq_sum(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        terms.iter().fold(0.0, |m, t| m.max(*t))
    } else {
        let top = terms.iter().fold(0.0f64, |m, t| m.max(*t));
        if top == 0.0 {
            return 0.0;
        }
        top * terms.iter().map(|t| (t / top).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Besov norm with the default cutoff and the grid-resolvable scales.
pub fn norm_besov(f: &Field, s: f64, p: f64, q: f64, mode: BankMode) -> Result<f64> {
    let bank = build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), mode)?;
    besov_of(&lp_decompose(f, &bank)?, s, p, q)
}

/// Pointwise `(Σ_{j ∈ js} (2^{sj}|b_j|)^q)^{1/q}`.
fn pointwise_lq<'a>(blocks: impl Iterator<Item = (i32, &'a Field)>, s: f64, q: f64, len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for (j, b) in blocks {
        let w = 2f64.powf(s * f64::from(j));
        for (a, v) in acc.iter_mut().zip(b.values()) {
            let t = w * v.abs();
            if q.is_infinite() {
                *a = f64::max(*a, t);
            } else {
                *a += t.powf(q);
            }
        }
    }
    if !q.is_infinite() {
        for a in &mut acc {
            *a = a.powf(1.0 / q);
        }
    }
    acc
}

/// `‖(Σ_j 2^{sqj}|φ_j * f|^q)^{1/q}‖_{L^p}` for `p < ∞`.
pub fn triebel_of(d: &LpDecomposition, s: f64, p: f64, q: f64) -> Result<f64> {
    check_s(s)?;
    check_exponent("p", p)?;
    check_q(q)?;
    if p.is_infinite() {
        return Err(PlpError::config("finite-p Triebel norm needs p < ∞; use the cube form"));
    }
    let first = d.blocks().next().ok_or_else(|| PlpError::config("no blocks"))?.1;
    let acc = pointwise_lq(d.blocks(), s, q, first.len());
    let h = first.grid().cell_volume();
    Ok(super::lebesgue::weighted_lp(&acc, |_| h, p))
}

pub fn norm_triebel(f: &Field, s: f64, p: f64, q: f64) -> Result<f64> {
    let bank = build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), BankMode::Homogeneous)?;
    triebel_of(&lp_decompose(f, &bank)?, s, p, q)
}

#[derive(Debug, Clone, Serialize)]
pub struct TriebelInftyReport {
    pub value: f64,
    pub cubes: usize,
    pub cube_scales: (i32, i32),
    /// `‖residual‖_{L∞}`: the blocks beyond the resolvable range are not in
    /// the sum, and this bounds what they could add pointwise.
    pub truncated_tail: f64,
}

/// `sup_P ((1/|P|) ∫_P Σ_{j ≥ −scale(P)} |φ_j * f|^q)^{1/q}` over every
/// lattice cube resolvable on the grid.
pub fn triebel_infty_q_of(d: &LpDecomposition, q: f64) -> Result<TriebelInftyReport> {
    check_q(q)?;
    if q.is_infinite() {
        return Err(PlpError::config("the cube form needs q < ∞"));
    }
    let grid = d.residual().grid();
    let (jmin, jmax) = d.j_range();
    let Some((lo, hi)) = resolvable_lattice_scales(grid.domain(), grid.anisotropy(), &grid.spacings()) else {
        return Err(PlpError::config("no lattice cube scale is resolvable on this grid"));
    };
    let powered: Vec<Vec<f64>> = d
        .blocks()
        .map(|(_, b)| b.values().iter().map(|v| v.abs().powf(q)).collect())
        .collect();
    let layout = SampleLayout::periodic(grid);
    let mut value = 0.0f64;
    let mut cubes = 0;
    for scale in lo..=hi {
        let from = (-scale).max(jmin);
        let mut sum = vec![0.0; grid.len()];
        if from <= jmax {
            for row in &powered[(from - jmin) as usize..] {
                for (s, v) in sum.iter_mut().zip(row) {
                    *s += v;
                }
            }
        }
        let policy = SamplerPolicy {
            lattice: LatticePolicy::Full,
            random: 0,
            seed: 0,
            scales: Some((scale, scale)),
            containment: Containment::Intersect,
        };
        let tiles = cube_sampler(grid.domain(), grid.anisotropy(), &policy, None)?;
        cubes += tiles.len();
        let best = tiles
            .par_iter()
            .map_init(Vec::new, |idx, cube| {
                layout.collect(cube, idx);
                if idx.is_empty() {
                    0.0
                } else {
                    idx.iter().map(|i| sum[*i]).sum::<f64>() / idx.len() as f64
                }
            })
            .reduce(|| 0.0, f64::max);
        value = value.max(best);
    }
    Ok(TriebelInftyReport {
        value: value.powf(1.0 / q),
        cubes,
        cube_scales: (lo, hi),
        truncated_tail: d.residual().max_abs(),
    })
}

pub fn norm_triebel_infty_q(f: &Field, q: f64) -> Result<TriebelInftyReport> {
    let bank = build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), BankMode::Homogeneous)?;
    triebel_infty_q_of(&lp_decompose(f, &bank)?, q)
}

/// `‖(Σ_{j≥1} (2^{sj}|φ_j * f|)^q)^{1/q}‖_{L∞}`.
pub fn fplus_of(d: &LpDecomposition, s: f64, q: f64) -> Result<f64> {
    check_s(s)?;
    check_q(q)?;
    if d.j_range().1 < 1 {
        return Err(PlpError::config("no resolvable scale j ≥ 1 for the high-frequency part"));
    }
    let len = d.residual().len();
    let acc = pointwise_lq(d.blocks().filter(|(j, _)| *j >= 1), s, q, len);
    Ok(acc.iter().fold(0.0, |m, v| m.max(*v)))
}

/// `‖(Σ_{j≤−1} (2^{sj}|φ_j * f|)^q)^{1/q}‖_{L∞}`.
pub fn fminus_of(d: &LpDecomposition, s: f64, q: f64) -> Result<f64> {
    check_s(s)?;
    check_q(q)?;
    if d.j_range().0 > -1 {
        return Err(PlpError::config("no resolvable scale j ≤ −1 for the low-frequency part"));
    }
    let len = d.residual().len();
    let acc = pointwise_lq(d.blocks().filter(|(j, _)| *j <= -1), s, q, len);
    Ok(acc.iter().fold(0.0, |m, v| m.max(*v)))
}

pub fn norm_fplus(f: &Field, s: f64, q: f64) -> Result<f64> {
    let bank = build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), BankMode::Homogeneous)?;
    fplus_of(&lp_decompose(f, &bank)?, s, q)
}

pub fn norm_fminus(f: &Field, s: f64, q: f64) -> Result<f64> {
    let bank = build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), BankMode::Homogeneous)?;
    fminus_of(&lp_decompose(f, &bank)?, s, q)
}

/// Pointwise `Σ_{j ∈ range} |φ_j * f|` and `(Σ_{j ∈ range} |φ_j * f|²)^{1/2}`
/// maxima, used by the explicit dyadic estimates.
pub fn block_sum_sup(d: &LpDecomposition, range: std::ops::RangeInclusive<i32>, q: f64) -> f64 {
    let len = d.residual().len();
    let acc = pointwise_lq(d.blocks().filter(|(j, _)| range.contains(j)), 0.0, q, len);
    acc.iter().fold(0.0, |m, v| m.max(*v))
}

/// Bank used by the dyadic norms when the caller does not supply one.
pub fn default_bank(f: &Field, mode: BankMode) -> Result<DyadicSymbolBank> {
    build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), mode)
}
