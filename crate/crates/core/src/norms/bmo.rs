use rayon::prelude::*;
use serde::Serialize;

use super::cubes::SampleLayout;
use super::lebesgue::box_norm_lp;
use crate::boxfield::BoxField;
use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::geometry::{cube_sampler, Containment, ParabolicCube, SamplerPolicy};

#[derive(Debug, Clone, Serialize)]
pub struct BmoReport {
    pub value: f64,
    pub cubes: usize,
    /// Cubes that contained no sample.
    pub skipped: usize,
    pub worst_cube: Option<ParabolicCube>,
}

/// `min_c mean|v − c|`, attained at the (lower) median.
pub fn mean_oscillation(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mid = (values.len() - 1) / 2;
    let (_, med, _) = values.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    let med = *med;
    values.iter().map(|v| (v - med).abs()).sum::<f64>() / values.len() as f64
}

fn bmo_over(values: &[f64], layout: &SampleLayout, cubes: &[ParabolicCube]) -> BmoReport {
    let per_cube: Vec<Option<f64>> = cubes
        .par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(idx, buf): &mut (Vec<usize>, Vec<f64>), cube| {
                layout.collect(cube, idx);
                if idx.is_empty() {
                    return None;
                }
                buf.clear();
                buf.extend(idx.iter().map(|i| values[*i]));
                Some(mean_oscillation(buf))
            },
        )
        .collect();
    let mut report = BmoReport {
        value: 0.0,
        cubes: cubes.len(),
        skipped: 0,
        worst_cube: None,
    };
    for (cube, osc) in cubes.iter().zip(per_cube) {
        match osc {
            None => report.skipped += 1,
            Some(v) if v > report.value || report.worst_cube.is_none() => {
                report.value = v;
                report.worst_cube = Some(cube.clone());
            }
            Some(_) => {}
        }
    }
    report
}

/// `sup_Q min_c (1/|Q|) ∫_Q |f − c|` over an explicit cube family.
pub fn norm_bmo_cubes(f: &Field, cubes: &[ParabolicCube]) -> Result<BmoReport> {
    if cubes.is_empty() {
        return Err(PlpError::config("BMO needs at least one cube"));
    }
    Ok(bmo_over(f.values(), &SampleLayout::periodic(f.grid()), cubes))
}

/// BMO over the cubes drawn by `policy` on the field's periodic domain.
pub fn norm_bmo(f: &Field, policy: &SamplerPolicy) -> Result<BmoReport> {
    let grid = f.grid();
    let cubes = cube_sampler(grid.domain(), grid.anisotropy(), policy, Some(&grid.spacings()))?;
    norm_bmo_cubes(f, &cubes)
}

/// BMO on a closed box, cubes restricted to lie inside it.
pub fn box_norm_bmo(f: &BoxField, policy: &SamplerPolicy) -> Result<BmoReport> {
    let grid = f.grid();
    let policy = SamplerPolicy {
        containment: Containment::Inside,
        ..policy.clone()
    };
    let cubes = cube_sampler(grid.domain(), grid.anisotropy(), &policy, Some(&grid.spacings()))?;
    Ok(bmo_over(f.values(), &SampleLayout::closed(grid), &cubes))
}

#[derive(Debug, Clone, Serialize)]
pub struct BarBmoReport {
    pub value: f64,
    pub bmo: BmoReport,
    pub l1: f64,
}

/// `‖f‖_{BMO^a(Ω_T)} + ‖f‖_{L¹(Ω_T)}`.
pub fn norm_bar_bmo(f: &BoxField, policy: &SamplerPolicy) -> Result<BarBmoReport> {
    let bmo = box_norm_bmo(f, policy)?;
    let l1 = box_norm_lp(f, 1.0)?;
    Ok(BarBmoReport {
        value: bmo.value + l1,
        bmo,
        l1,
    })
}
