use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::coefficients::{extension_coefficients, ExtensionCoefficients};
use crate::boxfield::{BoxField, BoxGrid};
use crate::error::{PlpError, Result};
use crate::geometry::AxisBox;
use crate::grid::{for_each_index, strides};

/// `f̃` on `Ω̃_T = (−1,2)^n × (−T,2T)`, sampled with the spacing of the
/// input grid.
#[derive(Debug, Clone)]
pub struct BoxExtension {
    pub field: BoxField,
    pub spatial: ExtensionCoefficients,
    pub temporal: ExtensionCoefficients,
    pub m: usize,
}

/// Summary of the coefficient solves, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionDiagnostics {
    pub m: usize,
    pub spatial: ExtensionCoefficients,
    pub temporal: ExtensionCoefficients,
}

impl BoxExtension {
    pub fn diagnostics(&self) -> ExtensionDiagnostics {
        ExtensionDiagnostics {
            m: self.m,
            spatial: self.spatial.clone(),
            temporal: self.temporal.clone(),
        }
    }
}

/// Lagrange interpolation of one line `v` (unit spacing in index space) at
/// fractional index `s`, using `points` nodes centered on `s` and shifted
/// inside at the ends.
fn interpolate(v: &[f64], s: f64, points: usize) -> f64 {
    let n = v.len();
    let nearest = s.round();
    if (s - nearest).abs() < 1e-12 && nearest >= 0.0 && (nearest as usize) < n {
        return v[nearest as usize];
    }
    let half = (points - 1) / 2;
    let start = (s.floor() as isize - half as isize).clamp(0, (n - points) as isize) as usize;
    let mut acc = 0.0;
    for j in 0..points {
        let xj = (start + j) as f64;
        let mut w = 1.0;
        for k in 0..points {
            if k != j {
                let xk = (start + k) as f64;
                w *= (s - xk) / (xj - xk);
            }
        }
        acc += w * v[start + j];
    }
    acc
}

/// Extends one sampled line on `[0, M]` (index space) to `[−M, 2M]`.
fn extend_line(v: &[f64], coeffs: &ExtensionCoefficients, points: usize, out: &mut [f64]) {
    let m = v.len() - 1;
    let mf = m as f64;
    let mut samples = vec![0.0; coeffs.order];
    for (i, o) in out.iter_mut().enumerate() {
        if (m..=2 * m).contains(&i) {
            *o = v[i - m];
            continue;
        }
        let u = (i as f64 - mf) / mf;
        for (s, lambda) in samples.iter_mut().zip(&coeffs.lambdas) {
            let target = if u < 0.0 { -lambda * u } else { 1.0 + lambda * (1.0 - u) };
            *s = interpolate(v, target * mf, points);
        }
        *o = coeffs.combine(&samples);
    }
}

fn extend_axis(
    values: &[f64],
    dims: &[usize],
    axis: usize,
    coeffs: &ExtensionCoefficients,
    points: usize,
) -> (Vec<f64>, Vec<usize>) {
    let mut new_dims = dims.to_vec();
    new_dims[axis] = 3 * (dims[axis] - 1) + 1;
    let (old_st, new_st) = (strides(dims), strides(&new_dims));
    let mut other = dims.to_vec();
    other[axis] = 1;
    let mut bases = Vec::new();
    for_each_index(&other, |_, idx| {
        let old: usize = idx.iter().zip(&old_st).map(|(k, s)| k * s).sum();
        let new: usize = idx.iter().zip(&new_st).map(|(k, s)| k * s).sum();
        bases.push((old, new));
    });
    let lines: Vec<Vec<f64>> = bases
        .par_iter()
        .map(|(old, _)| {
            let line: Vec<f64> = (0..dims[axis]).map(|k| values[old + k * old_st[axis]]).collect();
            let mut out = vec![0.0; new_dims[axis]];
            extend_line(&line, coeffs, points, &mut out);
            out
        })
        .collect();
    let mut out = vec![0.0; new_dims.iter().product()];
    for ((_, new), line) in bases.iter().zip(lines) {
        for (k, v) in line.into_iter().enumerate() {
            out[new + k * new_st[axis]] = v;
        }
    }
    (out, new_dims)
}

/// Extends `f` from `Ω_T` with `K = 2m` on spatial axes and `K = m` in time,
/// spatial axes first.
pub fn extend_to_box(f: &BoxField, m: usize) -> Result<BoxExtension> {
    let axes: Vec<usize> = (0..f.grid().ndim()).collect();
    extend_along(f, m, &axes)
}

/// As [`extend_to_box`] with an explicit axis order; every axis must appear
/// exactly once.
pub fn extend_along(f: &BoxField, m: usize, axes: &[usize]) -> Result<BoxExtension> {
    let grid = f.grid();
    let d = grid.ndim();
    if d < 2 {
        return Err(PlpError::structural("extension needs at least one spatial axis and time"));
    }
    let mut seen = axes.to_vec();
    seen.sort_unstable();
    if seen != (0..d).collect::<Vec<_>>() {
        return Err(PlpError::structural(format!("axis order {axes:?} is not a permutation of 0..{d}")));
    }
    if m == 0 {
        return Err(PlpError::config("smoothness index m must be positive"));
    }
    let dom = grid.domain();
    let horizon = dom.length(d - 1);
    let expected = AxisBox::omega_t(d - 1, horizon)?;
    let covers = dom
        .lower()
        .iter()
        .zip(expected.lower())
        .chain(dom.upper().iter().zip(expected.upper()))
        .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
    if !covers {
        return Err(PlpError::structural(format!(
            "input grid box {:?}..{:?} is not the closure of Ω_T",
            dom.lower(),
            dom.upper()
        )));
    }
    let points = 2 * m + 2;
    if let Some(axis) = (0..d).find(|a| grid.dims()[*a] < points) {
        return Err(PlpError::structural(format!(
            "axis {axis} has {} samples; interpolation needs {points}",
            grid.dims()[axis]
        )));
    }
    let spatial = extension_coefficients(2 * m)?;
    let temporal = extension_coefficients(m)?;

    let mut values = f.values().to_vec();
    let mut dims = grid.dims().to_vec();
    for &axis in axes {
        let coeffs = if axis + 1 == d { &temporal } else { &spatial };
        (values, dims) = extend_axis(&values, &dims, axis, coeffs, points);
    }
    let lengths = dom.lengths();
    let domain = AxisBox::new(
        dom.lower().iter().zip(&lengths).map(|(lo, l)| lo - l).collect(),
        dom.lower().iter().zip(&lengths).map(|(lo, l)| lo + 2.0 * l).collect(),
    )?;
    let out_grid = Arc::new(BoxGrid::new(dims, domain, grid.anisotropy().clone())?);
    Ok(BoxExtension {
        field: BoxField::new(out_grid, values)?,
        spatial,
        temporal,
        m,
    })
}
