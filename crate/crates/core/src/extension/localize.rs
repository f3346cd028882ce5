use std::sync::Arc;

use serde::Serialize;

use crate::boxfield::BoxField;
use crate::error::{PlpError, Result};
use crate::field::{antiderivative, Field};
use crate::geometry::AxisBox;
use crate::grid::{for_each_index, strides, Grid};

/// Places a field on `Ω̃_T` (`3M + 1` samples per axis) into the periodic
/// box `(−3/2, 5/2)^n × (−3T/2, 5T/2)` with `4M` samples per axis and the
/// same spacing; samples outside `Ω̃_T` are zero. `M` must be even.
pub fn embed_periodic(f: &BoxField) -> Result<Field> {
    let bg = f.grid();
    let d = bg.ndim();
    let mut dims = Vec::with_capacity(d);
    let mut lower = Vec::with_capacity(d);
    let mut upper = Vec::with_capacity(d);
    for axis in 0..d {
        let pts = bg.dims()[axis];
        if (pts - 1) % 3 != 0 || ((pts - 1) / 3) % 2 != 0 {
            return Err(PlpError::structural(format!(
                "axis {axis} has {pts} samples; expected 3M + 1 with M even"
            )));
        }
        let m = (pts - 1) / 3;
        let l = bg.domain().length(axis) / 3.0;
        let lo = bg.domain().lower()[axis] + l;
        dims.push(4 * m);
        lower.push(lo - 1.5 * l);
        upper.push(lo + 2.5 * l);
    }
    let grid = Arc::new(Grid::new(dims.clone(), AxisBox::new(lower, upper)?, bg.anisotropy().clone())?);
    let st = strides(&dims);
    let mut values = vec![0.0; grid.len()];
    for_each_index(bg.dims(), |flat, idx| {
        let k: usize = idx
            .iter()
            .zip(&dims)
            .zip(&st)
            .map(|((i, n), s)| (i + n / 8) * s)
            .sum();
        values[k] = f.values()[flat];
    });
    Field::new(grid, values)
}

/// Index of the coordinate `x` on a periodic axis, if it is a sample.
fn sample_index(grid: &Grid, axis: usize, x: f64) -> Option<usize> {
    let s = (x - grid.domain().lower()[axis]) / grid.spacing(axis);
    let k = s.round();
    ((s - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < grid.dims()[axis]).then_some(k as usize)
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizeDiagnostics {
    pub axis: usize,
    /// Largest `|∫ Ψf̃ dx_axis|` over lines, removed by the compensator.
    pub compensator_mass: f64,
    /// Support of the compensating bump along `axis`.
    pub compensator_support: (f64, f64),
    pub product_sup: f64,
    pub g_sup: f64,
}

/// `Ψf̃` and its antiderivative `g` along `axis`, normalized by
/// `g(x_axis = 0) = 0`.
#[derive(Debug, Clone)]
pub struct Localized {
    pub product: Field,
    /// `Ψf̃ − m·β` with line masses `m` moved into a bump `β` placed in the
    /// zero padding, so the periodic antiderivative exists.
    pub compensated: Field,
    pub g: Field,
    pub diagnostics: LocalizeDiagnostics,
}

fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Multiplies `f̃` by `Ψ` and integrates along `axis` from the face
/// `x_axis = 0` of `Ω_T`. Both fields must come from [`embed_periodic`]-style
/// grids where the padding beyond `Z₂` holds zeros.
pub fn localize(f_tilde: &Field, psi: &Field, axis: usize) -> Result<Localized> {
    let product = f_tilde.mul(psi)?;
    let grid = product.grid_arc().clone();
    if axis >= grid.ndim() {
        return Err(PlpError::structural(format!("axis {axis} out of range")));
    }
    let dom = grid.domain();
    let l = dom.length(axis) / 4.0;
    let origin = dom.lower()[axis] + 1.5 * l;
    let support = (origin + 1.9 * l, origin + 2.35 * l);
    let n_axis = grid.dims()[axis];
    let h = grid.spacing(axis);
    let center = 0.5 * (support.0 + support.1);
    let half = 0.5 * (support.1 - support.0);
    let mut beta: Vec<f64> = (0..n_axis)
        .map(|k| bump((grid.coordinate(axis, k) - center) / half))
        .collect();
    let mass: f64 = beta.iter().sum::<f64>() * h;
    if mass <= 0.0 {
        return Err(PlpError::structural("grid too coarse to resolve the compensating bump"));
    }
    beta.iter_mut().for_each(|b| *b /= mass);

    let dims = grid.dims().to_vec();
    let st = strides(&dims);
    let mut other = dims.clone();
    other[axis] = 1;
    let mut values = product.values().to_vec();
    let mut worst_mass = 0.0f64;
    for_each_index(&other, |_, idx| {
        let base: usize = idx.iter().zip(&st).map(|(k, s)| k * s).sum();
        let m: f64 = (0..n_axis).map(|k| values[base + k * st[axis]]).sum::<f64>() * h;
        worst_mass = worst_mass.max(m.abs());
        for (k, b) in beta.iter().enumerate() {
            values[base + k * st[axis]] -= m * b;
        }
    });
    let compensated = Field::new(grid.clone(), values)?;
    let raw = antiderivative(&compensated, axis)?;
    let k0 = sample_index(&grid, axis, origin)
        .ok_or_else(|| PlpError::structural("the face x = 0 is not a grid line"))?;
    let mut g = raw.into_values();
    for_each_index(&other, |_, idx| {
        let base: usize = idx.iter().zip(&st).map(|(k, s)| k * s).sum();
        let shift = g[base + k0 * st[axis]];
        for k in 0..n_axis {
            g[base + k * st[axis]] -= shift;
        }
    });
    let g = Field::new(grid, g)?;
    let diagnostics = LocalizeDiagnostics {
        axis,
        compensator_mass: worst_mass,
        compensator_support: support,
        product_sup: product.max_abs(),
        g_sup: g.max_abs(),
    };
    Ok(Localized {
        product,
        compensated,
        g,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxfield::BoxGrid;

    fn extended(m: usize) -> Arc<BoxGrid> {
        Arc::new(
            BoxGrid::new(
                vec![3 * m + 1, 3 * m + 1],
                AxisBox::new(vec![-1.0, -1.0], vec![2.0, 2.0]).unwrap(),
                crate::geometry::Anisotropy::parabolic(1),
            )
            .unwrap(),
        )
    }

    #[test]
    fn embedding_keeps_coordinates() {
        let bg = extended(8);
        let f = BoxField::from_fn(bg, |z| z[0] + 10.0 * z[1]).unwrap();
        let p = embed_periodic(&f).unwrap();
        let g = p.grid();
        assert_eq!(g.dims(), &[32, 32]);
        assert_eq!(g.domain().lower(), &[-1.5, -1.5]);
        for_each_index(g.dims(), |flat, idx| {
            let z = g.point(idx);
            let inside = z.iter().all(|x| (-1.0 - 1e-12..=2.0 + 1e-12).contains(x));
            let expect = if inside { z[0] + 10.0 * z[1] } else { 0.0 };
            assert!((p.values()[flat] - expect).abs() < 1e-12);
        });
    }

    #[test]
    fn zero_and_unit_cutoff() {
        let g = Arc::new(Grid::new(vec![32, 32], AxisBox::new(vec![-1.5, -1.5], vec![2.5, 2.5]).unwrap(), crate::geometry::Anisotropy::parabolic(1)).unwrap());
        let zero = Field::zeros(g.clone());
        let one = Field::constant(g.clone(), 1.0);
        let loc = localize(&zero, &one, 0).unwrap();
        assert_eq!(loc.product.max_abs(), 0.0);
        assert_eq!(loc.g.max_abs(), 0.0);
        let f = Field::from_fn(g, |z| (-(z[0] - 0.5).powi(2) * 8.0).exp()).unwrap();
        let loc = localize(&f, &one, 0).unwrap();
        assert_eq!(loc.product, f);
    }
}
