use std::sync::Arc;

use crate::boxfield::{BoxField, BoxGrid};
use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::geometry::AxisBox;
use crate::grid::{for_each_index, Grid};
use crate::lp::CutoffProfile;

/// `Z₁ = (−1/4, 5/4)^n × (−T/4, 5T/4)` and `Z₂ = (−3/4, 7/4)^n × (−3T/4, 7T/4)`.
pub fn default_plateau_boxes(n: usize, horizon: f64) -> Result<(AxisBox, AxisBox)> {
    let scaled = |lo: f64, hi: f64| -> Result<AxisBox> {
        let mut lower = vec![lo; n + 1];
        let mut upper = vec![hi; n + 1];
        lower[n] *= horizon;
        upper[n] *= horizon;
        AxisBox::new(lower, upper)
    };
    Ok((scaled(-0.25, 1.25)?, scaled(-0.75, 1.75)?))
}

/// Ramps of the bump-quotient profile between the faces of `Z₂` and `Z₁`.
#[derive(Debug, Clone)]
pub struct Plateau {
    inner: AxisBox,
    outer: AxisBox,
    profile: CutoffProfile,
}

impl Plateau {
    pub fn new(inner: AxisBox, outer: AxisBox) -> Result<Self> {
        if !inner.strictly_inside(&outer) {
            return Err(PlpError::config("plateau box Z₁ must lie strictly inside Z₂"));
        }
        Ok(Self {
            inner,
            outer,
            profile: CutoffProfile::BumpQuotient,
        })
    }

    fn ramp(&self, axis: usize, x: f64) -> f64 {
        let (a, b) = (self.outer.lower()[axis], self.inner.lower()[axis]);
        let (c, d) = (self.inner.upper()[axis], self.outer.upper()[axis]);
        if x <= a || x >= d {
            0.0
        } else if x < b {
            self.profile.eval(1.0 + (b - x) / (b - a))
        } else if x > c {
            self.profile.eval(1.0 + (x - c) / (d - c))
        } else {
            1.0
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        z.iter()
            .enumerate()
            .map(|(axis, x)| self.ramp(axis, *x))
            .product::<f64>()
            .clamp(0.0, 1.0)
    }

    pub fn inner(&self) -> &AxisBox {
        &self.inner
    }

    pub fn outer(&self) -> &AxisBox {
        &self.outer
    }
}

fn check_inside(z1: &AxisBox, z2: &AxisBox, domain: &AxisBox) -> Result<()> {
    if !z1.inside(domain) || !z2.inside(domain) {
        return Err(PlpError::config("plateau boxes must lie inside the grid box"));
    }
    Ok(())
}

/// `Ψ` sampled on a periodic grid.
pub fn build_plateau_cutoff(z1: &AxisBox, z2: &AxisBox, grid: &Arc<Grid>) -> Result<Field> {
    let plateau = Plateau::new(z1.clone(), z2.clone())?;
    check_inside(z1, z2, grid.domain())?;
    let mut values = vec![0.0; grid.len()];
    let mut z = vec![0.0; grid.ndim()];
    for_each_index(grid.dims(), |flat, idx| {
        for (axis, k) in idx.iter().enumerate() {
            z[axis] = grid.coordinate(axis, *k);
        }
        values[flat] = plateau.eval(&z);
    });
    Field::new(grid.clone(), values)
}

/// `Ψ` sampled on a closed box grid.
pub fn build_plateau_cutoff_box(z1: &AxisBox, z2: &AxisBox, grid: &Arc<BoxGrid>) -> Result<BoxField> {
    let plateau = Plateau::new(z1.clone(), z2.clone())?;
    check_inside(z1, z2, grid.domain())?;
    BoxField::from_fn(grid.clone(), |z| plateau.eval(z))
}
