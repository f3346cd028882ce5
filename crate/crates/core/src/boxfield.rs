//! Samples on a closed, non-periodic box such as `Ω_T`, endpoints included.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};
use crate::geometry::{Anisotropy, AxisBox};
use crate::grid::{for_each_index, strides};

/// `dims[i]` samples per axis at `lower_i + k·h_i`, `h_i = L_i/(dims_i − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    dims: Vec<usize>,
    domain: AxisBox,
    anisotropy: Anisotropy,
}

impl BoxGrid {
    pub fn new(dims: Vec<usize>, domain: AxisBox, anisotropy: Anisotropy) -> Result<Self> {
        if dims.len() != domain.dim() || dims.len() != anisotropy.dim() {
            return Err(PlpError::structural("box grid axes do not match box/anisotropy"));
        }
        if let Some(d) = dims.iter().find(|d| **d < 2) {
            return Err(PlpError::config(format!("closed grids need at least 2 samples per axis, got {d}")));
        }
        Ok(Self {
            dims,
            domain,
            anisotropy,
        })
    }

    /// `M + 1` samples per axis on `Ω_T = [0,1]^n × [0,T]`.
    pub fn omega_t(n: usize, horizon: f64, intervals: usize) -> Result<Self> {
        Self::new(
            vec![intervals + 1; n + 1],
            AxisBox::omega_t(n, horizon)?,
            Anisotropy::parabolic(n),
        )
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn anisotropy(&self) -> &Anisotropy {
        &self.anisotropy
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.length(axis) / (self.dims[axis] - 1) as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.ndim()).map(|i| self.spacing(i)).collect()
    }

    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        if k + 1 == self.dims[axis] {
            self.domain.upper()[axis]
        } else {
            self.domain.lower()[axis] + k as f64 * self.spacing(axis)
        }
    }

    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.dims[axis]).map(|k| self.coordinate(axis, k)).collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }

    /// Product trapezoid weights.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = (0..self.ndim())
            .map(|axis| {
                let h = self.spacing(axis);
                (0..self.dims[axis])
                    .map(|k| if k == 0 || k + 1 == self.dims[axis] { 0.5 * h } else { h })
                    .collect()
            })
            .collect();
        let mut w = vec![0.0; self.len()];
        for_each_index(&self.dims, |flat, idx| {
            w[flat] = idx.iter().enumerate().map(|(a, k)| per_axis[a][*k]).product();
        });
        w
    }
}

/// Real samples on a [`BoxGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoxField {
    grid: Arc<BoxGrid>,
    values: Vec<f64>,
}

impl BoxField {
    pub fn new(grid: Arc<BoxGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PlpError::structural(format!(
                "field has {} samples but the box grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(PlpError::data(format!("non-finite sample at flat index {pos}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<BoxGrid>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let mut z = vec![0.0; grid.ndim()];
        for_each_index(grid.dims(), |_, idx| {
            for (axis, k) in idx.iter().enumerate() {
                z[axis] = grid.coordinate(axis, *k);
            }
            values.push(f(&z));
        });
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<BoxGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &BoxField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(PlpError::structural("box fields live on different grids"));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// Finite-difference derivative of order `order` along `axis`.
    pub fn derivative(&self, axis: usize, order: usize) -> Result<Self> {
        if order == 0 {
            return Ok(self.clone());
        }
        let n = self.grid.dims()[axis];
        let stencil = FD_ACCURACY + order;
        if n < stencil {
            return Err(PlpError::config(format!(
                "axis {axis} has {n} samples; order-{order} differences need {stencil}"
            )));
        }
        let h = self.grid.spacing(axis);
        let nodes: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
        // Weight rows per output position, reused along every line.
        let rows: Vec<(usize, Vec<f64>)> = (0..n)
            .map(|k| {
                let start = k.saturating_sub(stencil / 2).min(n - stencil);
                let w = fornberg_weights(nodes[k], &nodes[start..start + stencil], order);
                (start, w)
            })
            .collect();
        let strides = self.grid.strides();
        let s = strides[axis];
        let mut other = self.grid.dims().to_vec();
        other[axis] = 1;
        let mut out = vec![0.0; self.values.len()];
        for_each_index(&other, |_, idx| {
            let base: usize = idx.iter().zip(&strides).map(|(k, st)| k * st).sum();
            for (k, (start, w)) in rows.iter().enumerate() {
                out[base + k * s] = w
                    .iter()
                    .enumerate()
                    .map(|(i, wi)| wi * self.values[base + (start + i) * s])
                    .sum();
            }
        });
        Self::new(self.grid.clone(), out)
    }
}

/// Extra stencil points beyond the derivative order.
const FD_ACCURACY: usize = 6;

/// Weights of the order-`m` derivative at `x0` from values at `nodes`
/// (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14 && (w[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_polynomial_is_exact() {
        let g = Arc::new(BoxGrid::omega_t(1, 1.0, 32).unwrap());
        let f = BoxField::from_fn(g.clone(), |z| z[0].powi(3) + z[1] * z[0]).unwrap();
        let d = f.derivative(0, 2).unwrap();
        let expected = BoxField::from_fn(g, |z| 6.0 * z[0]).unwrap();
        assert!(d.sub(&expected).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn trapezoid_weights_sum_to_volume() {
        let g = BoxGrid::omega_t(2, 2.0, 10).unwrap();
        let total: f64 = g.quadrature_weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }
}
