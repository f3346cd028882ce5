//! Periodic sampling grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};
use crate::geometry::{Anisotropy, AxisBox};

/// A periodic tensor grid: `dims[i]` samples per axis on the fundamental
/// domain `domain`, sample `k` on axis `i` sitting at `lower_i + k·h_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dims: Vec<usize>,
    domain: AxisBox,
    anisotropy: Anisotropy,
}

impl Grid {
    pub fn new(dims: Vec<usize>, domain: AxisBox, anisotropy: Anisotropy) -> Result<Self> {
        if dims.len() != anisotropy.dim() || domain.dim() != dims.len() {
            return Err(PlpError::structural(format!(
                "grid has {} axes, box {} and anisotropy {}",
                dims.len(),
                domain.dim(),
                anisotropy.dim()
            )));
        }
        if let Some(d) = dims.iter().find(|d| **d < 4 || **d % 2 != 0) {
            return Err(PlpError::config(format!(
                "grid dimensions must be even and at least 4, got {d}"
            )));
        }
        Ok(Self {
            dims,
            domain,
            anisotropy,
        })
    }

    /// Grid on the default box `[0, 2π)^{n+1}`, where every grid frequency is
    /// an integer.
    pub fn periodic(dims: Vec<usize>, anisotropy: Anisotropy) -> Result<Self> {
        let domain = AxisBox::cube(dims.len(), 2.0 * PI)?;
        Self::new(dims, domain, anisotropy)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Total number of samples.
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
        self.domain.length(axis) / self.dims[axis] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.ndim()).map(|i| self.spacing(i)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.ndim()).map(|i| self.spacing(i)).product()
    }

    pub fn volume(&self) -> f64 {
        self.domain.volume()
    }

    /// Coordinate of sample `k` along `axis`.
    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        self.domain.lower()[axis] + k as f64 * self.spacing(axis)
    }

    pub fn point(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(axis, k)| self.coordinate(axis, *k))
            .collect()
    }

    /// Signed mode number of DFT index `k`, in `[−N/2, N/2 − 1]`.
    pub fn signed_mode(&self, axis: usize, k: usize) -> i64 {
        let n = self.dims[axis];
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    pub fn is_nyquist(&self, axis: usize, k: usize) -> bool {
        k == self.dims[axis] / 2
    }

    /// Angular frequencies `2πk/L` for every DFT index along `axis`.
    pub fn frequencies(&self, axis: usize) -> Vec<f64> {
        let base = 2.0 * PI / self.domain.length(axis);
        (0..self.dims[axis])
            .map(|k| base * self.signed_mode(axis, k) as f64)
            .collect()
    }

    /// As [`Grid::frequencies`] with the unpaired Nyquist entry set to zero,
    /// the multiplier used for odd-order derivatives.
    pub fn derivative_frequencies(&self, axis: usize) -> Vec<f64> {
        let mut f = self.frequencies(axis);
        f[self.dims[axis] / 2] = 0.0;
        f
    }

    /// `π N_i / L_i`.
    pub fn nyquist(&self, axis: usize) -> f64 {
        PI * self.dims[axis] as f64 / self.domain.length(axis)
    }

    /// Smallest nonzero `|ξ|_a` over the grid frequencies.
    pub fn min_frequency(&self) -> f64 {
        (0..self.ndim())
            .map(|i| (2.0 * PI / self.domain.length(i)).powf(1.0 / self.anisotropy.weight(i)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `j` whose annulus `{|ξ|_a ≤ 2^{j+1}}` stays inside the Nyquist
    /// box on every axis.
    pub fn max_scale(&self) -> i32 {
        (0..self.ndim())
            .map(|i| {
                let w = self.anisotropy.weight(i);
                let mut j = -64;
                while 2f64.powf(f64::from(j + 2) * w) <= self.nyquist(i) {
                    j += 1;
                }
                j
            })
            .min()
            .expect("at least one axis")
    }

    /// Smallest `j` whose annulus reaches the lowest nonzero frequency.
    pub fn min_scale(&self) -> i32 {
        let rho = self.min_frequency();
        let mut j = -64;
        while 2f64.powi(j + 1) < rho {
            j += 1;
        }
        j
    }

    /// Resolvable scale range of the homogeneous dyadic system.
    pub fn homogeneous_scales(&self) -> Option<(i32, i32)> {
        let (lo, hi) = (self.min_scale(), self.max_scale());
        (lo <= hi).then_some((lo, hi))
    }

    /// Resolvable scale range of the inhomogeneous system, starting at 0.
    pub fn inhomogeneous_scales(&self) -> Option<(i32, i32)> {
        let hi = self.max_scale();
        (hi >= 0).then_some((0, hi))
    }

    /// Same box, different resolution.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.domain.clone(), self.anisotropy.clone())
    }

    /// Same samples per axis on the box `μ^{-a}·domain`: the grid on which
    /// `f(μ^a ·)` has the same sample values as `f` does here.
    pub fn dilated(&self, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(PlpError::config(format!("dilation factor must be positive, got {mu}")));
        }
        let domain = self.domain.dilated(&self.anisotropy, mu)?;
        Self::new(self.dims.clone(), domain, self.anisotropy.clone())
    }

    /// Same anisotropy and spacing on a box `factor` times longer per axis.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        let lower = self.domain.lower().to_vec();
        let upper = (0..self.ndim())
            .map(|i| lower[i] + self.domain.length(i) * factor as f64)
            .collect();
        let dims = self.dims.iter().map(|d| d * factor).collect();
        Self::new(dims, AxisBox::new(lower, upper)?, self.anisotropy.clone())
    }

    pub fn with_anisotropy(&self, anisotropy: Anisotropy) -> Result<Self> {
        Self::new(self.dims.clone(), self.domain.clone(), anisotropy)
    }

    /// Row-major strides (last axis contiguous).
    pub fn strides(&self) -> Vec<usize> {
        strides(&self.dims)
    }
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Visit every multi-index in row-major order together with its flat index.
pub(crate) fn for_each_index(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = dims.iter().product();
    let mut idx = vec![0usize; dims.len()];
    for flat in 0..total {
        f(flat, &idx);
        for axis in (0..dims.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}
