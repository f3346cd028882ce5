use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::bank::{BankMode, DyadicSymbolBank};
use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::grid::{for_each_index, Grid};

/// The kernels `Φ_j` with `∂_i φ_j = 2^{a_i j} Φ_j`, realized on the bank's
/// grid and centered at the origin (index 0, periodic wrap).
#[derive(Debug, Clone)]
pub struct KernelBank {
    bank: DyadicSymbolBank,
    axis: usize,
    j_min: i32,
    kernels: Vec<Field>,
}

fn kernel_on(bank: &DyadicSymbolBank, axis: usize, j: i32) -> Result<Field> {
    let grid = bank.grid();
    let psi = bank
        .symbol(j)
        .ok_or_else(|| PlpError::config(format!("scale {j} outside the bank")))?;
    let xi = grid.derivative_frequencies(axis);
    let factor = 2f64.powf(-grid.anisotropy().weight(axis) * f64::from(j)) / grid.cell_volume();
    let mut spec = vec![Complex64::default(); grid.len()];
    for_each_index(grid.dims(), |flat, idx| {
        spec[flat] = Complex64::new(0.0, xi[idx[axis]] * psi[flat] * factor);
    });
    Field::from_spectrum(grid.clone(), spec)
}

/// `φ_j`, the physical-space kernel of the multiplier `ψ_j`.
pub fn physical_kernel(bank: &DyadicSymbolBank, j: i32) -> Result<Field> {
    let grid = bank.grid();
    let psi = bank
        .symbol(j)
        .ok_or_else(|| PlpError::config(format!("scale {j} outside the bank")))?;
    let scale = 1.0 / grid.cell_volume();
    let spec = psi.iter().map(|p| Complex64::new(p * scale, 0.0)).collect();
    Field::from_spectrum(grid.clone(), spec)
}

pub fn derivative_kernel_bank(bank: &DyadicSymbolBank, axis: usize) -> Result<KernelBank> {
    if axis >= bank.grid().ndim() {
        return Err(PlpError::structural(format!(
            "axis {axis} out of range for a {}-axis grid",
            bank.grid().ndim()
        )));
    }
    if bank.mode() != BankMode::Homogeneous {
        return Err(PlpError::config("derivative kernels need a homogeneous bank"));
    }
    let kernels = bank
        .scales()
        .map(|j| kernel_on(bank, axis, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelBank {
        bank: bank.clone(),
        axis,
        j_min: bank.j_range().0,
        kernels,
    })
}

impl KernelBank {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<i32> {
        self.bank.scales()
    }

    pub fn kernel(&self, j: i32) -> Option<&Field> {
        let i = j - self.j_min;
        (i >= 0).then(|| self.kernels.get(i as usize)).flatten()
    }

    /// `2^{a_i j}`: the factor relating `∂_i φ_j` to `Φ_j`.
    pub fn scale_factor(&self, j: i32) -> f64 {
        2f64.powf(self.bank.grid().anisotropy().weight(self.axis) * f64::from(j))
    }

    /// `‖Φ_j‖_{L¹}` per scale, by grid quadrature.
    pub fn l1_norms(&self) -> Vec<(i32, f64)> {
        let h = self.bank.grid().cell_volume();
        self.scales()
            .zip(&self.kernels)
            .map(|(j, k)| (j, k.values().iter().map(|v| v.abs()).sum::<f64>() * h))
            .collect()
    }

    /// Largest relative deviation from `Φ_j(z) = 2^{Qj} Φ(2^{ja} z)`, where
    /// `Φ` is evaluated on the grid dilated by `2^{ja}` so that `2^{ja} z`
    /// lands on the same sample index.
    pub fn scaling_residual(&self) -> Result<f64> {
        let grid = self.bank.grid();
        let q = grid.anisotropy().homogeneous_dimension();
        let mut worst = 0.0f64;
        for (j, phi_j) in self.scales().zip(&self.kernels) {
            let wide: Arc<Grid> = Arc::new(grid.dilated(2f64.powi(-j))?);
            let unit = DyadicSymbolBank::with_scales(wide, self.bank.profile(), BankMode::Homogeneous, (0, 0))?;
            let phi = kernel_on(&unit, self.axis, 0)?;
            let c = 2f64.powf(q * f64::from(j));
            let scale = phi_j.max_abs().max(f64::MIN_POSITIVE);
            let dev = phi_j
                .values()
                .iter()
                .zip(phi.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - c * b).abs()));
            worst = worst.max(dev / scale);
        }
        Ok(worst)
    }
}

/// The decreasing envelope `h(r) = sup_{‖z‖ ≥ r} |K(z)|` of a kernel
/// centered at the origin, with Euclidean minimal-image distances.
#[derive(Debug, Clone, Serialize)]
pub struct RadialMajorant {
    /// Sorted distances of all samples.
    #[serde(skip)]
    distances: Vec<f64>,
    /// Suffix maxima of `|K|` in distance order.
    #[serde(skip)]
    envelope: Vec<f64>,
    /// Power `p` in the weighted sup `h(r)·r^p`.
    pub weight_exponent: f64,
    pub r_max: f64,
    /// `(r, h(r))` on a log grid, starting at `r = 0`.
    pub table: Vec<(f64, f64)>,
    pub h0: f64,
    /// `max h(r)·r^p` over tabulated `r ∈ [1, r_max]`.
    pub weighted_sup: f64,
    /// Least-squares slope of `log h` against `log r` on `[1, r_max]`.
    pub log_slope: f64,
    /// `∫_0^{r_far} r^{n} h(r) dr` by the trapezoid rule on the table.
    pub moment_integral: f64,
}

impl RadialMajorant {
    pub fn h(&self, r: f64) -> f64 {
        let i = self.distances.partition_point(|d| *d < r);
        self.envelope.get(i).copied().unwrap_or(0.0)
    }

    /// `moment_integral / (h(0) + 1)`.
    pub fn fitted_moment_constant(&self) -> f64 {
        self.moment_integral / (self.h0 + 1.0)
    }
}

/// Log-spaced tabulation points used for the weighted sup on `[1, r_max]`.
pub fn majorant_radii(r_max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| r_max.powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Tabulate `h` for `kernel`; the weight exponent is `n + 2` for `n`
/// spatial axes, and the moment integral uses `r^n`.
pub fn radial_majorant(kernel: &Field, r_max: f64) -> RadialMajorant {
    let grid = kernel.grid();
    let n = grid.ndim() - 1;
    let dims = grid.dims();
    let h: Vec<f64> = grid.spacings();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(kernel.len());
    for_each_index(dims, |flat, idx| {
        let d2: f64 = idx
            .iter()
            .enumerate()
            .map(|(axis, k)| {
                let m = (*k).min(dims[axis] - k) as f64 * h[axis];
                m * m
            })
            .sum();
        pairs.push((d2.sqrt(), kernel.values()[flat].abs()));
    });
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let distances: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut envelope = vec![0.0; pairs.len()];
    let mut running = 0.0f64;
    for i in (0..pairs.len()).rev() {
        running = running.max(pairs[i].1);
        envelope[i] = running;
    }

    let weight_exponent = (n + 2) as f64;
    let mut out = RadialMajorant {
        distances,
        envelope,
        weight_exponent,
        r_max,
        table: Vec::new(),
        h0: 0.0,
        weighted_sup: 0.0,
        log_slope: f64::NAN,
        moment_integral: 0.0,
    };
    out.h0 = out.h(0.0);

    let radii = majorant_radii(r_max, 256);
    out.weighted_sup = radii
        .iter()
        .map(|r| out.h(*r) * r.powf(weight_exponent))
        .fold(0.0, f64::max);

    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|r| (*r, out.h(*r)))
        .filter(|(_, v)| *v > 0.0)
        .map(|(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() >= 2 {
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
            (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
        });
        out.log_slope = num / den;
    }

    let r_far = *out.distances.last().unwrap_or(&0.0);
    let steps = 4096;
    let mut table = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let r = r_far * i as f64 / steps as f64;
        table.push((r, out.h(r)));
    }
    out.moment_integral = table
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].0.powi(n as i32) * w[0].1 + w[1].0.powi(n as i32) * w[1].1))
        .sum();
    out.table = table;
    out
}
