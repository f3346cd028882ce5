//! Which samples fall inside a parabolic cube.

use crate::boxfield::BoxGrid;
use crate::geometry::{weight_power, Anisotropy, ParabolicCube};
use crate::grid::{strides, Grid};

/// Sample positions `lower + k·h` and whether indices wrap.
#[derive(Debug, Clone)]
pub(crate) struct SampleLayout {
    pub lower: Vec<f64>,
    pub spacing: Vec<f64>,
    pub dims: Vec<usize>,
    pub periodic: bool,
    pub anisotropy: Anisotropy,
}

impl SampleLayout {
    pub fn periodic(grid: &Grid) -> Self {
        Self {
            lower: grid.domain().lower().to_vec(),
            spacing: grid.spacings(),
            dims: grid.dims().to_vec(),
            periodic: true,
            anisotropy: grid.anisotropy().clone(),
        }
    }

    pub fn closed(grid: &BoxGrid) -> Self {
        Self {
            lower: grid.domain().lower().to_vec(),
            spacing: grid.spacings(),
            dims: grid.dims().to_vec(),
            periodic: false,
            anisotropy: grid.anisotropy().clone(),
        }
    }

    /// Index range of samples in `[lo, hi)` (or `(lo, hi)` when `open`),
    /// before wrapping or clamping.
    fn axis_range(&self, axis: usize, lo: f64, hi: f64, open: bool) -> (i64, i64) {
        let h = self.spacing[axis];
        let a = (lo - self.lower[axis]) / h;
        let b = (hi - self.lower[axis]) / h;
        let first = if open { (a + 1e-9).floor() as i64 + 1 } else { (a - 1e-9).ceil() as i64 };
        let last = if open { (b - 1e-9).ceil() as i64 - 1 } else { (b - 1e-9).ceil() as i64 - 1 };
        (first, last)
    }

    /// Map unwrapped per-axis indices to valid ones; `None` drops the entry.
    fn resolve(&self, axis: usize, k: i64) -> Option<usize> {
        let n = self.dims[axis] as i64;
        if self.periodic {
            Some(k.rem_euclid(n) as usize)
        } else if (0..n).contains(&k) {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Flat indices of the samples inside `cube`, appended to `out`.
    pub fn collect(&self, cube: &ParabolicCube, out: &mut Vec<usize>) {
        out.clear();
        let d = self.dims.len();
        let st = strides(&self.dims);
        match cube {
            ParabolicCube::Lattice { .. } => {
                let (lo, side) = cube.bounding_box(&self.anisotropy);
                let axes: Vec<Vec<usize>> = (0..d)
                    .map(|i| {
                        let (a, b) = self.axis_range(i, lo[i], lo[i] + side[i], false);
                        let b = if self.periodic { b.min(a + self.dims[i] as i64 - 1) } else { b };
                        (a..=b).filter_map(|k| self.resolve(i, k)).map(|k| k * st[i]).collect()
                    })
                    .collect();
                product(&axes, out);
            }
            ParabolicCube::Ball { center, radius } => {
                let ext: Vec<f64> = self
                    .anisotropy
                    .weights()
                    .iter()
                    .map(|w| weight_power(*radius, *w))
                    .collect();
                // Per axis: (flat offset, squared normalized coordinate).
                let axes: Vec<Vec<(usize, f64)>> = (0..d)
                    .map(|i| {
                        let c = center.coords()[i];
                        let (a, b) = self.axis_range(i, c - ext[i], c + ext[i], true);
                        let b = if self.periodic { b.min(a + self.dims[i] as i64 - 1) } else { b };
                        (a..=b)
                            .filter_map(|k| {
                                let x = self.lower[i] + k as f64 * self.spacing[i] - c;
                                let u = x / ext[i];
                                self.resolve(i, k).map(|kk| (kk * st[i], u * u))
                            })
                            .collect()
                    })
                    .collect();
                ball_product(&axes, 0, 0, 0.0, out);
            }
        }
    }
}

fn product(axes: &[Vec<usize>], out: &mut Vec<usize>) {
    fn rec(axes: &[Vec<usize>], base: usize, out: &mut Vec<usize>) {
        match axes.split_first() {
            None => out.push(base),
            Some((first, rest)) => {
                for off in first {
                    rec(rest, base + off, out);
                }
            }
        }
    }
    if axes.iter().all(|a| !a.is_empty()) {
        rec(axes, 0, out);
    }
}

fn ball_product(axes: &[Vec<(usize, f64)>], axis: usize, base: usize, acc: f64, out: &mut Vec<usize>) {
    if axis == axes.len() {
        if acc < 1.0 {
            out.push(base);
        }
        return;
    }
    for (off, u2) in &axes[axis] {
        let s = acc + u2;
        if s < 1.0 {
            ball_product(axes, axis + 1, base + off, s, out);
        }
    }
}
