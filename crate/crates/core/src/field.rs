//! Sampled fields and their spectral calculus.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{PlpError, Result};
use crate::fft;
use crate::grid::{for_each_index, Grid};

/// Real samples on a periodic [`Grid`] with a lazily computed spectrum.
///
/// The spectrum is the unnormalized forward DFT; the inverse carries the
/// `1/N` factor, so `‖f‖²_{L²} = (V/N²)·Σ|f̂_k|²`.
#[derive(Debug)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
    spectrum: OnceLock<Arc<Vec<Complex64>>>,
}

impl Clone for Field {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            grid: self.grid.clone(),
            values: self.values.clone(),
            spectrum,
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PlpError::structural(format!(
                "field has {} samples but the grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(PlpError::data(format!(
                "non-finite sample {} at flat index {pos}",
                values[pos]
            )));
        }
        Ok(Self::from_parts(grid, values))
    }

    pub(crate) fn from_parts(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        Self {
            grid,
            values,
            spectrum: OnceLock::new(),
        }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self::from_parts(grid, vec![0.0; n])
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let n = grid.len();
        Self::from_parts(grid, vec![c; n])
    }

    /// Sample `f` at every grid point.
    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
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

    /// The real field whose spectrum is the Hermitian part of `spectrum`.
    pub fn from_spectrum(grid: Arc<Grid>, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(PlpError::structural("spectrum length does not match the grid"));
        }
        let spectrum = hermitian_part(&grid, spectrum);
        let values = fft::inverse_real(&spectrum, grid.dims());
        let field = Self::new(grid, values)?;
        let _ = field.spectrum.set(Arc::new(spectrum));
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid> {
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

    /// Forward DFT, computed once.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum
            .get_or_init(|| Arc::new(fft::forward_real(&self.values, self.grid.dims())))
    }

    pub fn has_spectrum(&self) -> bool {
        self.spectrum.get().is_some()
    }

    /// Same samples, reinterpreted on another grid with identical dims.
    pub fn on_grid(&self, grid: Arc<Grid>) -> Result<Self> {
        if grid.dims() != self.grid.dims() {
            return Err(PlpError::structural("regridding requires identical dims"));
        }
        let out = Self::from_parts(grid, self.values.clone());
        if let Some(s) = self.spectrum.get() {
            let _ = out.spectrum.set(s.clone());
        }
        Ok(out)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_parts(self.grid.clone(), self.values.iter().map(|v| c * v).collect())
    }

    /// `α·self + β·other`.
    pub fn axpby(&self, alpha: f64, other: &Field, beta: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_parts(
            self.grid.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        ))
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.axpby(1.0, other, -1.0)
    }

    pub fn mul(&self, other: &Field) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_parts(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        ))
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(PlpError::structural("fields live on different grids"))
        }
    }

    /// Fraction of spectral energy carried by indices on a Nyquist plane.
    pub fn nyquist_energy_fraction(&self) -> f64 {
        let spec = self.spectrum();
        let grid = &self.grid;
        let mut total = 0.0;
        let mut nyq = 0.0;
        for_each_index(grid.dims(), |flat, idx| {
            let e = spec[flat].norm_sqr();
            total += e;
            if idx.iter().enumerate().any(|(axis, k)| grid.is_nyquist(axis, *k)) {
                nyq += e;
            }
        });
        if total == 0.0 {
            0.0
        } else {
            nyq / total
        }
    }

    /// Multiply the spectrum by a per-index factor and transform back.
    pub fn apply_multiplier(&self, multiplier: impl Fn(usize, &[usize]) -> Complex64) -> Result<Self> {
        let spec = self.spectrum();
        let mut out = vec![Complex64::default(); spec.len()];
        for_each_index(self.grid.dims(), |flat, idx| {
            out[flat] = spec[flat] * multiplier(flat, idx);
        });
        Self::from_spectrum(self.grid.clone(), out)
    }
}

fn hermitian_part(grid: &Grid, spectrum: Vec<Complex64>) -> Vec<Complex64> {
    let dims = grid.dims();
    let strides = grid.strides();
    let mut out = spectrum.clone();
    for_each_index(dims, |flat, idx| {
        let partner: usize = idx
            .iter()
            .enumerate()
            .map(|(axis, k)| ((dims[axis] - k) % dims[axis]) * strides[axis])
            .sum();
        out[flat] = 0.5 * (spectrum[flat] + spectrum[partner].conj());
    });
    out
}

/// Returns `f` with its spectrum cached; rejects non-finite samples.
pub fn to_spectral(f: &Field) -> Result<Field> {
    if let Some(pos) = f.values.iter().position(|v| !v.is_finite()) {
        return Err(PlpError::data(format!("non-finite sample at flat index {pos}")));
    }
    let out = f.clone();
    out.spectrum();
    Ok(out)
}

/// Derivative orders `∂_t^r ∂_x^s`: `space` holds one order per spatial axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivativeOrder {
    pub time: usize,
    pub space: Vec<usize>,
}

impl DerivativeOrder {
    pub fn new(time: usize, space: Vec<usize>) -> Self {
        Self { time, space }
    }

    /// First derivative along `axis` (time is the last axis).
    pub fn axis(ndim: usize, axis: usize) -> Self {
        let mut space = vec![0; ndim - 1];
        let mut time = 0;
        if axis + 1 == ndim {
            time = 1;
        } else {
            space[axis] = 1;
        }
        Self { time, space }
    }

    /// Orders per axis, time last.
    pub fn per_axis(&self) -> Vec<usize> {
        let mut v = self.space.clone();
        v.push(self.time);
        v
    }

    pub fn spatial_order(&self) -> usize {
        self.space.iter().sum()
    }
}

/// Per-axis spectral multiplier tables `(iξ)^{o}` with the Nyquist entry
/// dropped for odd orders.
pub(crate) fn derivative_tables(grid: &Grid, orders: &[usize]) -> Vec<Vec<Complex64>> {
    orders
        .iter()
        .enumerate()
        .map(|(axis, o)| {
            let xi = if o % 2 == 1 {
                grid.derivative_frequencies(axis)
            } else {
                grid.frequencies(axis)
            };
            xi.iter()
                .map(|x| Complex64::new(0.0, *x).powu(*o as u32))
                .collect()
        })
        .collect()
}

const NYQUIST_WARN: f64 = 1e-6;

/// `∂_t^r ∂_x^s f` by spectral multiplication.
pub fn spectral_derivative(f: &Field, orders: &DerivativeOrder) -> Result<Field> {
    let grid = f.grid();
    if orders.space.len() + 1 != grid.ndim() {
        return Err(PlpError::structural("derivative order has the wrong number of axes"));
    }
    let per_axis = orders.per_axis();
    if per_axis.iter().all(|o| *o == 0) {
        return Ok(f.clone());
    }
    let frac = f.nyquist_energy_fraction();
    if frac > NYQUIST_WARN {
        log::warn!("Nyquist modes carry {frac:.2e} of the spectral energy; derivatives are unreliable");
    }
    let tables = derivative_tables(grid, &per_axis);
    f.apply_multiplier(|_, idx| {
        idx.iter()
            .enumerate()
            .fold(Complex64::new(1.0, 0.0), |acc, (axis, k)| acc * tables[axis][*k])
    })
}

/// Remove the grid mean (the DC mode).
pub fn mean_subtract(f: &Field) -> Field {
    let m = f.mean();
    let out = Field::from_parts(f.grid.clone(), f.values.iter().map(|v| v - m).collect());
    if let Some(s) = f.spectrum.get() {
        let mut s = (**s).clone();
        s[0] = Complex64::default();
        let _ = out.spectrum.set(Arc::new(s));
    }
    out
}

/// Mean of `f` along `axis` for every fixed value of the other coordinates;
/// returns the worst slice's other-axis index and its mean.
pub fn worst_slice_mean(f: &Field, axis: usize) -> (Vec<usize>, f64) {
    let grid = f.grid();
    let dims = grid.dims();
    let strides = grid.strides();
    let mut other = dims.to_vec();
    other[axis] = 1;
    let mut worst = (vec![0; dims.len()], 0.0f64);
    for_each_index(&other, |_, idx| {
        let base: usize = idx.iter().zip(&strides).map(|(k, s)| k * s).sum();
        let sum: f64 = (0..dims[axis]).map(|k| f.values[base + k * strides[axis]]).sum();
        let mean = sum / dims[axis] as f64;
        if mean.abs() > worst.1.abs() {
            worst = (idx.to_vec(), mean);
        }
    });
    worst
}

/// `g` with `∂_axis g = f` and zero mean along every `axis`-line.
pub fn antiderivative(f: &Field, axis: usize) -> Result<Field> {
    let grid = f.grid();
    if axis >= grid.ndim() {
        return Err(PlpError::structural(format!("axis {axis} out of range")));
    }
    let (slice, mean) = worst_slice_mean(f, axis);
    let scale = f.max_abs().max(f64::MIN_POSITIVE);
    if mean.abs() > 1e-10 * scale {
        return Err(PlpError::Precondition(format!(
            "mean along axis {axis} does not vanish: slice {slice:?} (axis entry ignored) has mean {mean:.3e}"
        )));
    }
    let xi = grid.derivative_frequencies(axis);
    let inv: Vec<Complex64> = xi
        .iter()
        .map(|x| {
            if *x == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(0.0, -1.0 / x)
            }
        })
        .collect();
    f.apply_multiplier(|_, idx| inv[idx[axis]])
}

/// Components `(f_1, …, f_{n+1})` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Field>,
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| PlpError::structural("vector field needs at least one component"))?;
        for c in &components[1..] {
            first.check_same_grid(c)?;
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `max_i N(f_i)` for a scalar norm `N`.
    pub fn max_norm(&self, norm: impl Fn(&Field) -> Result<f64>) -> Result<f64> {
        self.components
            .iter()
            .try_fold(0.0f64, |m, c| Ok(m.max(norm(c)?)))
    }
}

/// Space-time gradient `∇g = (∂_1 g, …, ∂_{n+1} g)`.
pub fn gradient(g: &Field) -> Result<VectorField> {
    let d = g.grid().ndim();
    let components = (0..d)
        .map(|axis| spectral_derivative(g, &DerivativeOrder::axis(d, axis)))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(components)
}
