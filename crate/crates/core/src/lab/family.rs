use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxfield::{BoxField, BoxGrid};
use crate::error::{PlpError, Result};
use crate::field::{gradient, mean_subtract, Field, VectorField};
use crate::geometry::Anisotropy;
use crate::grid::Grid;
use crate::lp::CutoffProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    #[default]
    BandLimitedRandom,
    AnisoGaussian,
    TruncatedLog,
    DilationSweep,
    Constant,
    SingleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub count: usize,
    pub seed: u64,
    /// Largest `|k|_a` of the integer modes drawn by the band-limited kinds.
    pub bandwidth: f64,
    /// Log-uniform range of the sample amplitude.
    pub amplitude: (f64, f64),
    /// Log-uniform range of the Gaussian width.
    pub sigma: (f64, f64),
    /// Truncation of the logarithm, in grid cells of axis 0.
    pub epsilon_cells: f64,
    /// Outer radius scale of the truncated logarithm.
    pub radius: f64,
    /// Integer mode of the single-mode kind.
    pub mode: Vec<i64>,
    /// Value of the constant kind and amplitude of the single-mode kind.
    pub value: f64,
    pub dilations: Vec<f64>,
    /// Rescale every `g` with `‖g‖_{L²} > 1` onto the unit sphere.
    pub enforce_l2: bool,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            kind: FamilyKind::BandLimitedRandom,
            count: 200,
            seed: 42,
            bandwidth: 4.0,
            amplitude: (0.1, 10.0),
            sigma: (0.35, 0.6),
            epsilon_cells: 4.0,
            radius: 0.8,
            mode: vec![1, 1],
            value: 1.0,
            dilations: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            enforce_l2: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleDiagnostics {
    pub amplitude: f64,
    /// Factor applied by the `‖g‖_{L²} ≤ 1` constraint (1 when inactive).
    pub l2_scale: f64,
    /// Fraction of `‖g‖²_{L²}` per dyadic shell `2^j ≤ |ξ|_a < 2^{j+1}`.
    pub energy: BTreeMap<i32, f64>,
}

/// A generated pair `(g, f = ∇g)`.
#[derive(Debug, Clone)]
pub struct Sample {
    pub label: String,
    pub dilation: Option<f64>,
    pub g: Field,
    pub f: VectorField,
    pub diagnostics: SampleDiagnostics,
}

/// A scalar sample on a closed box.
#[derive(Debug, Clone)]
pub struct BoxSample {
    pub label: String,
    pub f: BoxField,
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Integer modes `k ≠ 0` with `|k|_a ≤ bandwidth`, one per `±k` pair (first
/// nonzero entry positive), in lexicographic order.
pub fn half_space_modes(a: &Anisotropy, bandwidth: f64) -> Vec<Vec<i64>> {
    let d = a.dim();
    let bounds: Vec<i64> = (0..d).map(|i| bandwidth.powf(a.weight(i)).floor() as i64).collect();
    let mut out = Vec::new();
    let mut k: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let first = k.iter().find(|v| **v != 0);
        let kf: Vec<f64> = k.iter().map(|v| *v as f64).collect();
        if matches!(first, Some(v) if *v > 0) && a.norm(&kf) <= bandwidth {
            out.push(k.clone());
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if k[axis] < bounds[axis] {
                k[axis] += 1;
                break;
            }
            k[axis] = -bounds[axis];
        }
    }
}

/// `g(z) = Σ_k 2 Re(c_k e^{i ω_k·z})` with `ω_k = 2πk/L`.
#[derive(Debug, Clone)]
pub struct ModeSum {
    pub modes: Vec<(Vec<i64>, Complex64)>,
}

impl ModeSum {
    /// Coefficients of sample `index`, normalized to RMS `amplitude`.
    fn draw(a: &Anisotropy, bandwidth: f64, rng: &mut ChaCha8Rng, amplitude: f64) -> Result<Self> {
        let modes = half_space_modes(a, bandwidth);
        if modes.is_empty() {
            return Err(PlpError::config(format!("bandwidth {bandwidth} admits no nonzero mode")));
        }
        let mut coeffs: Vec<(Vec<i64>, Complex64)> = modes
            .into_iter()
            .map(|k| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (k, Complex64::new(re, im))
            })
            .collect();
        let rms = (2.0 * coeffs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>()).sqrt();
        for (_, c) in &mut coeffs {
            *c *= amplitude / rms;
        }
        Ok(Self { modes: coeffs })
    }

    fn check_nyquist(&self, grid: &Grid) -> Result<()> {
        for (k, _) in &self.modes {
            for (axis, v) in k.iter().enumerate() {
                if 2 * v.unsigned_abs() as usize >= grid.dims()[axis] {
                    return Err(PlpError::config(format!(
                        "mode {k:?} reaches the Nyquist frequency of axis {axis}; lower the bandwidth"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn on_grid(&self, grid: &Arc<Grid>) -> Result<Field> {
        self.check_nyquist(grid)?;
        let dims = grid.dims();
        let st = grid.strides();
        let n = grid.len() as f64;
        let mut spec = vec![Complex64::default(); grid.len()];
        let flat = |k: &[i64]| -> usize {
            k.iter()
                .zip(dims.iter().zip(&st))
                .map(|(v, (d, s))| (v.rem_euclid(*d as i64) as usize) * s)
                .sum()
        };
        for (k, c) in &self.modes {
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            spec[flat(k)] += c * n;
            spec[flat(&neg)] += c.conj() * n;
        }
        Field::from_spectrum(grid.clone(), spec)
    }

    pub fn eval(&self, lengths: &[f64], z: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k
                    .iter()
                    .zip(lengths.iter().zip(z))
                    .map(|(v, (l, x))| 2.0 * std::f64::consts::PI * *v as f64 * x / l)
                    .sum();
                2.0 * (c * Complex64::from_polar(1.0, phase)).re
            })
            .sum()
    }

    fn energy(&self, a: &Anisotropy, lengths: &[f64]) -> BTreeMap<i32, f64> {
        let total: f64 = self.modes.iter().map(|(_, c)| c.norm_sqr()).sum();
        let mut out = BTreeMap::new();
        for (k, c) in &self.modes {
            let xi: Vec<f64> = k
                .iter()
                .zip(lengths)
                .map(|(v, l)| 2.0 * std::f64::consts::PI * *v as f64 / l)
                .collect();
            let j = a.norm(&xi).log2().floor() as i32;
            *out.entry(j).or_insert(0.0) += c.norm_sqr() / total;
        }
        out
    }
}

fn minimal_image(x: f64, c: f64, l: f64) -> f64 {
    let d = x - c;
    d - l * (d / l).round()
}

fn spectral_energy(g: &Field) -> BTreeMap<i32, f64> {
    let grid = g.grid();
    let rho = crate::lp::frequency_norms_of(grid);
    let spec = g.spectrum();
    let total: f64 = spec.iter().skip(1).map(|c| c.norm_sqr()).sum();
    let mut out = BTreeMap::new();
    if total == 0.0 {
        return out;
    }
    for (r, c) in rho.iter().zip(spec.iter()).skip(1) {
        let e = c.norm_sqr();
        if e > 0.0 {
            *out.entry(r.log2().floor() as i32).or_insert(0.0) += e / total;
        }
    }
    out
}

/// Builds the `(g, ∇g)` pairs of a family on `grid` (or on its dilations
/// for the dilation-sweep kind).
pub fn generate(family: &FamilyConfig, grid: &Arc<Grid>) -> Result<Vec<Sample>> {
    if family.count == 0 {
        return Err(PlpError::config("family count must be positive"));
    }
    let (lo, hi) = family.amplitude;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(PlpError::config("amplitude range must satisfy 0 < lo ≤ hi"));
    }
    let jobs: Vec<(usize, Option<f64>)> = match family.kind {
        FamilyKind::DilationSweep => {
            if family.dilations.is_empty() {
                return Err(PlpError::config("dilation-sweep family needs at least one factor"));
            }
            family
                .dilations
                .iter()
                .flat_map(|mu| (0..family.count).map(move |i| (i, Some(*mu))))
                .collect()
        }
        _ => (0..family.count).map(|i| (i, None)).collect(),
    };
    jobs.par_iter()
        .map(|(i, mu)| {
            let g_grid = match mu {
                Some(mu) => Arc::new(grid.dilated(*mu)?),
                None => grid.clone(),
            };
            one_sample(family, &g_grid, *i, *mu)
        })
        .collect()
}

fn one_sample(family: &FamilyConfig, grid: &Arc<Grid>, index: usize, mu: Option<f64>) -> Result<Sample> {
    let mut rng = sample_rng(family.seed, index);
    let a = grid.anisotropy().clone();
    let lengths = grid.domain().lengths();
    let amplitude = log_uniform(&mut rng, family.amplitude);
    let label = match mu {
        Some(mu) => format!("{:?}/mu={mu}/{index}", family.kind),
        None => format!("{:?}/{index}", family.kind),
    };
    let (g, energy) = match family.kind {
        FamilyKind::BandLimitedRandom | FamilyKind::DilationSweep => {
            let sum = ModeSum::draw(&a, family.bandwidth, &mut rng, amplitude)?;
            (sum.on_grid(grid)?, sum.energy(&a, &lengths))
        }
        FamilyKind::Constant => {
            let g = Field::constant(grid.clone(), family.value);
            let f = VectorField::new(vec![Field::zeros(grid.clone()); grid.ndim()])?;
            return Ok(Sample {
                label,
                dilation: mu,
                g,
                f,
                diagnostics: SampleDiagnostics {
                    amplitude: family.value,
                    l2_scale: 1.0,
                    energy: BTreeMap::new(),
                },
            });
        }
        FamilyKind::SingleMode => {
            if family.mode.len() != grid.ndim() || family.mode.iter().all(|k| *k == 0) {
                return Err(PlpError::config("single-mode family needs a nonzero integer mode per axis"));
            }
            let sum = ModeSum {
                modes: vec![(family.mode.clone(), Complex64::new(0.5 * family.value, 0.0))],
            };
            (sum.on_grid(grid)?, sum.energy(&a, &lengths))
        }
        FamilyKind::AnisoGaussian => {
            let sigma = log_uniform(&mut rng, family.sigma);
            let c = grid.domain().center();
            let g = Field::from_fn(grid.clone(), |z| {
                let e: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let d = minimal_image(*x, c.coords()[i], lengths[i]);
                        (d / sigma.powf(a.weight(i))).powi(2)
                    })
                    .sum();
                amplitude * (-e).exp()
            })?;
            let g = mean_subtract(&g);
            let energy = spectral_energy(&g);
            (g, energy)
        }
        FamilyKind::TruncatedLog => {
            let eps = family.epsilon_cells * grid.spacing(0);
            let center: Vec<f64> = grid
                .domain()
                .center()
                .coords()
                .iter()
                .zip(&lengths)
                .map(|(c, l)| c + (rng.random::<f64>() - 0.5) * l / 4.0)
                .collect();
            let chi = CutoffProfile::BumpQuotient;
            let radius = family.radius;
            let g = Field::from_fn(grid.clone(), |z| {
                let d: Vec<f64> = z
                    .iter()
                    .enumerate()
                    .map(|(i, x)| minimal_image(*x, center[i], lengths[i]))
                    .collect();
                let r = a.norm(&d);
                amplitude * chi.eval(r / radius) * (1.0 / r.max(eps)).ln()
            })?;
            let g = mean_subtract(&g);
            let energy = spectral_energy(&g);
            (g, energy)
        }
    };
    let mut l2_scale = 1.0;
    let g = if family.enforce_l2 {
        let l2 = crate::norms::norm_lp(&g, 2.0)?;
        if l2 > 1.0 {
            l2_scale = 1.0 / l2;
            g.scaled(l2_scale)
        } else {
            g
        }
    } else {
        g
    };
    let f = gradient(&g)?;
    Ok(Sample {
        label,
        dilation: mu,
        g,
        f,
        diagnostics: SampleDiagnostics {
            amplitude,
            l2_scale,
            energy,
        },
    })
}

/// The family's functions sampled directly on a closed box, with mode
/// frequencies taken from the periodic box `periodic_lengths`.
pub fn generate_box(family: &FamilyConfig, grid: &Arc<BoxGrid>, periodic_lengths: &[f64]) -> Result<Vec<BoxSample>> {
    if family.count == 0 {
        return Err(PlpError::config("family count must be positive"));
    }
    let a = grid.anisotropy().clone();
    (0..family.count)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(family.seed, index);
            let amplitude = log_uniform(&mut rng, family.amplitude);
            let label = format!("{:?}/{index}", family.kind);
            let center = grid.domain().center();
            let f = match family.kind {
                FamilyKind::BandLimitedRandom | FamilyKind::DilationSweep => {
                    let sum = ModeSum::draw(&a, family.bandwidth, &mut rng, amplitude)?;
                    BoxField::from_fn(grid.clone(), |z| sum.eval(periodic_lengths, z))?
                }
                FamilyKind::Constant => BoxField::from_fn(grid.clone(), |_| family.value)?,
                FamilyKind::SingleMode => {
                    let sum = ModeSum {
                        modes: vec![(family.mode.clone(), Complex64::new(0.5 * family.value, 0.0))],
                    };
                    BoxField::from_fn(grid.clone(), |z| sum.eval(periodic_lengths, z))?
                }
                FamilyKind::AnisoGaussian => {
                    let sigma = log_uniform(&mut rng, family.sigma);
                    BoxField::from_fn(grid.clone(), |z| {
                        let e: f64 = z
                            .iter()
                            .enumerate()
                            .map(|(i, x)| ((x - center.coords()[i]) / sigma.powf(a.weight(i))).powi(2))
                            .sum();
                        amplitude * (-e).exp()
                    })?
                }
                FamilyKind::TruncatedLog => {
                    let eps = family.epsilon_cells * grid.spacing(0);
                    let chi = CutoffProfile::BumpQuotient;
                    BoxField::from_fn(grid.clone(), |z| {
                        let d: Vec<f64> = z.iter().zip(center.coords()).map(|(x, c)| x - c).collect();
                        let r = a.norm(&d);
                        amplitude * chi.eval(r / family.radius) * (1.0 / r.max(eps)).ln()
                    })?
                }
            };
            Ok(BoxSample { label, f })
        })
        .collect()
}
