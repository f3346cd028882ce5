use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::FamilyConfig;
use super::report::InequalityId;
use crate::error::{PlpError, Result};
use crate::geometry::{Anisotropy, AxisBox, SamplerPolicy};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AnisotropyKind {
    #[default]
    Parabolic,
    Isotropic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Periodic samples per axis, time last.
    pub dims: Vec<usize>,
    /// Box side lengths; `2π` on every axis when absent.
    pub lengths: Option<Vec<f64>>,
    pub anisotropy: AnisotropyKind,
    /// `T` in `Ω_T`.
    pub horizon: f64,
    /// Intervals per axis when sampling `Ω_T`.
    pub box_intervals: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            dims: vec![256, 256],
            lengths: None,
            anisotropy: AnisotropyKind::Parabolic,
            horizon: 1.0,
            box_intervals: 64,
        }
    }
}

impl GridConfig {
    pub fn spatial_dim(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn anisotropy(&self) -> Anisotropy {
        match self.anisotropy {
            AnisotropyKind::Parabolic => Anisotropy::parabolic(self.spatial_dim()),
            AnisotropyKind::Isotropic => Anisotropy::isotropic(self.spatial_dim()),
        }
    }

    pub fn build(&self) -> Result<Arc<Grid>> {
        if self.dims.len() < 2 {
            return Err(PlpError::config("grids need at least one spatial axis and time"));
        }
        let lengths = self.lengths.clone().unwrap_or_else(|| vec![2.0 * PI; self.dims.len()]);
        if lengths.len() != self.dims.len() {
            return Err(PlpError::config(format!(
                "{} box lengths given for a {}-axis grid",
                lengths.len(),
                self.dims.len()
            )));
        }
        let domain = AxisBox::new(vec![0.0; lengths.len()], lengths)?;
        Ok(Arc::new(Grid::new(self.dims.clone(), domain, self.anisotropy())?))
    }

    /// Same configuration with every axis refined by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            dims: self.dims.iter().map(|d| d * factor).collect(),
            box_intervals: self.box_intervals * factor,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InequalityConfig {
    pub id: InequalityId,
    /// Smoothness index in `W^{2m,m}_2`.
    pub m: usize,
    /// `γ` of the `f₊`/`f₋` split.
    pub gamma: f64,
    /// `γ` values and cut range checked by the explicit cut bound.
    pub step1_gammas: Vec<f64>,
    pub step1_n_max: u32,
    /// Brute-force range of the dyadic-cut optimizer.
    pub cut_n_max: u32,
    /// Synthetic `(‖f₊‖+‖f₋‖, ‖f‖)` pairs for the dyadic-cut check.
    pub cut_pairs: usize,
    /// `log₂` range of the synthetic ratio `(‖f₊‖+‖f₋‖)/‖f‖`.
    pub cut_log2_ratio: (f64, f64),
    /// `γ` used for the synthetic pairs.
    pub cut_gamma: f64,
    /// Axis of the antiderivative in the bounded-domain pipeline.
    pub antiderivative_axis: usize,
    /// Run resolution / dilation / held-out checks where they apply.
    pub sweeps: bool,
    pub dilations: Vec<f64>,
    /// Samples per dilation factor in the dilation sweep.
    pub dilation_count: usize,
    pub holdout_count: usize,
    /// Split-inequality scan resolution per axis.
    pub split_points: usize,
    pub holder_budget: usize,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        Self {
            id: InequalityId::Thm11,
            m: 1,
            gamma: 0.25,
            step1_gammas: vec![0.25, 0.5, 0.75],
            step1_n_max: 16,
            cut_n_max: 64,
            cut_pairs: 100,
            cut_log2_ratio: (-2.0, 8.0),
            cut_gamma: 1.0,
            antiderivative_axis: 0,
            sweeps: true,
            dilations: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            dilation_count: 50,
            holdout_count: 50,
            split_points: 400,
            holder_budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative slack for inequalities with explicit constants.
    pub explicit: f64,
    /// Allowed relative change of a fitted constant under refinement.
    pub resolution_drift: f64,
    /// Allowed factor between fitted constants across dilations.
    pub dilation_factor: f64,
    /// Margin on the fitted constant for the held-out family.
    pub holdout_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            explicit: 1e-8,
            resolution_drift: 0.25,
            dilation_factor: 2.0,
            holdout_margin: 1.5,
        }
    }
}

/// A complete lab run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct LabConfig {
    pub grid: GridConfig,
    pub family: FamilyConfig,
    pub sampler: SamplerPolicy,
    pub inequality: InequalityConfig,
    pub tolerances: Tolerances,
}

impl LabConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PlpError::config(format!("bad configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PlpError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn with_id(&self, id: InequalityId) -> Self {
        let mut c = self.clone();
        c.inequality.id = id;
        c
    }

    /// `η = 2m − Q/2`, `Q` the homogeneous dimension.
    pub fn eta(&self) -> f64 {
        2.0 * self.inequality.m as f64 - 0.5 * self.grid.anisotropy().homogeneous_dimension()
    }
}
