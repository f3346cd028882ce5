use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cutoff::CutoffProfile;
use crate::error::{PlpError, Result};
use crate::grid::{for_each_index, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BankMode {
    #[default]
    Homogeneous,
    Inhomogeneous,
}

/// The multipliers `ψ_j(ξ) = θ(2^{−ja}ξ) − θ(2^{−(j−1)a}ξ)` sampled at every
/// grid frequency, for `j` in the grid-resolvable range. In inhomogeneous
/// mode the `j = 0` member is `θ` itself.
#[derive(Debug, Clone)]
pub struct DyadicSymbolBank {
    grid: Arc<Grid>,
    profile: CutoffProfile,
    mode: BankMode,
    j_min: i32,
    j_max: i32,
    rho: Vec<f64>,
    symbols: Vec<Vec<f64>>,
}

/// `|ξ_k|_a` for every DFT index of the grid.
pub(crate) fn frequency_norms(grid: &Grid) -> Vec<f64> {
    let a = grid.anisotropy();
    let freqs: Vec<Vec<f64>> = (0..grid.ndim()).map(|i| grid.frequencies(i)).collect();
    let mut out = vec![0.0; grid.len()];
    let mut xi = vec![0.0; grid.ndim()];
    for_each_index(grid.dims(), |flat, idx| {
        for (axis, k) in idx.iter().enumerate() {
            xi[axis] = freqs[axis][*k];
        }
        out[flat] = a.norm(&xi);
    });
    out
}

pub fn build_symbol_bank(grid: Arc<Grid>, profile: CutoffProfile, mode: BankMode) -> Result<DyadicSymbolBank> {
    let range = match mode {
        BankMode::Homogeneous => grid.homogeneous_scales(),
        BankMode::Inhomogeneous => grid.inhomogeneous_scales(),
    }
    .ok_or_else(|| PlpError::config("grid too coarse: no resolvable dyadic scale"))?;
    DyadicSymbolBank::with_scales(grid, profile, mode, range)
}

impl DyadicSymbolBank {
    /// Bank over an explicit scale range.
    pub fn with_scales(grid: Arc<Grid>, profile: CutoffProfile, mode: BankMode, (j_min, j_max): (i32, i32)) -> Result<Self> {
        if j_min > j_max {
            return Err(PlpError::config("empty dyadic scale range"));
        }
        if mode == BankMode::Inhomogeneous && j_min != 0 {
            return Err(PlpError::config("inhomogeneous banks start at j = 0"));
        }
        let rho = frequency_norms(&grid);
        // theta[j - j_min + 1] holds θ(2^{−j}ρ) for j in j_min−1 ..= j_max.
        let theta: Vec<Vec<f64>> = (j_min - 1..=j_max)
            .map(|j| {
                let s = 2f64.powi(-j);
                rho.iter().map(|r| profile.eval(r * s)).collect()
            })
            .collect();
        let symbols = (j_min..=j_max)
            .map(|j| {
                let i = (j - j_min + 1) as usize;
                if mode == BankMode::Inhomogeneous && j == 0 {
                    theta[i].clone()
                } else {
                    theta[i].iter().zip(&theta[i - 1]).map(|(a, b)| a - b).collect()
                }
            })
            .collect();
        Ok(Self {
            grid,
            profile,
            mode,
            j_min,
            j_max,
            rho,
            symbols,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn profile(&self) -> CutoffProfile {
        self.profile
    }

    pub fn mode(&self) -> BankMode {
        self.mode
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn scales(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// `|ξ|_a` per DFT index.
    pub fn frequency_norms(&self) -> &[f64] {
        &self.rho
    }

    pub fn symbol(&self, j: i32) -> Option<&[f64]> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        Some(&self.symbols[(j - self.j_min) as usize])
    }

    /// Largest `|Σ_j ψ_j(ξ) − 1|` over the frequencies the truncated sum is
    /// expected to cover: `2^{j_min+1} ≤ |ξ|_a ≤ 2^{j_max−1}` (homogeneous) or
    /// `|ξ|_a ≤ 2^{j_max−1}` including `ξ = 0` (inhomogeneous).
    pub fn partition_residual(&self) -> f64 {
        let lo = match self.mode {
            BankMode::Homogeneous => 2f64.powi(self.j_min + 1),
            BankMode::Inhomogeneous => 0.0,
        };
        let hi = 2f64.powi(self.j_max - 1);
        let mut worst = 0.0f64;
        for (k, r) in self.rho.iter().enumerate() {
            let covered = *r >= lo && *r <= hi && (self.mode == BankMode::Inhomogeneous || *r > 0.0);
            if covered {
                let sum: f64 = self.symbols.iter().map(|s| s[k]).sum();
                worst = worst.max((sum - 1.0).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Anisotropy;

    fn grid(n: usize) -> Arc<Grid> {
        Arc::new(Grid::periodic(vec![n, n], Anisotropy::parabolic(1)).unwrap())
    }

    #[test]
    fn partitions_of_unity() {
        let g = grid(128);
        let hom = build_symbol_bank(g.clone(), CutoffProfile::BumpQuotient, BankMode::Homogeneous).unwrap();
        assert!(hom.partition_residual() <= 1e-12);
        let inh = build_symbol_bank(g, CutoffProfile::BumpQuotient, BankMode::Inhomogeneous).unwrap();
        assert!(inh.partition_residual() <= 1e-12);
        let dc: f64 = inh.scales().map(|j| inh.symbol(j).unwrap()[0]).sum();
        assert_eq!(dc, 1.0);
    }

    #[test]
    fn annulus_support() {
        let bank = build_symbol_bank(grid(128), CutoffProfile::BumpQuotient, BankMode::Homogeneous).unwrap();
        for j in bank.scales() {
            let s = bank.symbol(j).unwrap();
            for (k, r) in bank.frequency_norms().iter().enumerate() {
                if s[k] != 0.0 {
                    assert!(*r > 2f64.powi(j - 1) && *r < 2f64.powi(j + 1));
                }
            }
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = Arc::new(
            Grid::new(
                vec![4, 4],
                crate::geometry::AxisBox::cube(2, 1e-3).unwrap(),
                Anisotropy::parabolic(1),
            )
            .unwrap(),
        );
        // Lowest frequency far above Nyquist of the coarsest admissible band.
        let r = build_symbol_bank(g, CutoffProfile::BumpQuotient, BankMode::Homogeneous);
        assert!(matches!(r, Err(PlpError::Config(_))));
    }
}
