use num_complex::Complex64;
use rayon::prelude::*;

use super::bank::{BankMode, DyadicSymbolBank};
use crate::error::{PlpError, Result};
use crate::field::Field;

/// Blocks `φ_j * f` over the bank's scale range, plus the pieces that keep
/// the bookkeeping exact: `f = dc + Σ_j blocks + residual`.
#[derive(Debug, Clone)]
pub struct LpDecomposition {
    mode: BankMode,
    j_min: i32,
    blocks: Vec<Field>,
    residual: Field,
    dc: f64,
}

impl LpDecomposition {
    pub fn mode(&self) -> BankMode {
        self.mode
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_min + self.blocks.len() as i32 - 1)
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<i32> {
        let (a, b) = self.j_range();
        a..=b
    }

    pub fn block(&self, j: i32) -> Option<&Field> {
        let i = j - self.j_min;
        (i >= 0).then(|| self.blocks.get(i as usize)).flatten()
    }

    /// `(j, φ_j * f)` in increasing `j`.
    pub fn blocks(&self) -> impl Iterator<Item = (i32, &Field)> {
        self.blocks
            .iter()
            .enumerate()
            .map(move |(i, b)| (self.j_min + i as i32, b))
    }

    /// Energy outside the resolvable scales.
    pub fn residual(&self) -> &Field {
        &self.residual
    }

    /// Grid mean, kept apart in homogeneous mode; zero in inhomogeneous mode
    /// where the `j = 0` block carries it.
    pub fn dc(&self) -> f64 {
        self.dc
    }

    /// `dc + Σ blocks + residual`.
    pub fn reconstruct(&self) -> Field {
        let mut values = vec![self.dc; self.residual.len()];
        for b in self.blocks.iter().chain(std::iter::once(&self.residual)) {
            for (v, x) in values.iter_mut().zip(b.values()) {
                *v += x;
            }
        }
        Field::from_parts(self.residual.grid_arc().clone(), values)
    }

    /// `Σ_j blocks` only.
    pub fn block_sum(&self) -> Field {
        let mut values = vec![0.0; self.residual.len()];
        for b in &self.blocks {
            for (v, x) in values.iter_mut().zip(b.values()) {
                *v += x;
            }
        }
        Field::from_parts(self.residual.grid_arc().clone(), values)
    }
}

/// Decompose `f` with the bank's multipliers.
pub fn lp_decompose(f: &Field, bank: &DyadicSymbolBank) -> Result<LpDecomposition> {
    if f.grid() != bank.grid().as_ref() {
        return Err(PlpError::structural("field and symbol bank are on different grids"));
    }
    let spec = f.spectrum();
    let scales: Vec<i32> = bank.scales().collect();
    let blocks = scales
        .par_iter()
        .map(|j| {
            let psi = bank.symbol(*j).expect("scale in range");
            let s: Vec<Complex64> = spec.iter().zip(psi).map(|(c, p)| c * p).collect();
            Field::from_spectrum(bank.grid().clone(), s)
        })
        .collect::<Result<Vec<_>>>()?;

    let (dc, keep_dc) = match bank.mode() {
        BankMode::Homogeneous => (spec[0].re / f.len() as f64, false),
        BankMode::Inhomogeneous => (0.0, true),
    };
    let mut rest: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let covered: f64 = scales.iter().map(|j| bank.symbol(*j).expect("in range")[k]).sum();
            c * (1.0 - covered)
        })
        .collect();
    if !keep_dc {
        rest[0] = Complex64::default();
    }
    let residual = Field::from_spectrum(bank.grid().clone(), rest)?;
    Ok(LpDecomposition {
        mode: bank.mode(),
        j_min: scales[0],
        blocks,
        residual,
        dc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Anisotropy;
    use crate::grid::Grid;
    use crate::lp::bank::build_symbol_bank;
    use crate::lp::cutoff::CutoffProfile;
    use std::sync::Arc;

    #[test]
    fn single_mode_on_small_grid() {
        // |ξ|_a = 1 for ξ = (1, 0): on the sphere of scale j₀ = 0.
        let g = Arc::new(Grid::periodic(vec![8, 8], Anisotropy::parabolic(1)).unwrap());
        let bank = build_symbol_bank(g.clone(), CutoffProfile::BumpQuotient, BankMode::Homogeneous).unwrap();
        let f = Field::from_fn(g.clone(), |z| z[0].cos()).unwrap();
        let d = lp_decompose(&f, &bank).unwrap();
        let nonzero: Vec<i32> = d
            .blocks()
            .filter(|(_, b)| b.max_abs() > 1e-14)
            .map(|(j, _)| j)
            .collect();
        assert!(nonzero.iter().all(|j| (-1..=1).contains(j)));
        assert!(!nonzero.is_empty());

        // Direct DFT-multiply oracle: naive O(N²) transform of ψ·f̂.
        let n = 8usize;
        let vals = f.values();
        let mut spec = vec![Complex64::default(); 64];
        for k in 0..64 {
            for x in 0..64 {
                let phase = -2.0 * std::f64::consts::PI
                    * (((k / n) * (x / n)) as f64 / n as f64 + ((k % n) * (x % n)) as f64 / n as f64);
                spec[k] += vals[x] * Complex64::from_polar(1.0, phase);
            }
        }
        for (j, block) in d.blocks() {
            let psi = bank.symbol(j).unwrap();
            for x in 0..64 {
                let mut acc = Complex64::default();
                for k in 0..64 {
                    let phase = 2.0 * std::f64::consts::PI
                        * (((k / n) * (x / n)) as f64 / n as f64 + ((k % n) * (x % n)) as f64 / n as f64);
                    acc += spec[k] * psi[k] * Complex64::from_polar(1.0, phase);
                }
                assert!((acc.re / 64.0 - block.values()[x]).abs() < 1e-12);
            }
        }
        let sum = d.block_sum();
        assert!(sum.sub(&f).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn constant_field() {
        let g = Arc::new(Grid::periodic(vec![16, 16], Anisotropy::parabolic(1)).unwrap());
        let f = Field::constant(g.clone(), 3.0);
        let hom = build_symbol_bank(g.clone(), CutoffProfile::BumpQuotient, BankMode::Homogeneous).unwrap();
        let d = lp_decompose(&f, &hom).unwrap();
        assert!(d.blocks().all(|(_, b)| b.max_abs() == 0.0));
        assert_eq!(d.dc(), 3.0);
        let inh = build_symbol_bank(g, CutoffProfile::BumpQuotient, BankMode::Inhomogeneous).unwrap();
        let d = lp_decompose(&f, &inh).unwrap();
        assert!(d.block(0).unwrap().sub(&f).unwrap().max_abs() < 1e-14);
    }
}
