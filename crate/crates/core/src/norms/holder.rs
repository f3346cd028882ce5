use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::grid::{for_each_index, strides};

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    /// A lower bound for the continuum semi-norm.
    pub value: f64,
    pub pairs: usize,
    pub exhaustive: bool,
    pub budget: usize,
}

/// `sup |g(z₁) − g(z₂)| / ‖z₁ − z₂‖^γ` with Euclidean, minimal-image
/// distances. All pairs are visited when there are at most `budget` of them;
/// otherwise every nearest-neighbour pair plus `budget` seeded random pairs.
pub fn holder_seminorm(g: &Field, gamma: f64, budget: usize, seed: u64) -> Result<HolderReport> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(PlpError::config(format!("Hölder exponent must lie in (0, 1), got {gamma}")));
    }
    let grid = g.grid();
    let dims = grid.dims();
    let h = grid.spacings();
    let st = strides(dims);
    let values = g.values();
    let n = values.len();
    let unravel = |mut flat: usize, out: &mut [usize]| {
        for (axis, s) in st.iter().enumerate() {
            out[axis] = flat / s;
            flat %= s;
        }
    };
    let quotient = |a: &[usize], b: &[usize], va: f64, vb: f64| -> f64 {
        let d2: f64 = (0..dims.len())
            .map(|i| {
                let k = a[i].abs_diff(b[i]);
                let m = k.min(dims[i] - k) as f64 * h[i];
                m * m
            })
            .sum();
        if d2 == 0.0 {
            0.0
        } else {
            (va - vb).abs() / d2.powf(0.5 * gamma)
        }
    };

    let total_pairs = n * (n - 1) / 2;
    let mut best = 0.0f64;
    let mut pairs = 0usize;
    let (mut ia, mut ib) = (vec![0; dims.len()], vec![0; dims.len()]);
    if total_pairs <= budget {
        for i in 0..n {
            unravel(i, &mut ia);
            for j in i + 1..n {
                unravel(j, &mut ib);
                best = best.max(quotient(&ia, &ib, values[i], values[j]));
            }
        }
        return Ok(HolderReport {
            value: best,
            pairs: total_pairs,
            exhaustive: true,
            budget,
        });
    }
    for_each_index(dims, |flat, idx| {
        for axis in 0..dims.len() {
            ib.copy_from_slice(idx);
            ib[axis] = (idx[axis] + 1) % dims[axis];
            let other: usize = ib.iter().zip(&st).map(|(k, s)| k * s).sum();
            best = best.max(quotient(idx, &ib, values[flat], values[other]));
            pairs += 1;
        }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        unravel(i, &mut ia);
        unravel(j, &mut ib);
        best = best.max(quotient(&ia, &ib, values[i], values[j]));
        pairs += 1;
    }
    Ok(HolderReport {
        value: best,
        pairs,
        exhaustive: false,
        budget,
    })
}
