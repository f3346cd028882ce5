use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};

/// Radial transition `χ` with `χ = 1` on `[0, 1]` and `χ = 0` on `[2, ∞)`;
/// the cutoff is `θ(ξ) = χ(|ξ|_a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutoffProfile {
    /// `B(2−r) / (B(2−r) + B(r−1))` with `B(u) = e^{−1/u}` for `u > 0`.
    #[default]
    BumpQuotient,
    /// Polynomial smoothstep, `C^order` at both ends of the transition.
    Smoothstep { order: u32 },
}

fn bump(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl CutoffProfile {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 1.0 {
            return 1.0;
        }
        if r >= 2.0 {
            return 0.0;
        }
        match self {
            CutoffProfile::BumpQuotient => {
                let (a, b) = (bump(2.0 - r), bump(r - 1.0));
                a / (a + b)
            }
            CutoffProfile::Smoothstep { order } => {
                let x = r - 1.0;
                let n = u64::from(*order);
                let s: f64 = (0..=n)
                    .map(|k| {
                        binomial(n + k, k) * binomial(2 * n + 1, n - k) * (-x).powi(k as i32)
                    })
                    .sum::<f64>()
                    * x.powi(*order as i32 + 1);
                (1.0 - s).clamp(0.0, 1.0)
            }
        }
    }

    /// Number of continuous derivatives at the transition ends.
    pub fn smoothness(&self) -> Option<u32> {
        match self {
            CutoffProfile::BumpQuotient => None,
            CutoffProfile::Smoothstep { order } => Some(*order),
        }
    }
}

/// The default `C^∞` profile; every requested order is met.
pub fn build_cutoff(smoothness: u32) -> Result<CutoffProfile> {
    if smoothness == 0 {
        return Err(PlpError::config("cutoff smoothness order must be at least 1"));
    }
    Ok(CutoffProfile::BumpQuotient)
}
