//! Function-space norms evaluated on sampled fields.
//!
//! Vector-valued inputs reduce by the max over components; see
//! [`crate::field::VectorField::max_norm`].

mod bmo;
pub(crate) mod cubes;
mod dyadic;
mod holder;
mod lebesgue;
mod sobolev;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use bmo::{box_norm_bmo, mean_oscillation, norm_bar_bmo, norm_bmo, norm_bmo_cubes, BarBmoReport, BmoReport};
pub use dyadic::{
    besov_of, block_sum_sup, default_bank, fminus_of, fplus_of, norm_besov, norm_fminus, norm_fplus, norm_triebel,
    norm_triebel_infty_q, triebel_infty_q_of, triebel_of, TriebelInftyReport,
};
pub use holder::{holder_seminorm, HolderReport};
pub use lebesgue::{box_norm_lp, norm_linf, norm_lp};
pub use sobolev::{
    box_norm_sobolev_parabolic, derivative_l2, norm_homogeneous_hs, norm_sobolev_parabolic, parabolic_orders,
};

use crate::error::Result;
use crate::field::{mean_subtract, Field};
use crate::geometry::SamplerPolicy;
use crate::lp::BankMode;

/// Exponents `p, q ∈ [1, ∞]`; JSON spells infinity as `"inf"`.
pub mod exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => parse(&t).map_err(de::Error::custom),
        }
    }

    pub fn parse(t: &str) -> Result<f64, String> {
        match t.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
            other => other.parse().map_err(|_| format!("not an exponent: {t}")),
        }
    }
}

/// Which norm to evaluate, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum NormSpec {
    Lp {
        #[serde(with = "exponent")]
        p: f64,
    },
    Linf,
    SobolevParabolic {
        m: usize,
    },
    Bmo,
    Besov {
        s: f64,
        #[serde(with = "exponent")]
        p: f64,
        #[serde(with = "exponent")]
        q: f64,
        #[serde(default)]
        mode: BankMode,
    },
    Triebel {
        s: f64,
        #[serde(with = "exponent")]
        p: f64,
        #[serde(with = "exponent")]
        q: f64,
    },
    TriebelInftyQ {
        #[serde(with = "exponent")]
        q: f64,
    },
    FPlus {
        s: f64,
        #[serde(with = "exponent")]
        q: f64,
    },
    FMinus {
        s: f64,
        #[serde(with = "exponent")]
        q: f64,
    },
    HomogeneousHs {
        s: f64,
    },
    HolderSemi {
        gamma: f64,
    },
}

/// Sampling budgets for the sup-type norms.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub sampler: SamplerPolicy,
    pub holder_budget: usize,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            sampler: SamplerPolicy::default(),
            holder_budget: 200_000,
            seed: 42,
        }
    }
}

/// A norm value with evaluator diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub diagnostics: serde_json::Value,
}

/// Evaluate `spec` on a periodic field. Homogeneous norms see the
/// mean-zero representative.
pub fn evaluate(spec: &NormSpec, f: &Field, opts: &EvalOptions) -> Result<NormValue> {
    let plain = |value: f64| NormValue {
        value,
        diagnostics: json!({}),
    };
    Ok(match spec {
        NormSpec::Lp { p } => plain(norm_lp(f, *p)?),
        NormSpec::Linf => plain(norm_linf(f)),
        NormSpec::SobolevParabolic { m } => plain(norm_sobolev_parabolic(f, *m)?),
        NormSpec::Bmo => {
            let r = norm_bmo(f, &opts.sampler)?;
            NormValue {
                value: r.value,
                diagnostics: json!({"cubes": r.cubes, "skipped": r.skipped, "sampler": opts.sampler}),
            }
        }
        NormSpec::Besov { s, p, q, mode } => {
            let g = if *mode == BankMode::Homogeneous { mean_subtract(f) } else { f.clone() };
            plain(norm_besov(&g, *s, *p, *q, *mode)?)
        }
        NormSpec::Triebel { s, p, q } => plain(norm_triebel(&mean_subtract(f), *s, *p, *q)?),
        NormSpec::TriebelInftyQ { q } => {
            let r = norm_triebel_infty_q(&mean_subtract(f), *q)?;
            NormValue {
                value: r.value,
                diagnostics: json!({"cubes": r.cubes, "cube_scales": r.cube_scales, "truncated_tail": r.truncated_tail}),
            }
        }
        NormSpec::FPlus { s, q } => plain(norm_fplus(&mean_subtract(f), *s, *q)?),
        NormSpec::FMinus { s, q } => plain(norm_fminus(&mean_subtract(f), *s, *q)?),
        NormSpec::HomogeneousHs { s } => plain(norm_homogeneous_hs(&mean_subtract(f), *s)?),
        NormSpec::HolderSemi { gamma } => {
            let r = holder_seminorm(f, *gamma, opts.holder_budget, opts.seed)?;
            NormValue {
                value: r.value,
                diagnostics: json!({"pairs": r.pairs, "exhaustive": r.exhaustive, "budget": r.budget}),
            }
        }
    })
}
