use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PlpError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum InequalityId {
    #[default]
    #[serde(rename = "thm1.1")]
    Thm11,
    #[serde(rename = "eqIM")]
    EqIm,
    #[serde(rename = "thm1.4")]
    Thm14,
    #[serde(rename = "thm1.7")]
    Thm17,
    #[serde(rename = "lemma3.1")]
    Lemma31,
    #[serde(rename = "lemma3.2")]
    Lemma32,
    #[serde(rename = "mt2ato")]
    Mt2ato,
    #[serde(rename = "lemma5.1")]
    Lemma51,
    #[serde(rename = "lemma5.2")]
    Lemma52,
    #[serde(rename = "embed2.12")]
    Embed212,
    #[serde(rename = "embed2.13")]
    Embed213,
    #[serde(rename = "bernstein")]
    Bernstein,
}

impl InequalityId {
    pub const ALL: [InequalityId; 12] = [
        InequalityId::Thm11,
        InequalityId::EqIm,
        InequalityId::Thm14,
        InequalityId::Thm17,
        InequalityId::Lemma31,
        InequalityId::Lemma32,
        InequalityId::Mt2ato,
        InequalityId::Lemma51,
        InequalityId::Lemma52,
        InequalityId::Embed212,
        InequalityId::Embed213,
        InequalityId::Bernstein,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InequalityId::Thm11 => "thm1.1",
            InequalityId::EqIm => "eqIM",
            InequalityId::Thm14 => "thm1.4",
            InequalityId::Thm17 => "thm1.7",
            InequalityId::Lemma31 => "lemma3.1",
            InequalityId::Lemma32 => "lemma3.2",
            InequalityId::Mt2ato => "mt2ato",
            InequalityId::Lemma51 => "lemma5.1",
            InequalityId::Lemma52 => "lemma5.2",
            InequalityId::Embed212 => "embed2.12",
            InequalityId::Embed213 => "embed2.13",
            InequalityId::Bernstein => "bernstein",
        }
    }

    /// Ids whose constant is explicit, so violations are assertion failures.
    pub fn is_explicit(&self) -> bool {
        matches!(self, InequalityId::Mt2ato | InequalityId::Lemma51)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = PlpError;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| PlpError::config(format!("unknown inequality id {s:?}")))
    }
}

/// One sample's evaluation. `c_sample = lhs / rhs_shape`, so
/// `lhs ≤ c_sample · rhs_shape` holds by construction.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Record {
    pub label: String,
    pub lhs: f64,
    pub rhs_shape: f64,
    pub c_sample: f64,
    /// Named right-hand-side ingredients (norms, log factors, case data).
    pub components: BTreeMap<String, f64>,
}

impl Record {
    pub fn new(label: impl Into<String>, lhs: f64, rhs_shape: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs_shape,
            c_sample: minimal_constant(lhs, rhs_shape),
            components: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.components.insert(name.to_string(), value);
        self
    }
}

/// Smallest `C` with `lhs ≤ C·rhs`; zero when `lhs = 0`.
pub fn minimal_constant(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        lhs / rhs
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub count: usize,
    #[serde(rename = "C_max")]
    pub c_max: f64,
    #[serde(rename = "C_median")]
    pub c_median: f64,
    #[serde(rename = "C_mean")]
    pub c_mean: f64,
    #[serde(rename = "C_min")]
    pub c_min: f64,
    pub spread: f64,
    pub quantiles: BTreeMap<String, f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos - pos.floor());
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Family statistics of the per-sample constants.
pub fn fit_constant(records: &[Record]) -> Result<Summary> {
    if records.len() < 2 {
        return Err(PlpError::config(format!(
            "fitting a constant needs at least 2 samples, got {}",
            records.len()
        )));
    }
    let mut cs: Vec<f64> = records.iter().map(|r| r.c_sample).collect();
    if cs.iter().any(|c| c.is_nan()) {
        return Err(PlpError::data("a per-sample constant is NaN"));
    }
    cs.sort_by(f64::total_cmp);
    let n = cs.len();
    let quantiles = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|q| (format!("q{:02}", (q * 100.0) as u32), quantile(&cs, *q)))
        .collect();
    Ok(Summary {
        count: n,
        c_max: cs[n - 1],
        c_median: quantile(&cs, 0.5),
        c_mean: cs.iter().sum::<f64>() / n as f64,
        c_min: cs[0],
        spread: cs[n - 1] - cs[0],
        quantiles,
    })
}

/// A named pass/fail assertion attached to a report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    /// Explicit-constant checks map to the assertion-failure exit code.
    pub explicit: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64, explicit: bool) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            explicit,
        }
    }

    pub fn finite(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            passed: value.is_finite(),
            value,
            threshold: f64::INFINITY,
            explicit: false,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, explicit: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: f64::from(u8::from(passed)),
            threshold: 1.0,
            explicit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub dims: Vec<usize>,
    pub lengths: Vec<f64>,
    pub anisotropy: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Runtime {
    pub seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub schema_version: u32,
    pub id: InequalityId,
    pub config_echo: serde_json::Value,
    pub grid: GridMeta,
    pub seed: u64,
    pub per_sample: Vec<Record>,
    pub summary: Summary,
    /// Id-specific extras (sweeps, scans, synthetic checks).
    pub extras: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub runtime: Runtime,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn explicit_failure(&self) -> bool {
        self.checks.iter().any(|c| c.explicit && !c.passed)
    }

    /// `label,lhs,rhs_shape,c_sample,<components…>` rows.
    pub fn to_csv(&self) -> String {
        let mut names: Vec<&String> = self
            .per_sample
            .iter()
            .flat_map(|r| r.components.keys())
            .collect();
        names.sort();
        names.dedup();
        let mut out = String::from("label,lhs,rhs_shape,c_sample");
        for n in &names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for r in &self.per_sample {
            out.push_str(&format!("{},{:?},{:?},{:?}", r.label, r.lhs, r.rhs_shape, r.c_sample));
            for n in &names {
                out.push(',');
                if let Some(v) = r.components.get(*n) {
                    out.push_str(&format!("{v:?}"));
                }
            }
            out.push('\n');
        }
        out
    }
}
