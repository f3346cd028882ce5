use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::LabConfig;
use super::cut::{c_gamma, optimize_dyadic_cut_values, scan_split_inequality};
use super::evaluate::{eval_sample, Context};
use super::family::{generate, generate_box, BoxSample, FamilyKind};
use super::pipeline::{eval_bounded, omega_grid};
use super::report::{fit_constant, Check, GridMeta, InequalityId, InequalityReport, Record, Runtime, Summary, SCHEMA_VERSION};
use crate::error::{PlpError, Result};
use crate::boxfield::BoxField;

/// Offset between the main family seed and the held-out family seed.
const HOLDOUT_SEED_OFFSET: u64 = 0x5eed;

/// The family actually used for `cfg`: `thm1.7` forces `‖g‖_{L²} ≤ 1`.
fn effective_config(cfg: &LabConfig) -> LabConfig {
    let mut c = cfg.clone();
    if c.inequality.id == InequalityId::Thm17 {
        c.family.enforce_l2 = true;
    }
    c
}

/// Per-sample records for the periodic family of `cfg`.
pub fn evaluate_family(cfg: &LabConfig) -> Result<Vec<Record>> {
    let cfg = effective_config(cfg);
    let id = cfg.inequality.id;
    let ctx = Context::from_config(&cfg);
    if id == InequalityId::Thm14 {
        return bounded_records(&cfg, &ctx);
    }
    let grid = cfg.grid.build()?;
    let samples = generate(&cfg.family, &grid)?;
    samples.par_iter().map(|s| eval_sample(id, s, &ctx)).collect()
}

fn bounded_records(cfg: &LabConfig, ctx: &Context) -> Result<Vec<Record>> {
    let grid = omega_grid(&cfg.grid)?;
    let lengths: Vec<f64> = grid.domain().lengths().iter().map(|l| 2.0 * l).collect();
    let samples = generate_box(&cfg.family, &grid, &lengths)?;
    let axis = cfg.inequality.antiderivative_axis;
    samples.par_iter().map(|s| eval_bounded(s, ctx, axis)).collect()
}

/// The constant field `f ≡ value` on `Ω_T` through the bounded-domain
/// evaluator: its BMO part vanishes while the bar-BMO part does not.
pub fn constant_box_record(cfg: &LabConfig, value: f64) -> Result<Record> {
    let grid = omega_grid(&cfg.grid)?;
    let sample = BoxSample {
        label: "constant".into(),
        f: BoxField::from_fn(grid, |_| value)?,
    };
    eval_bounded(&sample, &Context::from_config(cfg), cfg.inequality.antiderivative_axis)
}

/// Two fitted constants and their relative change.
#[derive(Debug, Clone, Serialize)]
pub struct Drift {
    pub base: f64,
    pub other: f64,
    /// `|other − base| / base`.
    pub relative: f64,
}

impl Drift {
    pub fn new(base: f64, other: f64) -> Self {
        let relative = if base == other {
            0.0
        } else if base > 0.0 {
            (other - base).abs() / base
        } else {
            f64::INFINITY
        };
        Self { base, other, relative }
    }
}

/// The statistic whose stability a sweep tracks: `C_max`, or the two-sided
/// equivalence constant `K` for `lemma3.1`.
pub fn tracked_constant(id: InequalityId, records: &[Record]) -> Result<f64> {
    if id == InequalityId::Lemma31 {
        return Ok(equivalence_constant(records));
    }
    Ok(fit_constant(records)?.c_max)
}

/// `K = max(max ratio, 1/min ratio)` over all components of all samples.
pub fn equivalence_constant(records: &[Record]) -> f64 {
    let mut hi = 0.0f64;
    let mut lo = f64::INFINITY;
    for r in records {
        if let (Some(a), Some(b)) = (r.components.get("ratio_min"), r.components.get("ratio_max")) {
            lo = lo.min(*a);
            hi = hi.max(*b);
        }
    }
    if lo.is_infinite() {
        return 0.0;
    }
    hi.max(1.0 / lo)
}

/// Refines every axis by `factor` and compares the tracked constants.
pub fn resolution_sweep(cfg: &LabConfig, factor: usize) -> Result<Drift> {
    let id = cfg.inequality.id;
    let base = tracked_constant(id, &evaluate_family(cfg)?)?;
    let mut fine = cfg.clone();
    fine.grid = cfg.grid.refined(factor);
    let other = tracked_constant(id, &evaluate_family(&fine)?)?;
    Ok(Drift::new(base, other))
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationSweep {
    /// `(μ, fitted summary)` per dilation factor.
    pub per_mu: Vec<(f64, Summary)>,
    /// Largest `max(C_μ/C_ref, C_ref/C_μ)`, `C_ref` at `μ = 1` (or the
    /// first factor when 1 is absent).
    pub factor: f64,
}

/// Evaluates the dilation-sweep family: the same functions on grids
/// stretched by `δ_μ`.
pub fn dilation_sweep(cfg: &LabConfig) -> Result<DilationSweep> {
    let mut c = effective_config(cfg);
    c.family.kind = FamilyKind::DilationSweep;
    c.family.count = cfg.inequality.dilation_count;
    c.family.dilations = cfg.inequality.dilations.clone();
    if c.family.dilations.is_empty() {
        return Err(PlpError::config("dilation sweep needs at least one factor"));
    }
    let records = evaluate_family(&c)?;
    let count = c.family.count;
    let per_mu = c
        .family
        .dilations
        .iter()
        .enumerate()
        .map(|(i, mu)| Ok((*mu, fit_constant(&records[i * count..(i + 1) * count])?)))
        .collect::<Result<Vec<_>>>()?;
    let reference = per_mu
        .iter()
        .find(|(mu, _)| *mu == 1.0)
        .unwrap_or(&per_mu[0])
        .1
        .c_max;
    let factor = per_mu
        .iter()
        .map(|(_, s)| {
            if s.c_max == reference {
                1.0
            } else if s.c_max > 0.0 && reference > 0.0 {
                (s.c_max / reference).max(reference / s.c_max)
            } else {
                f64::INFINITY
            }
        })
        .fold(1.0, f64::max);
    Ok(DilationSweep { per_mu, factor })
}

/// Re-generates the family with an unrelated seed and `holdout_count`
/// samples; returns the worst per-sample constant.
pub fn holdout_constant(cfg: &LabConfig) -> Result<f64> {
    let mut c = cfg.clone();
    c.family.seed = cfg.family.seed.wrapping_add(HOLDOUT_SEED_OFFSET);
    c.family.count = cfg.inequality.holdout_count;
    let records = evaluate_family(&c)?;
    Ok(records.iter().map(|r| r.c_sample).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct CutAgreement {
    pub pairs: usize,
    pub agreeing: usize,
    pub worst_gap: u32,
}

/// The analytic `N(β)` rule against brute force on synthetic norm pairs with
/// `log₂(S/F)` spread over `cut_log2_ratio`.
pub fn synthetic_cut_agreement(cfg: &LabConfig) -> Result<CutAgreement> {
    let ic = &cfg.inequality;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.family.seed);
    let (lo, hi) = ic.cut_log2_ratio;
    let mut agreeing = 0;
    let mut worst_gap = 0;
    for i in 0..ic.cut_pairs {
        let r = lo + (hi - lo) * (i as f64 + rng.random::<f64>()) / ic.cut_pairs as f64;
        let f = 10f64.powf(rng.random_range(-3.0..3.0));
        let cut = optimize_dyadic_cut_values(2f64.powf(r) * f, f, ic.cut_gamma, ic.cut_n_max)?;
        worst_gap = worst_gap.max(cut.analytic_n.abs_diff(cut.brute_n));
        agreeing += usize::from(cut.agrees);
    }
    Ok(CutAgreement {
        pairs: ic.cut_pairs,
        agreeing,
        worst_gap,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Runs one inequality end to end: family, per-sample records, fitted
/// summary, id-specific extras and pass/fail checks.
pub fn run(cfg: &LabConfig) -> Result<InequalityReport> {
    let start = Instant::now();
    let cfg = effective_config(cfg);
    let id = cfg.inequality.id;
    let tol = &cfg.tolerances;
    let records = evaluate_family(&cfg)?;
    let summary = fit_constant(&records)?;
    let mut extras: BTreeMap<String, Value> = BTreeMap::new();
    let mut checks = vec![Check::finite("C_max finite", summary.c_max)];
    let sweeps = cfg.inequality.sweeps;

    match id {
        InequalityId::Mt2ato => {
            checks.push(Check::at_most("dyadic-cut bound", summary.c_max, 1.0 + tol.explicit, true));
            checks.push(Check::flag("C_γ(1/2) = 1", c_gamma(0.5) == 1.0, true));
            let table: Vec<(f64, f64)> = cfg.inequality.step1_gammas.iter().map(|g| (*g, c_gamma(*g))).collect();
            extras.insert("c_gamma".into(), to_value(&table));
        }
        InequalityId::Lemma51 => {
            checks.push(Check::at_most("‖g‖_Ḣ^s ≤ ‖f‖_W", summary.c_max, 1.0 + tol.explicit, true));
        }
        InequalityId::Lemma32 => {
            let agreement = synthetic_cut_agreement(&cfg)?;
            checks.push(Check::flag("cut rule within 1 of brute force", agreement.agreeing == agreement.pairs, true));
            let per_sample = records
                .iter()
                .filter_map(|r| r.components.get("cut_agrees"))
                .all(|a| *a == 1.0);
            checks.push(Check::flag("cut rule on family samples", per_sample, true));
            extras.insert("synthetic_cut".into(), to_value(&agreement));
        }
        InequalityId::Thm17 => {
            let scan = scan_split_inequality(cfg.inequality.split_points)?;
            checks.push(Check::finite("split inequality global C", scan.c_global));
            let c_case = records
                .iter()
                .filter_map(|r| r.components.get("c_case"))
                .fold(0.0f64, |m, c| m.max(*c));
            checks.push(Check::finite("case-split C", c_case));
            extras.insert("split_scan".into(), to_value(&scan));
            extras.insert("case_c_max".into(), json!(c_case));
        }
        InequalityId::Lemma31 => {
            let k = equivalence_constant(&records);
            checks.push(Check::finite("equivalence K", k));
            extras.insert("K".into(), json!(k));
        }
        InequalityId::Embed212 | InequalityId::Embed213 => {
            let a = cfg.grid.anisotropy();
            let q = a.homogeneous_dimension();
            let eta = cfg.eta();
            let two_m = 2.0 * cfg.inequality.m as f64;
            // s − Q/p = t − Q/r with (s, p) = (η, ∞), (t, r) = (2m, 2).
            let (lhs, rhs) = (eta, two_m - q / 2.0);
            checks.push(Check::at_most("scaling relation", (lhs - rhs).abs(), 1e-12, true));
            extras.insert(
                "scaling".into(),
                json!({"s": eta, "p": "inf", "t": two_m, "r": 2.0, "s_minus_Q_over_p": lhs, "t_minus_Q_over_r": rhs}),
            );
        }
        InequalityId::Thm14 => {
            let c = constant_box_record(&cfg, cfg.family.value)?;
            let bmo = c.components["bmo"];
            let bar = c.components["bar_bmo"];
            checks.push(Check::at_most("constant field: BMO part", bmo, 1e-13, false));
            checks.push(Check::flag("constant field: bar-BMO part > 0", bar > 0.0, false));
            extras.insert("constant_sample".into(), to_value(&c));
            let ratio = records
                .iter()
                .filter_map(|r| r.components.get("extension_ratio"))
                .fold(0.0f64, |m, c| m.max(*c));
            extras.insert("extension_ratio_max".into(), json!(ratio));
        }
        _ => {}
    }

    if sweeps && id != InequalityId::Mt2ato && id != InequalityId::Lemma51 {
        let tracked = tracked_constant(id, &records)?;
        let mut fine = cfg.clone();
        fine.grid = cfg.grid.refined(2);
        let fine_records = evaluate_family(&fine)?;
        let drift = Drift::new(tracked, tracked_constant(id, &fine_records)?);
        checks.push(Check::at_most("resolution drift", drift.relative, tol.resolution_drift, false));
        if id == InequalityId::Thm14 {
            let ratio = |rs: &[Record]| rs.iter().filter_map(|r| r.components.get("extension_ratio")).fold(0.0f64, |m, c| m.max(*c));
            let ext = Drift::new(ratio(&records), ratio(&fine_records));
            checks.push(Check::at_most("extension ratio drift", ext.relative, tol.resolution_drift, false));
            extras.insert("extension_ratio_refinement".into(), to_value(&ext));
        }
        extras.insert("resolution".into(), to_value(&drift));

        if matches!(id, InequalityId::Thm11 | InequalityId::EqIm) {
            let dil = dilation_sweep(&cfg)?;
            checks.push(Check::at_most("dilation drift factor", dil.factor, tol.dilation_factor, false));
            extras.insert("dilation".into(), to_value(&dil));
        }
        if id != InequalityId::Lemma31 {
            let worst = holdout_constant(&cfg)?;
            checks.push(Check::at_most("held-out family", worst, tol.holdout_margin * summary.c_max, false));
            extras.insert("holdout_c_max".into(), json!(worst));
        }
    }

    let grid_meta = if id == InequalityId::Thm14 {
        let g = omega_grid(&cfg.grid)?;
        GridMeta {
            dims: g.dims().to_vec(),
            lengths: g.domain().lengths(),
            anisotropy: g.anisotropy().weights().to_vec(),
        }
    } else {
        let g = cfg.grid.build()?;
        GridMeta {
            dims: g.dims().to_vec(),
            lengths: g.domain().lengths(),
            anisotropy: g.anisotropy().weights().to_vec(),
        }
    };
    Ok(InequalityReport {
        schema_version: SCHEMA_VERSION,
        id,
        config_echo: to_value(&cfg),
        grid: grid_meta,
        seed: cfg.family.seed,
        per_sample: records,
        summary,
        extras,
        checks,
        runtime: Runtime {
            seconds: start.elapsed().as_secs_f64(),
            threads: rayon::current_num_threads(),
        },
    })
}
