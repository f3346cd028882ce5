use std::path::{Path, PathBuf};
use std::sync::Arc;

use parabolic_lp::boxfield::{BoxField, BoxGrid};
use parabolic_lp::error::{PlpError, Result};
use parabolic_lp::field::Field;
use parabolic_lp::geometry::AxisBox;
use parabolic_lp::io::{read_field, write_field, Encoding, FieldData};
use parabolic_lp::lab::{
    dilation_sweep, generate, generate_box, omega_grid, resolution_sweep, run, AnisotropyKind, InequalityId,
    InequalityReport, LabConfig,
};
use parabolic_lp::lp::{build_symbol_bank, lp_decompose, BankMode, CutoffProfile};
use parabolic_lp::norms::{
    box_norm_bmo, box_norm_lp, box_norm_sobolev_parabolic, evaluate, exponent, norm_bar_bmo, EvalOptions, NormSpec,
};
use serde_json::{json, Value};

use crate::args::{Aniso, DecomposeArgs, Emit, ExtendArgs, Format, Global, Mode, NormArgs, NormName, Source, SweepArgs, SweepKind, VerifyArgs};

/// Outcome of a subcommand: the document to print or write, and whether
/// its checks passed.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, passed: true }
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(['x', 'X', ','])
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| PlpError::Config(format!("bad {what} {text:?}")))
        })
        .collect()
}

/// The configuration file (or defaults) with the global flags applied.
pub fn load_config(g: &Global) -> Result<LabConfig> {
    let mut cfg = match &g.config {
        Some(path) => LabConfig::load(path)?,
        None => LabConfig::default(),
    };
    if let Some(grid) = &g.grid {
        cfg.grid.dims = parse_list(grid, "grid")?;
        if cfg.family.mode.len() != cfg.grid.dims.len() {
            cfg.family.mode = vec![1; cfg.grid.dims.len()];
        }
    }
    if let Some(b) = &g.box_lengths {
        let mut l: Vec<f64> = parse_list(b, "box")?;
        if l.len() == 1 {
            l = vec![l[0]; cfg.grid.dims.len()];
        }
        cfg.grid.lengths = Some(l);
    }
    if let Some(a) = g.aniso {
        cfg.grid.anisotropy = match a {
            Aniso::Parabolic => AnisotropyKind::Parabolic,
            Aniso::Isotropic => AnisotropyKind::Isotropic,
        };
    }
    if let Some(seed) = g.seed {
        cfg.family.seed = seed;
    }
    Ok(cfg)
}

fn encoding(g: &Global) -> Encoding {
    match g.format {
        Format::Json => Encoding::F64Le,
        Format::Csv => Encoding::Csv,
    }
}

fn periodic_source(src: &Source, cfg: &LabConfig) -> Result<Field> {
    if let Some(path) = &src.input {
        return read_field(path)?.into_periodic();
    }
    let mut family = cfg.family.clone();
    family.count = src.sample + 1;
    let sample = generate(&family, &cfg.grid.build()?)?.swap_remove(src.sample);
    if src.component == "g" {
        return Ok(sample.g);
    }
    let i: usize = src
        .component
        .parse()
        .map_err(|_| PlpError::Config(format!("component must be `g` or an axis index, got {:?}", src.component)))?;
    sample
        .f
        .components()
        .get(i)
        .cloned()
        .ok_or_else(|| PlpError::Config(format!("no gradient component {i}")))
}

/// `Ω_T` from `--box` (`1x…xT`) or the configured horizon, with `--grid`
/// read as samples per axis.
fn omega_from_flags(g: &Global, cfg: &LabConfig) -> Result<Arc<BoxGrid>> {
    let n = cfg.grid.spatial_dim();
    let horizon = match &g.box_lengths {
        Some(text) => {
            let l: Vec<f64> = parse_list(text, "box")?;
            if l.len() != n + 1 || l[..n].iter().any(|x| *x != 1.0) {
                return Err(PlpError::Config(format!(
                    "closed boxes are Ω_T = [0,1]^n × [0,T]; give --box 1x…x1xT with {} values",
                    n + 1
                )));
            }
            l[n]
        }
        None => cfg.grid.horizon,
    };
    if g.grid.is_some() {
        return Ok(Arc::new(BoxGrid::new(
            cfg.grid.dims.clone(),
            AxisBox::omega_t(n, horizon)?,
            cfg.grid.anisotropy(),
        )?));
    }
    let mut gc = cfg.grid.clone();
    gc.horizon = horizon;
    omega_grid(&gc)
}

fn closed_source(src: &Source, g: &Global, cfg: &LabConfig) -> Result<BoxField> {
    if let Some(path) = &src.input {
        return read_field(path)?.into_closed();
    }
    let grid = omega_from_flags(g, cfg)?;
    let lengths: Vec<f64> = grid.domain().lengths().iter().map(|l| 2.0 * l).collect();
    let mut family = cfg.family.clone();
    family.count = src.sample + 1;
    Ok(generate_box(&family, &grid, &lengths)?.swap_remove(src.sample).f)
}

fn norm_spec(a: &NormArgs) -> Result<NormSpec> {
    if let Some(text) = &a.spec {
        return serde_json::from_str(text).map_err(|e| PlpError::Config(format!("bad norm spec: {e}")));
    }
    let p = exponent::parse(&a.p).map_err(PlpError::Config)?;
    let q = exponent::parse(&a.q).map_err(PlpError::Config)?;
    let mode = match a.mode {
        Mode::Homogeneous => BankMode::Homogeneous,
        Mode::Inhomogeneous => BankMode::Inhomogeneous,
    };
    Ok(match a.norm.unwrap_or(NormName::Linf) {
        NormName::Lp => NormSpec::Lp { p },
        NormName::Linf => NormSpec::Linf,
        NormName::Sobolev => NormSpec::SobolevParabolic { m: a.m },
        NormName::Bmo => NormSpec::Bmo,
        NormName::BarBmo => return Err(PlpError::Config("bar-bmo is defined on closed-box fields only".into())),
        NormName::Besov => NormSpec::Besov { s: a.s, p, q, mode },
        NormName::Triebel => NormSpec::Triebel { s: a.s, p, q },
        NormName::TriebelInfty => NormSpec::TriebelInftyQ { q },
        NormName::Fplus => NormSpec::FPlus { s: a.s, q },
        NormName::Fminus => NormSpec::FMinus { s: a.s, q },
        NormName::Hs => NormSpec::HomogeneousHs { s: a.s },
        NormName::Holder => NormSpec::HolderSemi { gamma: a.gamma },
    })
}

fn closed_norm(a: &NormArgs, f: &BoxField, cfg: &LabConfig) -> Result<Value> {
    let (value, diagnostics) = match a.norm.unwrap_or(NormName::Linf) {
        NormName::Linf => (f.max_abs(), json!({})),
        NormName::Lp => (box_norm_lp(f, exponent::parse(&a.p).map_err(PlpError::Config)?)?, json!({})),
        NormName::Sobolev => (box_norm_sobolev_parabolic(f, a.m)?, json!({"m": a.m})),
        NormName::Bmo => {
            let r = box_norm_bmo(f, &cfg.sampler)?;
            (r.value, json!({"cubes": r.cubes, "skipped": r.skipped}))
        }
        NormName::BarBmo => {
            let r = norm_bar_bmo(f, &cfg.sampler)?;
            (r.value, json!({"bmo": r.bmo.value, "l1": r.l1, "cubes": r.bmo.cubes}))
        }
        other => {
            return Err(PlpError::Config(format!(
                "{other:?} is not available on closed-box fields (use linf, lp, sobolev, bmo or bar-bmo)"
            )))
        }
    };
    Ok(json!({"value": value, "diagnostics": diagnostics}))
}

pub fn norm(a: &NormArgs, g: &Global) -> Result<Outcome> {
    let cfg = load_config(g)?;
    let doc = match &a.source.input {
        Some(path) => match read_field(path)? {
            FieldData::Closed(f) => closed_norm(a, &f, &cfg)?,
            FieldData::Periodic(f) => periodic_norm(a, &f, &cfg)?,
        },
        None => periodic_norm(a, &periodic_source(&a.source, &cfg)?, &cfg)?,
    };
    Ok(Outcome::ok(match g.format {
        Format::Json => serde_json::to_string_pretty(&doc)?,
        Format::Csv => format!("value\n{:?}\n", doc["value"].as_f64().unwrap_or(f64::NAN)),
    }))
}

fn periodic_norm(a: &NormArgs, f: &Field, cfg: &LabConfig) -> Result<Value> {
    let opts = EvalOptions {
        sampler: cfg.sampler.clone(),
        holder_budget: cfg.inequality.holder_budget,
        seed: cfg.family.seed,
    };
    let v = evaluate(&norm_spec(a)?, f, &opts)?;
    Ok(serde_json::to_value(v)?)
}

pub fn decompose(a: &DecomposeArgs, g: &Global) -> Result<Outcome> {
    let cfg = load_config(g)?;
    let dir = g
        .out
        .clone()
        .ok_or_else(|| PlpError::Config("decompose needs --out <directory>".into()))?;
    std::fs::create_dir_all(&dir)?;
    let f = periodic_source(&a.source, &cfg)?;
    let mode = match a.mode {
        Mode::Homogeneous => BankMode::Homogeneous,
        Mode::Inhomogeneous => BankMode::Inhomogeneous,
    };
    let bank = build_symbol_bank(f.grid_arc().clone(), CutoffProfile::default(), mode)?;
    let d = lp_decompose(&f, &bank)?;
    let enc = encoding(g);
    let mut files = Vec::new();
    for (j, block) in d.blocks() {
        let header = dir.join(format!("block_{j}.json"));
        write_field(&header, &FieldData::Periodic(block.clone()), enc)?;
        files.push(json!({"j": j, "header": header, "linf": block.max_abs()}));
    }
    let residual = dir.join("residual.json");
    write_field(&residual, &FieldData::Periodic(d.residual().clone()), enc)?;
    let doc = json!({
        "mode": mode,
        "j_range": d.j_range(),
        "dc": d.dc(),
        "blocks": files,
        "residual": {"header": residual, "linf": d.residual().max_abs()},
        "partition_residual": bank.partition_residual(),
    });
    Ok(Outcome::ok(serde_json::to_string_pretty(&doc)?))
}

pub fn extend(a: &ExtendArgs, g: &Global) -> Result<Outcome> {
    let cfg = load_config(g)?;
    let f = closed_source(&a.source, g, &cfg)?;
    let m = a.m.unwrap_or(cfg.inequality.m);
    let p = parabolic_lp::lab::run_bounded_pipeline(&f, m, a.axis)?;
    let coeffs = |c: &parabolic_lp::extension::ExtensionCoefficients| {
        json!({
            "order": c.order,
            "lambdas": c.lambdas,
            "coefficients": c.cs,
            "coefficients_lo": c.cs_lo,
            "moment_residual": c.residual,
            "rounded_moment_residual": c.rounded_residual,
            "condition": c.condition,
        })
    };
    let mut doc = json!({
        "m": m,
        "spatial": coeffs(&p.extension.spatial),
        "temporal": coeffs(&p.extension.temporal),
        "sobolev": p.sobolev,
        "sobolev_extended": p.sobolev_extended,
        "sobolev_ratio": p.sobolev_ratio(),
        "localize": p.localized.diagnostics,
        "emit": format!("{:?}", a.emit).to_lowercase(),
    });
    if let Some(out) = &g.out {
        let data: FieldData = match a.emit {
            Emit::Extended => p.extension.field.clone().into(),
            Emit::Localized => p.localized.product.clone().into(),
            Emit::Antiderivative => p.localized.g.clone().into(),
        };
        let path = write_field(out, &data, encoding(g))?;
        doc["output"] = json!({"header": out, "data": path});
    }
    Ok(Outcome::ok(serde_json::to_string_pretty(&doc)?))
}

fn ids(text: &str) -> Result<Vec<InequalityId>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(InequalityId::ALL.to_vec());
    }
    Ok(vec![text.parse::<InequalityId>()?])
}

fn summary_line(r: &InequalityReport) -> String {
    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    format!(
        "{:<10} {} C_max={:.6e} C_median={:.6e} n={} ({:.1}s){}",
        r.id.name(),
        if r.passed() { "PASS" } else { "FAIL" },
        r.summary.c_max,
        r.summary.c_median,
        r.summary.count,
        r.runtime.seconds,
        if failed.is_empty() { String::new() } else { format!(" failed: {}", failed.join("; ")) }
    )
}

pub fn verify(a: &VerifyArgs, g: &Global) -> Result<Outcome> {
    let base = load_config(g)?;
    let mut reports = Vec::new();
    for id in ids(&a.id)? {
        let mut cfg = base.with_id(id);
        if let Some(c) = a.count {
            cfg.family.count = c;
        }
        if a.no_sweeps {
            cfg.inequality.sweeps = false;
        }
        let r = run(&cfg)?;
        eprintln!("{}", summary_line(&r));
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed());
    let body = match g.format {
        Format::Json if reports.len() == 1 => serde_json::to_string_pretty(&reports[0])?,
        Format::Json => serde_json::to_string_pretty(&reports)?,
        Format::Csv if reports.len() == 1 => reports[0].to_csv(),
        Format::Csv => {
            let mut s = String::from("id,count,C_max,C_median,passed\n");
            for r in &reports {
                s.push_str(&format!(
                    "{},{},{:?},{:?},{}\n",
                    r.id.name(),
                    r.summary.count,
                    r.summary.c_max,
                    r.summary.c_median,
                    r.passed()
                ));
            }
            s
        }
    };
    Ok(Outcome { body, passed })
}

pub fn sweep(a: &SweepArgs, g: &Global) -> Result<Outcome> {
    let mut cfg = load_config(g)?;
    if let Some(id) = &a.id {
        cfg.inequality.id = id.parse::<InequalityId>()?;
    }
    if let Some(c) = a.count {
        cfg.family.count = c;
        cfg.inequality.dilation_count = c;
    }
    let tol = cfg.tolerances.clone();
    let (doc, passed) = match a.kind {
        SweepKind::Resolution => {
            if a.factor < 2 {
                return Err(PlpError::Config("refinement factor must be at least 2".into()));
            }
            let d = resolution_sweep(&cfg, a.factor)?;
            let passed = d.relative <= tol.resolution_drift;
            (json!({"kind": "resolution", "id": cfg.inequality.id, "factor": a.factor, "drift": d, "threshold": tol.resolution_drift}), passed)
        }
        SweepKind::Dilation => {
            let d = dilation_sweep(&cfg)?;
            let passed = d.factor <= tol.dilation_factor;
            (json!({"kind": "dilation", "id": cfg.inequality.id, "sweep": d, "threshold": tol.dilation_factor}), passed)
        }
    };
    let body = match g.format {
        Format::Json => serde_json::to_string_pretty(&doc)?,
        Format::Csv => match a.kind {
            SweepKind::Resolution => format!(
                "base,other,relative\n{},{},{}\n",
                doc["drift"]["base"], doc["drift"]["other"], doc["drift"]["relative"]
            ),
            SweepKind::Dilation => {
                let mut s = String::from("mu,C_max,C_median\n");
                for e in doc["sweep"]["per_mu"].as_array().into_iter().flatten() {
                    s.push_str(&format!("{},{},{}\n", e[0], e[1]["C_max"], e[1]["C_median"]));
                }
                s
            }
        },
    };
    Ok(Outcome { body, passed })
}

/// Writes `body` to `out` (or stdout when absent). `decompose` and `extend`
/// use `--out` for field files and always print their summary.
pub fn emit(body: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, body)?;
            Ok(())
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            let text = if body.ends_with('\n') { body.to_string() } else { format!("{body}\n") };
            match out.write_all(text.as_bytes()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

pub fn report_path(g: &Global) -> Option<PathBuf> {
    g.out.clone()
}
