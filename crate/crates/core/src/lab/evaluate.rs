use std::cell::OnceCell;
use std::sync::Arc;

use super::config::LabConfig;
use super::cut::{c_gamma, cut_norms, decompose_mean_free, optimize_dyadic_cut_values, step1_bound};
use super::family::Sample;
use super::report::{InequalityId, Record};
use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::geometry::{Anisotropy, SamplerPolicy};
use crate::lp::{build_symbol_bank, lp_decompose, BankMode, CutoffProfile, LpDecomposition};
use crate::norms::{
    besov_of, block_sum_sup, norm_bmo, norm_homogeneous_hs, norm_linf, norm_lp, norm_sobolev_parabolic,
    triebel_infty_q_of,
};

/// `max(log x, 0)`, with `log⁺ 0 = 0`.
pub fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Parameters shared by the per-sample evaluators.
#[derive(Debug, Clone)]
pub struct Context {
    pub m: usize,
    pub gamma: f64,
    pub sampler: SamplerPolicy,
    pub step1_gammas: Vec<f64>,
    pub step1_n_max: u32,
    pub cut_n_max: u32,
}

impl Context {
    pub fn from_config(c: &LabConfig) -> Self {
        Self {
            m: c.inequality.m,
            gamma: c.inequality.gamma,
            sampler: c.sampler.clone(),
            step1_gammas: c.inequality.step1_gammas.clone(),
            step1_n_max: c.inequality.step1_n_max,
            cut_n_max: c.inequality.cut_n_max,
        }
    }
}

/// `2m > Q/2`, the standing smoothness hypothesis.
pub fn check_smoothness(m: usize, a: &Anisotropy) -> Result<f64> {
    let eta = 2.0 * m as f64 - 0.5 * a.homogeneous_dimension();
    if eta <= 0.0 {
        return Err(PlpError::Hypothesis(format!(
            "2m > (n+2)/2 fails: m = {m}, homogeneous dimension {}",
            a.homogeneous_dimension()
        )));
    }
    Ok(eta)
}

/// Lazily computed norms of one sample; vector quantities reduce by the
/// max over components except the Sobolev norm, which combines components
/// in `ℓ²`.
struct Cache<'a> {
    s: &'a Sample,
    ctx: &'a Context,
    linf_f: OnceCell<f64>,
    bmo_f: OnceCell<Vec<f64>>,
    w_f: OnceCell<Vec<f64>>,
    linf_g: OnceCell<f64>,
    hom: OnceCell<Vec<LpDecomposition>>,
    inh: OnceCell<Vec<LpDecomposition>>,
}

impl<'a> Cache<'a> {
    fn new(s: &'a Sample, ctx: &'a Context) -> Self {
        Self {
            s,
            ctx,
            linf_f: OnceCell::new(),
            bmo_f: OnceCell::new(),
            w_f: OnceCell::new(),
            linf_g: OnceCell::new(),
            hom: OnceCell::new(),
            inh: OnceCell::new(),
        }
    }

    fn comps(&self) -> &[Field] {
        self.s.f.components()
    }

    fn linf_f(&self) -> f64 {
        *self
            .linf_f
            .get_or_init(|| self.comps().iter().map(norm_linf).fold(0.0, f64::max))
    }

    fn bmo_each(&self) -> Result<&Vec<f64>> {
        if self.bmo_f.get().is_none() {
            let v = self
                .comps()
                .iter()
                .map(|c| Ok(norm_bmo(c, &self.ctx.sampler)?.value))
                .collect::<Result<Vec<_>>>()?;
            let _ = self.bmo_f.set(v);
        }
        Ok(self.bmo_f.get().expect("set above"))
    }

    fn bmo_f(&self) -> Result<f64> {
        Ok(self.bmo_each()?.iter().copied().fold(0.0, f64::max))
    }

    fn w_each(&self) -> Result<&Vec<f64>> {
        if self.w_f.get().is_none() {
            let v = self
                .comps()
                .iter()
                .map(|c| norm_sobolev_parabolic(c, self.ctx.m))
                .collect::<Result<Vec<_>>>()?;
            let _ = self.w_f.set(v);
        }
        Ok(self.w_f.get().expect("set above"))
    }

    fn w_f(&self) -> Result<f64> {
        Ok(self.w_each()?.iter().map(|w| w * w).sum::<f64>().sqrt())
    }

    fn linf_g(&self) -> f64 {
        *self.linf_g.get_or_init(|| norm_linf(&self.s.g))
    }

    fn hom(&self) -> Result<&Vec<LpDecomposition>> {
        if self.hom.get().is_none() {
            let v = self
                .comps()
                .iter()
                .map(decompose_mean_free)
                .collect::<Result<Vec<_>>>()?;
            let _ = self.hom.set(v);
        }
        Ok(self.hom.get().expect("set above"))
    }

    fn inh(&self) -> Result<&Vec<LpDecomposition>> {
        if self.inh.get().is_none() {
            let v = self
                .comps()
                .iter()
                .map(|c| {
                    let bank = build_symbol_bank(c.grid_arc().clone(), CutoffProfile::default(), BankMode::Inhomogeneous)?;
                    lp_decompose(c, &bank)
                })
                .collect::<Result<Vec<_>>>()?;
            let _ = self.inh.set(v);
        }
        Ok(self.inh.get().expect("set above"))
    }
}

/// Per-component records reduce to the worst (largest `c_sample`) one.
fn worst(records: Vec<Record>) -> Option<Record> {
    records.into_iter().fold(None, |best: Option<Record>, r| match best {
        Some(b) if b.c_sample >= r.c_sample => Some(b),
        _ => Some(r),
    })
}

fn zero_record(label: &str) -> Record {
    Record::new(label, 0.0, 1.0)
}

/// Evaluates inequality `id` on one periodic sample.
pub fn eval_sample(id: InequalityId, s: &Sample, ctx: &Context) -> Result<Record> {
    let c = Cache::new(s, ctx);
    let grid = s.g.grid();
    let a = grid.anisotropy();
    let label = s.label.as_str();
    Ok(match id {
        InequalityId::Thm11 => {
            check_smoothness(ctx.m, a)?;
            let (bmo, w, gi) = (c.bmo_f()?, c.w_f()?, c.linf_g());
            let sqrt_log = log_plus(w + gi).sqrt();
            Record::new(label, c.linf_f(), 1.0 + bmo * sqrt_log)
                .with("bmo", bmo)
                .with("sobolev", w)
                .with("g_linf", gi)
                .with("log_argument", w + gi)
                .with("sqrt_log", sqrt_log)
        }
        InequalityId::EqIm => {
            check_smoothness(ctx.m, a)?;
            let (bmo, w) = (c.bmo_f()?, c.w_f()?);
            Record::new(label, c.linf_f(), 1.0 + bmo * (1.0 + log_plus(w)))
                .with("bmo", bmo)
                .with("sobolev", w)
                .with("log_factor", 1.0 + log_plus(w))
        }
        InequalityId::Thm17 => theorem17(label, &c)?,
        InequalityId::Lemma31 => {
            let mut ratios = Vec::new();
            let mut recs = Vec::new();
            for (d, bmo) in c.hom()?.iter().zip(c.bmo_each()?) {
                let f2 = triebel_infty_q_of(d, 2.0)?;
                if f2.value > 0.0 {
                    ratios.push(bmo / f2.value);
                    recs.push(
                        Record::new(label, *bmo, f2.value)
                            .with("bmo", *bmo)
                            .with("triebel_inf_2", f2.value)
                            .with("truncated_tail", f2.truncated_tail),
                    );
                }
            }
            match worst(recs) {
                None => zero_record(label),
                Some(r) => {
                    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = ratios.iter().copied().fold(0.0, f64::max);
                    r.with("ratio_min", lo).with("ratio_max", hi)
                }
            }
        }
        InequalityId::Lemma32 => {
            let mut recs = Vec::new();
            for (comp, d) in c.comps().iter().zip(c.hom()?) {
                let (lo, hi) = d.j_range();
                let f01 = block_sum_sup(d, lo..=hi, 1.0);
                let f2 = triebel_infty_q_of(d, 2.0)?.value;
                let (s_norm, f2_point) = cut_norms(d, ctx.gamma)?;
                let rhs = 1.0 + f2 * log_plus(s_norm).sqrt();
                let mut r = Record::new(label, f01, rhs)
                    .with("triebel_inf_2", f2)
                    .with("triebel_inf_2_pointwise", f2_point)
                    .with("f_plus_minus", s_norm);
                if comp.mean().abs() <= 1e-12 * comp.max_abs().max(1e-300) {
                    r = r.with("linf", norm_linf(comp));
                }
                if f2_point > 0.0 {
                    let cut = optimize_dyadic_cut_values(s_norm, f2_point, ctx.gamma, ctx.cut_n_max)?;
                    r = r
                        .with("cut_analytic_n", f64::from(cut.analytic_n))
                        .with("cut_brute_n", f64::from(cut.brute_n))
                        .with("cut_agrees", f64::from(u8::from(cut.agrees)));
                }
                recs.push(r);
            }
            worst(recs).unwrap_or_else(|| zero_record(label))
        }
        InequalityId::Mt2ato => {
            let mut recs = Vec::new();
            for d in c.hom()? {
                let (lo, hi) = d.j_range();
                let f01 = block_sum_sup(d, lo..=hi, 1.0);
                let mut tightest = f64::INFINITY;
                let mut at = (0.0, 0);
                for &gamma in &ctx.step1_gammas {
                    let (s_norm, f2) = cut_norms(d, gamma)?;
                    for n in 1..=ctx.step1_n_max {
                        let b = step1_bound(n, gamma, s_norm, f2);
                        if b < tightest {
                            tightest = b;
                            at = (gamma, n);
                        }
                    }
                }
                recs.push(
                    Record::new(label, f01, tightest)
                        .with("gamma", at.0)
                        .with("n", f64::from(at.1))
                        .with("c_gamma", c_gamma(at.0)),
                );
            }
            worst(recs).unwrap_or_else(|| zero_record(label))
        }
        InequalityId::Lemma51 => {
            let sdim = 0.5 * (grid.ndim() as f64);
            let hs = norm_homogeneous_hs(&s.g, sdim)?;
            let w = c.w_f()?;
            Record::new(label, hs, w).with("s", sdim).with("sobolev", w)
        }
        InequalityId::Lemma52 => {
            let (w, gi) = (c.w_f()?, c.linf_g());
            let rhs = if w > 0.0 {
                1.0 + w * (std::f64::consts::E + (w + gi) / w).ln().sqrt()
            } else {
                1.0
            };
            Record::new(label, gi, rhs).with("sobolev", w).with("g_linf", gi)
        }
        InequalityId::Embed212 | InequalityId::Embed213 => {
            let eta = check_smoothness(ctx.m, a)?;
            let two_m = 2.0 * ctx.m as f64;
            let mut recs = Vec::new();
            for (i, d) in c.inh()?.iter().enumerate() {
                let top = besov_of(d, eta, f64::INFINITY, f64::INFINITY)?;
                let (rhs, name) = if id == InequalityId::Embed212 {
                    (besov_of(d, two_m, 2.0, f64::INFINITY)?, "besov_2m_2_inf")
                } else {
                    (c.w_each()?[i], "sobolev")
                };
                recs.push(Record::new(label, top, rhs).with("besov_eta_inf_inf", top).with(name, rhs).with("eta", eta));
            }
            worst(recs).unwrap_or_else(|| zero_record(label))
        }
        InequalityId::Bernstein => bernstein(label, &s.g)?,
        InequalityId::Thm14 => {
            return Err(PlpError::config("thm1.4 runs on closed-box samples; use the bounded-domain pipeline"))
        }
    })
}

fn theorem17(label: &str, c: &Cache<'_>) -> Result<Record> {
    let grid = c.s.g.grid();
    let n = grid.ndim() - 1;
    if !(1..=3).contains(&n) {
        return Err(PlpError::Hypothesis(format!("n ∈ {{1,2,3}} fails: n = {n}")));
    }
    if 4 * c.ctx.m <= n + 2 {
        return Err(PlpError::Hypothesis(format!("2m > (n+2)/2 fails: m = {}, n = {n}", c.ctx.m)));
    }
    let l2 = norm_lp(&c.s.g, 2.0)?;
    if l2 > 1.0 + 1e-12 {
        return Err(PlpError::Hypothesis(format!("‖g‖_L² ≤ 1 fails: ‖g‖_L² = {l2}")));
    }
    let cs = case_split_values(c.w_f()?, c.linf_g());
    Ok(Record::new(label, cs.lhs, cs.rhs_shape)
        .with("sobolev", cs.sobolev)
        .with("g_linf", cs.g_linf)
        .with("g_l2", l2)
        .with("case", f64::from(cs.case))
        .with(if cs.case == 1 { "A" } else { "B" }, cs.x)
        .with("c_case", cs.c_case))
}

/// The case split on `(‖f‖_W, ‖g‖_{L∞})`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CaseSplit {
    pub sobolev: f64,
    pub g_linf: f64,
    /// 1 when `‖f‖_W ≤ 1` (`X = A = ‖g‖_{L∞}`), 2 otherwise
    /// (`X = B = ‖g‖_{L∞}/‖f‖_W`).
    pub case: u8,
    pub x: f64,
    /// Least `C` with `X ≤ C(1 + (log(e + 1 + X))^{1/2})`.
    pub c_case: f64,
    /// `(log⁺(‖f‖_W + ‖g‖_{L∞}))^{1/2}`.
    pub lhs: f64,
    /// `1 + log⁺‖f‖_W`.
    pub rhs_shape: f64,
    pub c_sample: f64,
}

pub fn case_split_values(sobolev: f64, g_linf: f64) -> CaseSplit {
    let (case, x) = if sobolev <= 1.0 { (1, g_linf) } else { (2, g_linf / sobolev) };
    let c_case = x / (1.0 + (std::f64::consts::E + 1.0 + x).ln().sqrt());
    let lhs = log_plus(sobolev + g_linf).sqrt();
    let rhs_shape = 1.0 + log_plus(sobolev);
    CaseSplit {
        sobolev,
        g_linf,
        case,
        x,
        c_case,
        lhs,
        rhs_shape,
        c_sample: super::report::minimal_constant(lhs, rhs_shape),
    }
}

/// Case split for a sample, hypotheses included.
pub fn case_split_theorem17(s: &Sample, m: usize) -> Result<CaseSplit> {
    let ctx = Context {
        m,
        gamma: 0.25,
        sampler: SamplerPolicy::default(),
        step1_gammas: Vec::new(),
        step1_n_max: 1,
        cut_n_max: 1,
    };
    let c = Cache::new(s, &ctx);
    theorem17(&s.label, &c)?;
    Ok(case_split_values(c.w_f()?, c.linf_g()))
}

/// Worst `‖φ_j * g‖_{L∞} / (2^{sj}‖φ_j * g‖_{L²})`, `s = (n+1)/2`, over the
/// isotropic blocks of `g`.
fn bernstein(label: &str, g: &Field) -> Result<Record> {
    let grid = g.grid();
    let iso = Arc::new(grid.with_anisotropy(Anisotropy::isotropic(grid.ndim() - 1))?);
    let gi = g.on_grid(iso.clone())?;
    let bank = build_symbol_bank(iso, CutoffProfile::default(), BankMode::Homogeneous)?;
    let d = lp_decompose(&gi, &bank)?;
    let s = 0.5 * grid.ndim() as f64;
    let mut best = zero_record(label);
    for (j, b) in d.blocks() {
        let l2 = norm_lp(b, 2.0)?;
        if l2 <= 1e-14 * gi.max_abs().max(f64::MIN_POSITIVE) {
            continue;
        }
        let r = Record::new(label, norm_linf(b), 2f64.powf(s * f64::from(j)) * l2)
            .with("j", f64::from(j))
            .with("block_l2", l2);
        if r.c_sample > best.c_sample {
            best = r;
        }
    }
    Ok(best)
}
