use std::sync::Arc;

use super::evaluate::{check_smoothness, log_plus, Context};
use super::family::BoxSample;
use super::report::Record;
use crate::boxfield::BoxField;
use crate::error::Result;
use crate::extension::{
    build_plateau_cutoff, default_plateau_boxes, embed_periodic, extend_to_box, localize, BoxExtension, Localized,
};
use crate::field::Field;
use crate::norms::{box_norm_sobolev_parabolic, norm_bar_bmo, norm_bmo, norm_linf, norm_sobolev_parabolic};

/// Everything the bounded-domain pipeline produces for one field on `Ω_T`.
#[derive(Debug, Clone)]
pub struct BoundedPipeline {
    pub extension: BoxExtension,
    /// `f̃` on the periodic box around `Ω̃_T`, zero outside.
    pub f_tilde: Field,
    pub psi: Field,
    pub localized: Localized,
    /// `‖f‖_{W^{2m,m}_2(Ω_T)}`.
    pub sobolev: f64,
    /// `‖f̃‖_{W^{2m,m}_2(Ω̃_T)}`.
    pub sobolev_extended: f64,
}

impl BoundedPipeline {
    /// `‖f̃‖_W(Ω̃_T) / ‖f‖_W(Ω_T)`, zero for `f = 0`.
    pub fn sobolev_ratio(&self) -> f64 {
        if self.sobolev > 0.0 {
            self.sobolev_extended / self.sobolev
        } else {
            0.0
        }
    }
}

/// Extension, `Ψ`-localization and antiderivative along `axis`.
pub fn run_bounded_pipeline(f: &BoxField, m: usize, axis: usize) -> Result<BoundedPipeline> {
    let extension = extend_to_box(f, m)?;
    let f_tilde = embed_periodic(&extension.field)?;
    let n = f.grid().ndim() - 1;
    let horizon = f.grid().domain().length(n);
    let (z1, z2) = default_plateau_boxes(n, horizon)?;
    let psi = build_plateau_cutoff(&z1, &z2, f_tilde.grid_arc())?;
    let localized = localize(&f_tilde, &psi, axis)?;
    let sobolev = box_norm_sobolev_parabolic(f, m)?;
    let sobolev_extended = box_norm_sobolev_parabolic(&extension.field, m)?;
    Ok(BoundedPipeline {
        extension,
        f_tilde,
        psi,
        localized,
        sobolev,
        sobolev_extended,
    })
}

/// `‖f‖_{L∞(Ω_T)}` against `1 + ‖f‖_{\overline{BMO}}(log⁺‖f‖_W)^{1/2}`, with
/// the whole-space inequality on `(Ψf̃, g)` recorded alongside.
pub fn eval_bounded(sample: &BoxSample, ctx: &Context, axis: usize) -> Result<Record> {
    let f = &sample.f;
    check_smoothness(ctx.m, f.grid().anisotropy())?;
    let p = run_bounded_pipeline(f, ctx.m, axis)?;
    let bar = norm_bar_bmo(f, &ctx.sampler)?;
    let linf = f.max_abs();
    let rhs = 1.0 + bar.value * log_plus(p.sobolev).sqrt();

    let h = &p.localized.product;
    let g = &p.localized.g;
    let torus_bmo = norm_bmo(h, &ctx.sampler)?.value;
    let torus_w = norm_sobolev_parabolic(h, ctx.m)?;
    let torus_g = norm_linf(g);
    let torus_rhs = 1.0 + torus_bmo * log_plus(torus_w + torus_g).sqrt();
    let torus_c = super::report::minimal_constant(norm_linf(h), torus_rhs);

    Ok(Record::new(&sample.label, linf, rhs)
        .with("bar_bmo", bar.value)
        .with("bmo", bar.bmo.value)
        .with("l1", bar.l1)
        .with("sobolev", p.sobolev)
        .with("sobolev_extended", p.sobolev_extended)
        .with("extension_ratio", p.sobolev_ratio())
        .with("localized_linf", norm_linf(h))
        .with("localized_bmo", torus_bmo)
        .with("localized_sobolev", torus_w)
        .with("g_linf", torus_g)
        .with("localized_c", torus_c)
        .with("compensator_mass", p.localized.diagnostics.compensator_mass))
}

/// Closed-box grid for `Ω_T` from the lab grid configuration.
pub fn omega_grid(cfg: &super::config::GridConfig) -> Result<Arc<crate::boxfield::BoxGrid>> {
    let n = cfg.spatial_dim();
    let mut g = crate::boxfield::BoxGrid::omega_t(n, cfg.horizon, cfg.box_intervals)?;
    if cfg.anisotropy == super::config::AnisotropyKind::Isotropic {
        g = crate::boxfield::BoxGrid::new(g.dims().to_vec(), g.domain().clone(), cfg.anisotropy())?;
    }
    Ok(Arc::new(g))
}
