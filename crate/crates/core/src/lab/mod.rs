//! Function families, per-inequality evaluation, constant fitting and
//! refinement / dilation sweeps.

mod config;
mod cut;
mod evaluate;
mod family;
mod pipeline;
mod report;
mod run;

pub use config::{AnisotropyKind, GridConfig, InequalityConfig, LabConfig, Tolerances};
pub use cut::{
    c_gamma, check_split_inequality, optimize_dyadic_cut, optimize_dyadic_cut_values, scan_split_inequality,
    split_scan_axes, step1_bound, DyadicCut, SplitCheck, SplitScan,
};
pub use evaluate::{case_split_theorem17, case_split_values, check_smoothness, eval_sample, log_plus, CaseSplit, Context};
pub use family::{
    generate, generate_box, half_space_modes, BoxSample, FamilyConfig, FamilyKind, ModeSum, Sample, SampleDiagnostics,
};
pub use pipeline::{eval_bounded, omega_grid, run_bounded_pipeline, BoundedPipeline};
pub use report::{
    fit_constant, minimal_constant, Check, GridMeta, InequalityId, InequalityReport, Record, Runtime, Summary,
    SCHEMA_VERSION,
};
pub use run::{
    constant_box_record, dilation_sweep, equivalence_constant, evaluate_family, holdout_constant, resolution_sweep, run,
    synthetic_cut_agreement, tracked_constant, CutAgreement, DilationSweep, Drift,
};
