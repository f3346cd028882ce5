//! Anisotropic dyadic decomposition.

mod bank;
mod cutoff;
mod decompose;
mod kernel;

pub use bank::{build_symbol_bank, BankMode, DyadicSymbolBank};
pub use cutoff::{build_cutoff, CutoffProfile};
pub use decompose::{lp_decompose, LpDecomposition};
pub use kernel::{derivative_kernel_bank, majorant_radii, physical_kernel, radial_majorant, KernelBank, RadialMajorant};

pub(crate) use bank::frequency_norms as frequency_norms_of;
