//! Reflection extension from `Ω_T` to `Ω̃_T`, the plateau cutoff `Ψ`, and
//! the localized product `Ψf̃` with its antiderivative.

mod coefficients;
mod extend;
mod localize;
mod plateau;

pub use coefficients::{extension_coefficients, ExtensionCoefficients, MAX_ORDER};
pub use extend::{extend_along, extend_to_box, BoxExtension, ExtensionDiagnostics};
pub use localize::{embed_periodic, localize, LocalizeDiagnostics, Localized};
pub use plateau::{build_plateau_cutoff, build_plateau_cutoff_box, default_plateau_boxes, Plateau};
