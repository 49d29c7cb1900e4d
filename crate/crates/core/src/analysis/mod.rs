//! Exact solutions, interpolation, discrete norms and diagnostics.

pub mod diagnostics;
pub mod exact;
pub mod interpolation;
pub mod norms;

pub use diagnostics::{b_continuity_ratio, coercivity_probe, korn_constant, strain_kernel_dimension, CoercivityProbe};
pub use exact::{ExactFields, FieldFn, StressValue};
pub use interpolation::{interpolate, Interpolant};
pub use norms::{error_norm, NormKind};
