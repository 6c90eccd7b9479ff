//! Root, power and logarithm series for solutions of `Z(z) = 0`.
//!
//! Pick a trial value `v` near a root and let `V = Z(v)`. Viewing `v` as a
//! function of `V`, the root is that function's value at `V = 0`; its
//! Taylor expansion about the trial value gives an alternating series for
//! the root, and similar series for any power `z^n` and for `ln z`.
//!
//! Everything runs either in exact rational arithmetic or in binary
//! floating point of configurable precision; see [`scalar::Scalar`].

pub mod error;
pub mod euler;
pub mod expr;
pub mod jet;
pub mod oracle;
pub mod power_log;
pub mod scalar;

pub use error::{DomainErrorKind, Error, Result};
pub use euler::{
    assemble_root_series, coefficient_sequence_reversion, coefficient_sequence_symbolic,
    convergence_diagnostic, evaluate_truncated, refine_anchor, refine_anchor_trace, root_series, Anchor,
    CoefficientSequence, ConvergenceReport, DerivativeChain, SeriesApproximation, Verdict, DEFAULT_ORDER,
};
pub use expr::{evaluate, parse_expression, Differentiator, Expression};
pub use jet::{revert_series, taylor_expand, Jet};
pub use power_log::{
    assemble_power_series, closed_form_coefficients, exp_identity_residual, family_series_value, log_series,
    omega_series, power_coefficient_sequence, ClosedFormFamily, FamilyCoefficients, OmegaSeries,
    PowerCoefficientSequence,
};
pub use scalar::{NumericMode, Scalar, DEFAULT_PRECISION};
