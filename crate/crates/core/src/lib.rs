//! Barnes multiple zeta function ζ_r(s, a, w) for positive real weights.
//!
//! The crate evaluates ζ_r by its defining series and by the truncation
//! formula with inclusion–exclusion boundary corrections, computes the
//! diagonal constant ζ̃_r(σ, a, w) that governs the mean square on vertical
//! lines, and checks the mean-square asymptotics numerically.
//!
//! ```
//! use barnes_zeta::{eval_auto, validate_params, EvalConfig};
//! use num_complex::Complex64;
//!
//! let p = validate_params(1.0, &[1.0]).unwrap();
//! let z = eval_auto(&p, Complex64::new(2.0, 0.0), 1e-12, &EvalConfig::default()).unwrap();
//! assert!((z.value.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-11);
//! ```

// `!(x > bound)` also rejects NaN, which is the point of those checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod meansquare;
pub mod oracle;
pub mod params;
pub mod summation;
pub mod tilde;

pub use error::{Error, Result};
pub use eval::{
    boundary_correction, boundary_identity_check, em_block_sum, eval_approx, eval_auto,
    eval_direct, eval_em, eval_shell, plan_auto, AutoPlan, BlockSum, BoxRange, ComplexValue,
    ErrKind, EvalConfig, EvalResult, Method,
};
pub use meansquare::{
    fit_residual_exponent, integrate_mean_square, verify_mean_square, Checkpoint, MeanSquareConfig,
    MeanSquareTrace, Regime, ResidualFit, VerificationReport,
};
pub use num_complex::Complex64;
pub use params::{
    analyze_weights, denumerant, parse_weight_list, validate_params, BarnesParams, DeclaredMode,
    WeightLiteral, WeightStructure,
};
pub use tilde::{tilde_zeta, TildePath, TildeResult};
