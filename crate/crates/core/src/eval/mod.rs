//! Evaluation of ζ_r(s, a, w) = Σ_{m ≥ 0} (a + m·w)^{-s} for positive real
//! weights.
//!
//! Three routes are available:
//!
//! * [`eval_direct`] sums the convergent series (σ > r) with every axis tail
//!   closed by Euler–Maclaurin summation, and reports a rigorous bound.
//!   [`eval_shell`] is the plain truncated series with the lattice-count tail
//!   bound; it is exact where affordable and serves as an independent route.
//! * [`eval_approx`] is the truncation formula: the box sum over
//!   `0 <= m_i <= x` plus the inclusion–exclusion boundary correction, with
//!   error `O(x^{r-1-σ})` for σ > r - 1.
//! * [`eval_auto`] dispatches between them.
//!
//! The building blocks of the truncation formula ([`em_block_sum`],
//! [`boundary_correction`], [`boundary_identity_check`]) are exposed for testing.

mod approx;
mod auto;
mod direct;
mod em;

pub use approx::{
    boundary_correction, boundary_identity_check, box_sum, em_block_sum, eval_approx, BlockSum,
    BoxRange,
};
pub use auto::{eval_auto, plan_auto, AutoPlan};
pub use direct::{eval_direct, eval_shell};
pub use em::eval_em;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Complex argument or value. Real and imaginary parts are always finite in
/// returned results.
pub type ComplexValue = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrKind {
    RigorousBound,
    HeuristicEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DirectSeries,
    ApproxFormula,
    /// Euler–Maclaurin summation used beyond the half-plane of absolute
    /// convergence (r - 1 < σ <= r, or large |t|).
    EulerMaclaurin,
}

/// Value of one evaluation together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: ComplexValue,
    pub err_estimate: f64,
    pub err_kind: ErrKind,
    pub method: Method,
    pub terms_used: u64,
}

/// Tunables shared by the evaluators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Maximum number of series terms (power evaluations) per evaluation.
    pub term_cap: f64,
    /// The constant `C > 1` in the admissibility condition `|t| <= 2πx/C`.
    pub trunc_c: f64,
    /// Multiplier of `x^{r-1-σ}` in the truncation-formula error estimate.
    pub k_err: f64,
    /// Multiplier of the block-sum remainder surrogate.
    pub k_rem: f64,
    /// Evaluation is refused within this distance of the poles s = 1..r.
    pub pole_guard: f64,
    /// Lower bound on the truncation length chosen by `eval_auto`.
    pub x_min: f64,
    /// Safety factor on the truncation length chosen by `eval_auto`.
    pub x_safety: f64,
    /// Number of first-axis indices per parallel block in box sums.
    pub block_size: usize,
    /// Let `eval_auto` switch to Euler–Maclaurin summation when the
    /// truncation formula cannot reach the tolerance inside the term cap.
    pub em_fallback: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            term_cap: 1e8,
            trunc_c: 2.0,
            k_err: 10.0,
            k_rem: 10.0,
            pole_guard: 1e-6,
            x_min: 50.0,
            x_safety: 2.0,
            block_size: 64,
            em_fallback: true,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.term_cap >= 1.0) {
            return bad("term cap must be >= 1");
        }
        if !(self.trunc_c > 1.0) {
            return bad("truncation constant C must exceed 1");
        }
        if !(self.k_err > 0.0 && self.k_rem > 0.0) {
            return bad("error constants must be positive");
        }
        if !(self.pole_guard > 0.0) {
            return bad("pole guard must be positive");
        }
        if !(self.x_min >= 1.0 && self.x_safety >= 1.0) {
            return bad("x_min and x_safety must be >= 1");
        }
        if self.block_size == 0 {
            return bad("block size must be positive");
        }
        Ok(())
    }

    /// Largest |t| admissible for truncation length `x`.
    pub fn t_limit(&self, x: f64) -> f64 {
        2.0 * PI * x / self.trunc_c
    }
}

/// `base^{-s}` for a positive real base, via the real logarithm.
#[inline]
pub(crate) fn pow_neg(base: f64, s: Complex64) -> Complex64 {
    (-s * base.ln()).exp()
}

/// Refuses evaluation near the poles s = 1, ..., r.
pub(crate) fn check_poles(r: usize, s: Complex64, guard: f64) -> Result<()> {
    for j in 1..=r as u32 {
        if (s - j as f64).norm() < guard {
            return Err(Error::NearPole {
                re: s.re,
                im: s.im,
                pole: j,
                guard,
            });
        }
    }
    Ok(())
}

/// (s - 1)(s - 2)...(s - r) · w_1...w_r, the denominator of the boundary terms.
pub(crate) fn pole_denominator(r: usize, s: Complex64, weight_product: f64) -> Complex64 {
    (1..=r).fold(Complex64::new(weight_product, 0.0), |acc, j| {
        acc * (s - j as f64)
    })
}

pub(crate) fn check_finite(v: Complex64, what: &'static str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} produced a non-finite value"
        )))
    }
}
