use super::em::{check_rel_tol, eval_em};
use super::{check_poles, eval_approx, eval_direct, EvalConfig, EvalResult};
use crate::error::{Error, Result};
use crate::params::BarnesParams;
use num_complex::Complex64;
use std::f64::consts::PI;

/// What [`eval_auto`] will do for a given request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AutoPlan {
    Direct,
    /// Truncation formula starting at `x0`, doubling until converged.
    Approx {
        x0: f64,
    },
    EulerMaclaurin,
}

/// Dispatch rule.
///
/// * σ > r + 0.1 and |t| <= 5: the direct series.
/// * Otherwise the truncation formula from `x0 = max(x_min, C|t|/2π) · x_safety`.
///   With fallback enabled it is used only when the heuristic error
///   `k_err x0^{r-1-σ}` already meets `rel_tol` inside the term cap; anything
///   tighter goes to Euler–Maclaurin summation, whose cost grows like
///   log(1/rel_tol) instead of a power of it.
pub fn plan_auto(params: &BarnesParams, s: Complex64, rel_tol: f64, cfg: &EvalConfig) -> AutoPlan {
    let r = params.rank() as f64;
    if s.re > r + 0.1 && s.im.abs() <= 5.0 {
        return AutoPlan::Direct;
    }
    let x0 = cfg.x_min.max(cfg.trunc_c * s.im.abs() / (2.0 * PI)) * cfg.x_safety;
    if !cfg.em_fallback {
        return AutoPlan::Approx { x0 };
    }
    let decay = s.re - r + 1.0;
    let x_req = (cfg.k_err / rel_tol).powf(1.0 / decay);
    if x_req <= x0 && box_terms(params.rank(), x0) <= cfg.term_cap {
        AutoPlan::Approx { x0 }
    } else {
        AutoPlan::EulerMaclaurin
    }
}

fn box_terms(r: usize, x: f64) -> f64 {
    (x.floor() + 1.0).powi(r as i32)
}

/// Evaluates ζ_r(s, a, w) for σ > r - 1 by the route chosen in [`plan_auto`].
///
/// On the truncation-formula route x doubles until the first difference of
/// successive values, or the heuristic estimate, is below `rel_tol · |value|`.
pub fn eval_auto(
    params: &BarnesParams,
    s: Complex64,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    let r = params.rank();
    let bound = r as f64 - 1.0;
    if !(s.re > bound) {
        return Err(Error::SigmaTooSmall { sigma: s.re, bound });
    }
    check_rel_tol(rel_tol)?;
    check_poles(r, s, cfg.pole_guard)?;
    match plan_auto(params, s, rel_tol, cfg) {
        AutoPlan::Direct => eval_direct(params, s, rel_tol, cfg),
        AutoPlan::EulerMaclaurin => eval_em(params, s, rel_tol, cfg),
        AutoPlan::Approx { x0 } => {
            if box_terms(r, x0) > cfg.term_cap && cfg.em_fallback {
                return eval_em(params, s, rel_tol, cfg);
            }
            let mut x = x0;
            let mut current = eval_approx(params, s, x, cfg)?;
            loop {
                if current.err_estimate <= rel_tol * current.value.norm() {
                    return Ok(current);
                }
                let next_x = 2.0 * x;
                if box_terms(r, next_x) > cfg.term_cap {
                    break;
                }
                let next = eval_approx(params, s, next_x, cfg)?;
                let step = (next.value - current.value).norm();
                x = next_x;
                current = next;
                if step <= rel_tol * current.value.norm() {
                    return Ok(current);
                }
            }
            if cfg.em_fallback {
                eval_em(params, s, rel_tol, cfg)
            } else {
                Ok(current)
            }
        }
    }
}
