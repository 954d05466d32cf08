//! Mean square I(T) = ∫_1^T |ζ_r(σ + it, a, w)|^2 dt and the residual
//! exponent fit used to check its asymptotics.

use crate::error::{Error, Result};
use crate::eval::{check_poles, eval_auto, EvalConfig};
use crate::params::{BarnesParams, WeightStructure};
use crate::summation::NeumaierSum;
use crate::tilde::tilde_zeta;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

/// Slack allowed between the fitted residual slope and the predicted bound.
pub const SLOPE_TOLERANCE: f64 = 0.35;

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

const GL7: [(f64, f64); 7] = [
    (-0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
    (-0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (-0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (0.0, 0.417_959_183_673_469_4),
    (0.405_845_151_377_397_2, 0.381_830_050_505_118_9),
    (0.741_531_185_599_394_4, 0.279_705_391_489_276_7),
    (0.949_107_912_342_758_5, 0.129_484_966_168_869_7),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSquareConfig {
    /// Relative tolerance of each adaptive panel.
    pub quad_tol: f64,
    /// Inner evaluator settings. The default uses C = 2π so that the
    /// truncation length tracks t.
    pub eval: EvalConfig,
    /// Relative tolerance of each |ζ_r|^2 evaluation; `None` means
    /// min(1e-8, quad_tol / 100).
    pub inner_rel_tol: Option<f64>,
    /// Cap on integrand evaluations; `None` means 1e7 for r = 1 and 1e5 above.
    pub eval_cap: Option<u64>,
    /// Maximum bisection depth of one panel.
    pub max_depth: u32,
}

impl Default for MeanSquareConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-6,
            eval: EvalConfig {
                trunc_c: 2.0 * PI,
                ..EvalConfig::default()
            },
            inner_rel_tol: None,
            eval_cap: None,
            max_depth: 24,
        }
    }
}

impl MeanSquareConfig {
    pub fn inner_tol(&self) -> f64 {
        self.inner_rel_tol
            .unwrap_or((self.quad_tol * 1e-2).min(1e-8))
    }

    pub fn cap_for_rank(&self, r: usize) -> u64 {
        self.eval_cap
            .unwrap_or(if r == 1 { 10_000_000 } else { 100_000 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub integral: f64,
    /// Integrand evaluations spent on [1, t].
    pub evals: u64,
}

/// How the inner truncation length was chosen, recorded for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XPolicy {
    pub trunc_c: f64,
    pub x_min: f64,
    pub x_safety: f64,
    pub inner_rel_tol: f64,
    pub em_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSquareTrace {
    pub sigma: f64,
    pub params: BarnesParams,
    pub checkpoints: Vec<Checkpoint>,
    pub quad_tol: f64,
    pub x_policy: XPolicy,
}

impl MeanSquareTrace {
    /// `T,I,evals` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,I,evals\n");
        for c in &self.checkpoints {
            let _ = writeln!(out, "{:.16e},{:.16e},{}", c.t, c.integral, c.evals);
        }
        out
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    /// Index of the checkpoint interval the panel belongs to.
    interval: usize,
}

fn gauss(
    rule: &[(f64, f64)],
    lo: f64,
    hi: f64,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = NeumaierSum::new();
    for &(x, w) in rule {
        acc.add(w * f(mid + half * x)?);
    }
    Ok(half * acc.value())
}

/// Adaptive GL7/GL4 on one panel; returns (integral, evaluations).
fn adaptive_panel(
    lo: f64,
    hi: f64,
    tol: f64,
    depth_left: u32,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<(f64, u64)> {
    let q7 = gauss(&GL7, lo, hi, f)?;
    let q4 = gauss(&GL4, lo, hi, f)?;
    let width = hi - lo;
    let scale = (q7.abs() / width).max(1.0) * width;
    if (q7 - q4).abs() <= tol * scale || depth_left == 0 {
        return Ok((q7, 11));
    }
    let mid = 0.5 * (lo + hi);
    let (left, n1) = adaptive_panel(lo, mid, tol, depth_left - 1, f)?;
    let (right, n2) = adaptive_panel(mid, hi, tol, depth_left - 1, f)?;
    Ok((left + right, 11 + n1 + n2))
}

/// Integrates |ζ_r(σ + it)|^2 over [1, T], recording I at each checkpoint.
///
/// Checkpoints must be increasing inside (1, T]; T is appended when missing.
/// Panels are integrated in parallel and summed in a fixed order, so the
/// result does not depend on the number of worker threads.
pub fn integrate_mean_square(
    params: &BarnesParams,
    sigma: f64,
    t_max: f64,
    checkpoints: &[f64],
    cfg: &MeanSquareConfig,
) -> Result<MeanSquareTrace> {
    let r = params.rank();
    let bound = r as f64 - 1.0;
    if !(sigma > bound) {
        return Err(Error::SigmaTooSmall { sigma, bound });
    }
    check_poles(r, Complex64::new(sigma, 0.0), cfg.eval.pole_guard)?;
    if !(t_max > 1.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "T must exceed 1, got {t_max}"
        )));
    }
    if !(cfg.quad_tol > 0.0 && cfg.quad_tol < 1.0) {
        return Err(Error::InvalidArgument("quad_tol must lie in (0, 1)".into()));
    }
    cfg.eval.validate()?;
    let mut ends: Vec<f64> = checkpoints.to_vec();
    if ends.windows(2).any(|w| !(w[0] < w[1])) || ends.iter().any(|&t| !(t > 1.0 && t <= t_max)) {
        return Err(Error::InvalidArgument(
            "checkpoints must increase inside (1, T]".into(),
        ));
    }
    if ends.last() != Some(&t_max) {
        ends.push(t_max);
    }

    let h0 = (2.0 * PI / (3.0 * (params.a() + t_max * params.weight_sum()).ln())).min(0.25);
    let mut panels = Vec::new();
    let mut start = 1.0;
    for (i, &end) in ends.iter().enumerate() {
        let n = ((end - start) / h0).ceil().max(1.0) as usize;
        let h = (end - start) / n as f64;
        for j in 0..n {
            let lo = start + j as f64 * h;
            let hi = if j + 1 == n {
                end
            } else {
                start + (j + 1) as f64 * h
            };
            panels.push(Panel {
                lo,
                hi,
                interval: i,
            });
        }
        start = end;
    }

    let cap = cfg.cap_for_rank(r);
    if panels.len() as u64 * 11 > cap {
        return Err(Error::BudgetExceeded {
            what: "mean-square integrand evaluations",
            needed: panels.len() as f64 * 11.0,
            cap: cap as f64,
        });
    }
    let inner_tol = cfg.inner_tol();
    let spent = AtomicU64::new(0);
    let results: Vec<Result<(f64, u64)>> = panels
        .par_iter()
        .map(|panel| {
            let mut f = |t: f64| -> Result<f64> {
                if spent.fetch_add(1, Ordering::Relaxed) >= cap {
                    return Err(Error::BudgetExceeded {
                        what: "mean-square integrand evaluations",
                        needed: cap as f64 + 1.0,
                        cap: cap as f64,
                    });
                }
                let z = eval_auto(params, Complex64::new(sigma, t), inner_tol, &cfg.eval)?;
                Ok(z.value.norm_sqr())
            };
            adaptive_panel(panel.lo, panel.hi, cfg.quad_tol, cfg.max_depth, &mut f)
        })
        .collect();

    let mut acc = NeumaierSum::new();
    let mut evals = 0u64;
    let mut out = Vec::with_capacity(ends.len());
    for (panel, res) in panels.iter().zip(results) {
        let (v, n) = res?;
        acc.add(v);
        evals += n;
        let last_of_interval = panel.hi == ends[panel.interval];
        if last_of_interval {
            out.push(Checkpoint {
                t: panel.hi,
                integral: acc.value(),
                evals,
            });
        }
    }
    Ok(MeanSquareTrace {
        sigma,
        params: params.clone(),
        checkpoints: out,
        quad_tol: cfg.quad_tol,
        x_policy: XPolicy {
            trunc_c: cfg.eval.trunc_c,
            x_min: cfg.eval.x_min,
            x_safety: cfg.eval.x_safety,
            inner_rel_tol: inner_tol,
            em_fallback: cfg.eval.em_fallback,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Checkpoints skipped because their residual was exactly zero.
    pub dropped: usize,
}

/// Least-squares fit of log|I(T) - ζ̃ T| against log T.
pub fn fit_residual_exponent(trace: &MeanSquareTrace, tilde_value: f64) -> Result<ResidualFit> {
    let points: Vec<(f64, f64)> = trace
        .checkpoints
        .iter()
        .map(|c| (c.t, (c.integral - tilde_value * c.t).abs()))
        .collect();
    fit_log_log(&points)
}

pub(crate) fn fit_log_log(points: &[(f64, f64)]) -> Result<ResidualFit> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y > 0.0)
        .map(|&(t, y)| (t.ln(), y.ln()))
        .collect();
    let dropped = points.len() - kept.len();
    let distinct = {
        let mut xs: Vec<f64> = kept.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.len()
    };
    if distinct < 4 {
        return Err(Error::InsufficientCheckpoints {
            needed: 4,
            have: distinct,
        });
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = kept.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Ok(ResidualFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// σ > r: I(T) = ζ̃ T + O(1).
    SigmaAboveR,
    /// r - 1/4 < σ <= r: I(T) = ζ̃ T + O(T^{1/2}).
    UpperRange,
    /// r - 1/2 < σ <= r - 1/4: I(T) = ζ̃ T + O(T^{2r-2σ} log T).
    MidRange,
    /// r - 1 < σ <= r - 1/2: only I(T) = O(T^{2r-2σ} log T).
    LowerRange,
}

impl Regime {
    pub fn classify(sigma: f64, r: usize) -> Option<Regime> {
        let r = r as f64;
        if !(sigma > r - 1.0) {
            None
        } else if sigma > r {
            Some(Regime::SigmaAboveR)
        } else if sigma > r - 0.25 {
            Some(Regime::UpperRange)
        } else if sigma > r - 0.5 {
            Some(Regime::MidRange)
        } else {
            Some(Regime::LowerRange)
        }
    }

    /// Predicted exponent of the residual, ignoring logarithms.
    pub fn slope_bound(self, sigma: f64, r: usize) -> f64 {
        match self {
            Regime::SigmaAboveR => 0.0,
            Regime::UpperRange => 0.5,
            Regime::MidRange | Regime::LowerRange => 2.0 * r as f64 - 2.0 * sigma,
        }
    }

    /// Whether I(T) / T tends to ζ̃ in this regime.
    pub fn has_linear_term(self) -> bool {
        !matches!(self, Regime::LowerRange)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub sigma: f64,
    pub rank: usize,
    pub regime: Regime,
    /// ζ̃_r(σ); absent in the lower range, where the raw integral is fitted.
    pub tilde_value: Option<f64>,
    pub residuals: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted_slope_bound: f64,
    pub slope_tolerance: f64,
    pub pass: bool,
    pub notes: Vec<String>,
    pub trace: MeanSquareTrace,
}

/// Integrates up to the largest grid point and compares the residual growth
/// with the bound predicted for σ's regime.
pub fn verify_mean_square(
    params: &BarnesParams,
    sigma: f64,
    t_grid: &[f64],
    structure: &WeightStructure,
    cfg: &MeanSquareConfig,
) -> Result<VerificationReport> {
    let r = params.rank();
    let regime = Regime::classify(sigma, r).ok_or(Error::SigmaTooSmall {
        sigma,
        bound: r as f64 - 1.0,
    })?;
    check_poles(r, Complex64::new(sigma, 0.0), cfg.eval.pole_guard)?;
    if t_grid.len() < 4 {
        return Err(Error::InsufficientCheckpoints {
            needed: 4,
            have: t_grid.len(),
        });
    }
    let (lo, hi) = (t_grid[0], t_grid[t_grid.len() - 1]);
    if !(hi >= 8.0 * lo) {
        return Err(Error::InvalidArgument(
            "T grid must span a factor of at least 8".into(),
        ));
    }
    let mut notes = Vec::new();
    let tilde_value = if regime.has_linear_term() {
        Some(tilde_zeta(params, sigma, structure, 1e-10, &cfg.eval)?.value)
    } else {
        notes.push("lower range: fitting the growth of I(T) itself".to_string());
        None
    };
    if (sigma - (r as f64 - 0.25)).abs() < 1e-12 {
        notes.push(format!(
            "boundary sigma = r - 1/4: bounds T^0.5 and T^{} log T coincide up to the log",
            2.0 * r as f64 - 2.0 * sigma
        ));
    }
    let trace = integrate_mean_square(params, sigma, hi, t_grid, cfg)?;
    let c = tilde_value.unwrap_or(0.0);
    let residuals: Vec<(f64, f64)> = trace
        .checkpoints
        .iter()
        .map(|p| (p.t, (p.integral - c * p.t).abs()))
        .collect();
    let fit = fit_log_log(&residuals)?;
    let predicted_slope_bound = regime.slope_bound(sigma, r);
    Ok(VerificationReport {
        sigma,
        rank: r,
        regime,
        tilde_value,
        residuals,
        fitted_slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        predicted_slope_bound,
        slope_tolerance: SLOPE_TOLERANCE,
        pass: fit.slope <= predicted_slope_bound + SLOPE_TOLERANCE,
        notes,
        trace,
    })
}
