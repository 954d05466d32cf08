//! Euler–Maclaurin summation along the last axis, applied recursively.
//!
//! Writing `w = (w', w_r)` and `A = a + N w_r`, summation over `m_r` gives
//!
//! ```text
//! ζ_r(s, a, w) = Σ_{j<N} ζ_{r-1}(s, a + j w_r, w')
//!              + ζ_{r-1}(s - 1, A, w') / ((s - 1) w_r)
//!              + ζ_{r-1}(s, A, w') / 2
//!              + Σ_{k=1}^{K} B_{2k}/(2k)! (s)_{2k-1} w_r^{2k-1} ζ_{r-1}(s + 2k - 1, A, w')
//!              + R,
//! ```
//!
//! with ζ_0(s, A) = A^{-s}. The remainder is bounded by
//! `2|B_{2K+2}|/(2K+2)! |(s)_{2K+2}| w_r^{2K+1} / ρ · Σ_{m'} (A + m'·w')^{-ρ}`,
//! `ρ = σ + 2K + 1`, and the lattice sum is majorised by repeated
//! sum-versus-integral comparison. Every sub-call returns its own bound, so the
//! total is rigorous up to floating-point rounding, which is estimated
//! separately. The identity continues analytically to σ > r - 1 - 2K, which is
//! how the same routine serves the strip r - 1 < σ <= r.

use super::{check_finite, check_poles, pow_neg, ErrKind, EvalConfig, EvalResult, Method};
use crate::error::{Error, Result};
use crate::params::BarnesParams;
use crate::summation::{ComplexSum, NeumaierSum};
use num_complex::Complex64;

/// B_2, B_4, ..., B_30.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Candidate correction orders; the cheapest one meeting the tolerance wins.
const ORDERS: [usize; 6] = [2, 4, 6, 8, 11, 14];

const ROUNDING: f64 = 4.0 * f64::EPSILON;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// B_{2k} / (2k)!
fn bernoulli_ratio(k: usize) -> f64 {
    BERNOULLI_EVEN[k - 1] / factorial(2 * k)
}

/// |(s)_n| = |s (s+1) ... (s+n-1)|
fn rising_norm(s: Complex64, n: usize) -> f64 {
    (0..n).map(|j| (s + j as f64).norm()).product()
}

/// Upper bound on Σ_{m ≥ 0} (shift + m·w)^{-ρ} for real ρ > len(w).
pub(crate) fn lattice_power_bound(w: &[f64], shift: f64, rho: f64) -> f64 {
    match w.split_last() {
        None => shift.powf(-rho),
        Some((&wd, rest)) => {
            if rho <= 1.0 {
                return f64::INFINITY;
            }
            lattice_power_bound(rest, shift, rho)
                + lattice_power_bound(rest, shift, rho - 1.0) / ((rho - 1.0) * wd)
        }
    }
}

struct Ctx {
    terms: u64,
    cap: f64,
}

impl Ctx {
    fn charge(&mut self, n: u64) -> Result<()> {
        self.terms += n;
        if self.terms as f64 > self.cap {
            return Err(Error::BudgetExceeded {
                what: "Euler-Maclaurin terms",
                needed: self.terms as f64,
                cap: self.cap,
            });
        }
        Ok(())
    }
}

fn remainder_bound(s: Complex64, wr: f64, rest: &[f64], shift: f64, order: usize) -> f64 {
    let m = 2 * order + 2;
    let rho = s.re + (2 * order + 1) as f64;
    if rho <= rest.len() as f64 || rho <= 0.0 {
        return f64::INFINITY;
    }
    let coef =
        2.0 * bernoulli_ratio(order + 1).abs() * rising_norm(s, m) * wr.powi(m as i32 - 1) / rho;
    coef * lattice_power_bound(rest, shift, rho)
}

/// Smallest N with the remainder bound at `a + N w_r` below `tol`.
fn explicit_terms(
    a: f64,
    s: Complex64,
    wr: f64,
    rest: &[f64],
    order: usize,
    tol: f64,
) -> Option<u64> {
    let ok = |n: u64| remainder_bound(s, wr, rest, a + n as f64 * wr, order) <= tol;
    if ok(0) {
        return Some(0);
    }
    let mut hi = 1u64;
    while !ok(hi) {
        hi *= 2;
        if hi > 1 << 40 {
            return None;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Returns (value, error bound).
fn zeta_rec(a: f64, w: &[f64], s: Complex64, tol: f64, ctx: &mut Ctx) -> Result<(Complex64, f64)> {
    let Some((&wr, rest)) = w.split_last() else {
        ctx.charge(1)?;
        let v = pow_neg(a, s);
        return Ok((v, ROUNDING * v.norm()));
    };

    // Half the budget goes to the remainder, the other half to sub-calls.
    let tol_rem = 0.5 * tol;
    let (order, n) = ORDERS
        .iter()
        .filter_map(|&k| explicit_terms(a, s, wr, rest, k, tol_rem).map(|n| (k, n)))
        .min_by_key(|&(k, n)| n + k as u64)
        .ok_or(Error::BudgetExceeded {
            what: "Euler-Maclaurin explicit terms",
            needed: f64::INFINITY,
            cap: ctx.cap,
        })?;
    if n as f64 > ctx.cap {
        return Err(Error::BudgetExceeded {
            what: "Euler-Maclaurin explicit terms",
            needed: n as f64,
            cap: ctx.cap,
        });
    }
    let shift = a + n as f64 * wr;
    let mut acc = ComplexSum::new();
    let mut magnitude = NeumaierSum::new();
    let mut err = remainder_bound(s, wr, rest, shift, order);

    let tol_explicit = 0.25 * tol / n.max(1) as f64;
    for j in 0..n {
        let (v, e) = zeta_rec(a + j as f64 * wr, rest, s, tol_explicit, ctx)?;
        acc.add(v);
        magnitude.add(v.norm());
        err += e;
    }

    let mut corrections: Vec<(Complex64, Complex64)> = Vec::with_capacity(order + 2);
    corrections.push((1.0 / ((s - 1.0) * wr), s - 1.0));
    corrections.push((Complex64::new(0.5, 0.0), s));
    // (s)_{2k-1} w_r^{2k-1}, advanced two factors at a time.
    let mut rising = s * wr;
    for k in 1..=order {
        if k > 1 {
            let i = (2 * k - 3) as f64;
            rising *= (s + i) * (s + i + 1.0) * wr * wr;
        }
        corrections.push((bernoulli_ratio(k) * rising, s + (2 * k - 1) as f64));
    }
    let tol_corr = 0.25 * tol / corrections.len() as f64;
    for (coef, exponent) in corrections {
        let c = coef.norm();
        if c == 0.0 {
            continue;
        }
        let (v, e) = zeta_rec(shift, rest, exponent, tol_corr / c, ctx)?;
        let term = coef * v;
        acc.add(term);
        magnitude.add(term.norm());
        err += c * e;
    }
    err += ROUNDING * magnitude.value();
    Ok((acc.value(), err))
}

/// Sums the series to absolute tolerance `tol`, returning (value, bound, terms).
pub(crate) fn em_sum(
    params: &BarnesParams,
    s: Complex64,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<(Complex64, f64, u64)> {
    let mut scale = params.a().powf(-s.re);
    let mut best = None;
    for _ in 0..4 {
        let mut ctx = Ctx {
            terms: 0,
            cap: cfg.term_cap,
        };
        let (v, err) = zeta_rec(params.a(), params.weights(), s, rel_tol * scale, &mut ctx)?;
        let v = check_finite(v, "Euler-Maclaurin summation")?;
        best = Some((v, err, ctx.terms));
        if err <= rel_tol * v.norm() || !(v.norm() > 0.0) {
            break;
        }
        scale = 0.5 * v.norm().min(scale);
    }
    Ok(best.expect("at least one pass"))
}

pub(crate) fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 1e-14 && rel_tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "rel_tol must lie in (1e-14, 1), got {rel_tol}"
        )))
    }
}

/// Euler–Maclaurin evaluation for σ > r - 1 at any height t.
pub fn eval_em(
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
    let (value, err, terms) = em_sum(params, s, rel_tol, cfg)?;
    Ok(EvalResult {
        value,
        err_estimate: err,
        err_kind: ErrKind::RigorousBound,
        method: Method::EulerMaclaurin,
        terms_used: terms,
    })
}
