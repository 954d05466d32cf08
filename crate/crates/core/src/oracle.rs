//! Reference values used to check the evaluators.
//!
//! These routines share no code with [`crate::eval`]: the Hurwitz zeta here is
//! a fixed-order Euler–Maclaurin formula with its own term selection, the
//! multi-sum is a bare loop, and the equal-weight reduction rewrites
//! ζ_r(s, a, (1, ..., 1)) as a finite combination of Hurwitz zeta values.

use crate::error::{Error, Result};
use crate::params::BarnesParams;
use crate::summation::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: Complex64,
    /// Always finite and strictly positive.
    pub claimed_abs_error: f64,
}

// B_2, B_4, B_6, B_8, and B_10 for the remainder.
const B2K: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
const FACT2K: [f64; 5] = [2.0, 24.0, 720.0, 40320.0, 3628800.0];

fn cpow(base: f64, e: Complex64) -> Complex64 {
    Complex64::new(base, 0.0).powc(e)
}

/// Hurwitz zeta ζ(s, α) = Σ_{n ≥ 0} (n + α)^{-s} by Euler–Maclaurin
/// summation with Bernoulli corrections through B_8.
///
/// N explicit terms are taken so that the B_10 remainder bound
/// `2|B_10|/10! |(s)_10| (N+α)^{-σ-9} / (σ+9)` is at most `abs_tol`.
pub fn hurwitz_zeta(s: Complex64, alpha: f64, abs_tol: f64) -> Result<OracleValue> {
    if (s - 1.0).norm() < 1e-6 {
        return Err(Error::NearPole {
            re: s.re,
            im: s.im,
            pole: 1,
            guard: 1e-6,
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(s.re > -1.0) {
        return Err(Error::SigmaTooSmall {
            sigma: s.re,
            bound: -1.0,
        });
    }
    if !(abs_tol > 0.0) {
        return Err(Error::InvalidArgument("abs_tol must be positive".into()));
    }
    let poch10: f64 = (0..10).map(|j| (s + j as f64).norm()).product();
    let rem = |n: f64| {
        2.0 * B2K[4].abs() / FACT2K[4] * poch10 * (n + alpha).powf(-s.re - 9.0) / (s.re + 9.0)
    };
    let mut n = 1.0f64;
    while rem(n) > abs_tol {
        n = (n * 1.25).ceil();
    }
    let mut acc = ComplexSum::new();
    let mut magnitude = 0.0;
    for k in 0..n as u64 {
        let t = cpow(k as f64 + alpha, -s);
        magnitude += t.norm();
        acc.add(t);
    }
    let big = n + alpha;
    acc.add(cpow(big, 1.0 - s) / (s - 1.0));
    acc.add(0.5 * cpow(big, -s));
    let mut rising = s;
    for k in 1..=4usize {
        if k > 1 {
            let i = (2 * k - 3) as f64;
            rising *= (s + i) * (s + i + 1.0);
        }
        acc.add(B2K[k - 1] / FACT2K[k - 1] * rising * cpow(big, -s - (2 * k - 1) as f64));
    }
    let value = acc.value();
    Ok(OracleValue {
        value,
        claimed_abs_error: rem(n)
            + 8.0 * f64::EPSILON * (magnitude + value.norm())
            + f64::MIN_POSITIVE,
    })
}

/// Σ_{0 <= m_i <= cutoff} (a + m·w)^{-s}, a plain loop.
pub fn naive_multisum(params: &BarnesParams, s: Complex64, cutoff: u64) -> Result<Complex64> {
    let r = params.rank();
    let work = (cutoff as f64).powi(r as i32);
    if work > 1e7 {
        return Err(Error::BudgetExceeded {
            what: "naive multi-sum",
            needed: work,
            cap: 1e7,
        });
    }
    let w = params.weights();
    let mut idx = vec![0u64; r];
    let mut acc = ComplexSum::new();
    loop {
        let base = params.a()
            + idx
                .iter()
                .zip(w)
                .map(|(&m, &wi)| m as f64 * wi)
                .sum::<f64>();
        acc.add(cpow(base, -s));
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == r {
                return Ok(acc.value());
            }
            if idx[axis] < cutoff {
                idx[axis] += 1;
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Coefficients c_j with binomial(N + r - 1, r - 1) = Σ_j c_j (N + a)^j.
pub fn equal_weight_coefficients(r: usize, a: f64) -> Vec<f64> {
    // Π_{j=1}^{r-1} (y + j - a) / (r-1)!, expanded in y = N + a.
    let mut poly = vec![1.0];
    for j in 1..r {
        let c = j as f64 - a;
        let mut next = vec![0.0; poly.len() + 1];
        for (d, &coef) in poly.iter().enumerate() {
            next[d] += coef * c;
            next[d + 1] += coef;
        }
        poly = next;
    }
    let fact: f64 = (1..r).map(|k| k as f64).product();
    poly.iter().map(|c| c / fact).collect()
}

/// ζ_r(s, a, (1, ..., 1)) = Σ_j c_j ζ(s - j, a) for Re(s) > r, r <= 4.
pub fn equal_weight_reduction(r: usize, s: Complex64, a: f64, abs_tol: f64) -> Result<OracleValue> {
    if !(1..=4).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "equal-weight reduction needs 1 <= r <= 4, got {r}"
        )));
    }
    if !(s.re > r as f64) {
        return Err(Error::SigmaTooSmall {
            sigma: s.re,
            bound: r as f64,
        });
    }
    let coefs = equal_weight_coefficients(r, a);
    let mut acc = ComplexSum::new();
    let mut err = 0.0;
    for (j, &c) in coefs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let h = hurwitz_zeta(
            s - j as f64,
            a,
            abs_tol / (coefs.len() as f64 * c.abs().max(1.0)),
        )?;
        acc.add(c * h.value);
        err += c.abs() * h.claimed_abs_error;
    }
    Ok(OracleValue {
        value: acc.value(),
        claimed_abs_error: err,
    })
}
