//! The diagonal constant
//! ζ̃_r(σ, a, w) = Σ_{m·w = n·w} (a + m·w)^{-σ} (a + n·w)^{-σ},
//! the coefficient of T in the mean square of ζ_r on the line Re(s) = σ.
//!
//! For Q-linearly independent weights the diagonal is m = n and
//! ζ̃_r(σ) = ζ_r(2σ). For rational weights w_i = p_i / q the diagonal groups by
//! k = Σ m_i p_i, giving Σ_k R(k)^2 (a + k/q)^{-2σ} with R the denumerant.

use crate::error::{Error, Result};
use crate::eval::{eval_direct, eval_em, EvalConfig};
use crate::params::{denumerant_table, validate_params, BarnesParams, WeightStructure};
use crate::summation::NeumaierSum;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TildePath {
    IndependentReduction,
    RationalSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeResult {
    pub value: f64,
    pub err_estimate: f64,
    pub path: TildePath,
}

/// Largest denumerant table built for the exact quasi-polynomial tail.
const TABLE_CAP: u64 = 20_000_000;

pub fn tilde_zeta(
    params: &BarnesParams,
    sigma: f64,
    structure: &WeightStructure,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<TildeResult> {
    let r = params.rank();
    match structure {
        WeightStructure::AssumedIndependent => {
            let bound = r as f64 / 2.0;
            if !(sigma > bound) {
                return Err(Error::SigmaTooSmall { sigma, bound });
            }
            let z = eval_direct(params, Complex64::new(2.0 * sigma, 0.0), rel_tol, cfg)?;
            Ok(TildeResult {
                value: z.value.re,
                err_estimate: z.err_estimate,
                path: TildePath::IndependentReduction,
            })
        }
        WeightStructure::Rational { q, p } => {
            check_rational_matches(params, *q, p)?;
            let bound = r as f64 - 0.5;
            if !(sigma > bound) {
                return Err(Error::SigmaTooSmall { sigma, bound });
            }
            let (value, err_estimate) = rational_series(params.a(), *q, p, sigma, rel_tol, cfg)?;
            Ok(TildeResult {
                value,
                err_estimate,
                path: TildePath::RationalSeries,
            })
        }
    }
}

fn check_rational_matches(params: &BarnesParams, q: u64, p: &[u64]) -> Result<()> {
    if p.len() != params.rank() || q == 0 {
        return Err(Error::InvalidArgument(
            "rational structure does not match the weights".into(),
        ));
    }
    for (&w, &pi) in params.weights().iter().zip(p) {
        let exact = pi as f64 / q as f64;
        if (w - exact).abs() > 1e-12 * exact {
            return Err(Error::InvalidArgument(format!(
                "weight {w} is not {pi}/{q}; rebuild the structure from exact weights"
            )));
        }
    }
    Ok(())
}

/// Σ_{k <= k_max} R(k)^2 (a + k/q)^{-2σ}.
pub fn rational_series_partial(a: f64, q: u64, p: &[u64], sigma: f64, k_max: u64) -> Result<f64> {
    let table = denumerant_table(p, k_max)?;
    let mut acc = NeumaierSum::new();
    for (k, &count) in table.iter().enumerate() {
        if count != 0 {
            let c = count as f64;
            acc.add(c * c * (a + k as f64 / q as f64).powf(-2.0 * sigma));
        }
    }
    Ok(acc.value())
}

/// Rigorous bound on Σ_{k > k_max} R(k)^2 (a + k/q)^{-2σ} from
/// R(k) <= (k + r)^{r-1} / (r-1)! and integral comparison.
pub fn rational_tail_bound(q: u64, r: usize, sigma: f64, k_max: u64) -> f64 {
    let kk = k_max.max(1) as f64;
    let rf = r as f64;
    let fact: f64 = (1..r).map(|j| j as f64).product();
    let expo = 2.0 * sigma - 2.0 * rf + 1.0;
    (1.0 + rf / kk).powf(2.0 * rf - 2.0) / (fact * fact)
        * (q as f64).powf(2.0 * sigma)
        * kk.powf(-expo)
        / expo
}

/// Value and error of the rational diagonal series.
///
/// R is a quasi-polynomial of period L = lcm(p) and degree <= r - 1 for every
/// k >= 0, so on each residue class k = L n + ρ the terms are a polynomial in n
/// times (n + β)^{-2σ}. Beyond an explicit head the tail is therefore a finite
/// combination of Hurwitz zeta values. When L is too large for the table, the
/// series is truncated with the rigorous tail bound instead.
fn rational_series(
    a: f64,
    q: u64,
    p: &[u64],
    sigma: f64,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<(f64, f64)> {
    let r = p.len();
    let period = p.iter().fold(1u64, |acc, &x| acc.lcm(&x));
    let head_blocks = r as u64 + 1;
    match period.checked_mul(head_blocks) {
        Some(k_head) if k_head <= TABLE_CAP => {
            quasi_polynomial_series(a, q, p, sigma, period, head_blocks, rel_tol, cfg)
        }
        _ => truncated_series(a, q, p, sigma, rel_tol),
    }
}

fn truncated_series(a: f64, q: u64, p: &[u64], sigma: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let r = p.len();
    let mut k = 1024u64;
    loop {
        let head = rational_series_partial(a, q, p, sigma, k)?;
        let tail = rational_tail_bound(q, r, sigma, k);
        if tail <= rel_tol * head {
            return Ok((head, tail));
        }
        if k >= TABLE_CAP {
            return Err(Error::BudgetExceeded {
                what: "rational diagonal series",
                needed: k as f64 * 2.0,
                cap: TABLE_CAP as f64,
            });
        }
        k = (k * 4).min(TABLE_CAP);
    }
}

/// Monomial coefficients of the degree < len polynomial through
/// (n, values[n]), n = 0..len, via Newton forward differences.
fn interpolate_monomial(values: &[f64]) -> Vec<f64> {
    let len = values.len();
    let mut diffs = values.to_vec();
    let mut newton = Vec::with_capacity(len);
    for _ in 0..len {
        newton.push(diffs[0]);
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    // Σ_j Δ^j · C(n, j), with C(n, j) = n(n-1)...(n-j+1)/j! expanded.
    let mut coeffs = vec![0.0; len];
    let mut falling = vec![1.0];
    let mut fact = 1.0;
    for (j, &d) in newton.iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        for (deg, &c) in falling.iter().enumerate() {
            coeffs[deg] += d * c / fact;
        }
        // falling *= (n - j)
        let mut next = vec![0.0; falling.len() + 1];
        for (deg, &c) in falling.iter().enumerate() {
            next[deg] -= c * j as f64;
            next[deg + 1] += c;
        }
        falling = next;
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_square(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * c.len() - 1];
    for (i, &x) in c.iter().enumerate() {
        for (j, &y) in c.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients in powers of (n + shift) of the polynomial given in powers of n.
fn taylor_shift(coeffs: &[f64], shift: f64) -> Vec<f64> {
    // Substitute n = y - shift, Horner on polynomials.
    let mut out: Vec<f64> = Vec::new();
    for &c in coeffs.iter().rev() {
        let mut next = vec![0.0; out.len() + 1];
        for (deg, &v) in out.iter().enumerate() {
            next[deg + 1] += v;
            next[deg] -= v * shift;
        }
        next[0] += c;
        out = next;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn quasi_polynomial_series(
    a: f64,
    q: u64,
    p: &[u64],
    sigma: f64,
    period: u64,
    head_blocks: u64,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<(f64, f64)> {
    let r = p.len();
    let qf = q as f64;
    let lf = period as f64;
    let k_head = period * head_blocks;
    let table = denumerant_table(p, k_head)?;

    let mut head = NeumaierSum::new();
    for (k, &count) in table.iter().take(k_head as usize).enumerate() {
        if count != 0 {
            let c = count as f64;
            head.add(c * c * (a + k as f64 / qf).powf(-2.0 * sigma));
        }
    }
    let head = head.value();

    let scale = (lf / qf).powf(-2.0 * sigma);
    let mut tail = NeumaierSum::new();
    let mut err = 0.0;
    let hurwitz_tol = (rel_tol * 1e-2).max(2e-14);
    for rho in 0..period {
        let samples: Vec<f64> = (0..r as u64)
            .map(|n| table[(period * n + rho) as usize] as f64)
            .collect();
        let poly = interpolate_monomial(&samples);
        // The quasi-polynomial must reproduce the next value exactly.
        let check_n = r as u64;
        let predicted = poly_eval(&poly, check_n as f64);
        let actual = table[(period * check_n + rho) as usize] as f64;
        if (predicted - actual).abs() > 1e-9 * actual.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "denumerant quasi-polynomial check failed at residue {rho}"
            )));
        }
        if poly.iter().all(|&c| c == 0.0) {
            continue;
        }
        let beta = (a * qf + rho as f64) / lf;
        let shifted = taylor_shift(&poly_square(&poly), beta);
        let start = head_blocks as f64 + beta;
        let hz_params = validate_params(start, &[1.0])?;
        for (j, &d) in shifted.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let s = Complex64::new(2.0 * sigma - j as f64, 0.0);
            let z = eval_em(&hz_params, s, hurwitz_tol, cfg)?;
            tail.add(scale * d * z.value.re);
            err += scale * d.abs() * z.err_estimate;
        }
    }
    let value = head + tail.value();
    err += 8.0 * f64::EPSILON * value.abs();
    Ok((value, err))
}
