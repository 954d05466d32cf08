use super::em::{check_rel_tol, em_sum};
use super::{check_finite, pow_neg, ErrKind, EvalConfig, EvalResult, Method};
use crate::error::{Error, Result};
use crate::params::BarnesParams;
use crate::summation::ComplexSum;
use num_complex::Complex64;

fn check_convergent(params: &BarnesParams, s: Complex64) -> Result<()> {
    let r = params.rank() as f64;
    if s.re > r {
        Ok(())
    } else {
        Err(Error::SigmaTooSmall {
            sigma: s.re,
            bound: r,
        })
    }
}

/// The defining series for σ > r, with Euler–Maclaurin tails on every axis.
///
/// The error estimate is a rigorous bound (up to rounding) and the loop
/// tightens until it is at most `rel_tol · |value|`.
pub fn eval_direct(
    params: &BarnesParams,
    s: Complex64,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    check_convergent(params, s)?;
    check_rel_tol(rel_tol)?;
    let (value, err, terms) = em_sum(params, s, rel_tol, cfg)?;
    Ok(EvalResult {
        value,
        err_estimate: err,
        err_kind: ErrKind::RigorousBound,
        method: Method::DirectSeries,
        terms_used: terms,
    })
}

/// Bound on Σ_{a + m·w > X} |(a + m·w)^{-s}|.
///
/// From #{m : a + m·w <= y} <= Π (y / w_i + 1) <= y^r (1 + w_max/X)^r / Π w_i
/// for y >= X and Stieltjes integration by parts:
/// tail <= σ/(σ - r) · (1 + w_max/X)^r / Π w_i · X^{r-σ}.
pub(crate) fn shell_tail_bound(params: &BarnesParams, sigma: f64, x: f64) -> f64 {
    let r = params.rank() as f64;
    let wmax = params.weights().iter().cloned().fold(0.0, f64::max);
    sigma / (sigma - r) * (1.0 + wmax / x).powf(r) / params.weight_product() * x.powf(r - sigma)
}

/// Upper bound on the number of lattice points with a + m·w <= X.
fn lattice_count_bound(params: &BarnesParams, x: f64) -> f64 {
    let span = (x - params.a()).max(0.0);
    params
        .weights()
        .iter()
        .map(|w| (span / w).floor() + 1.0)
        .product()
}

/// Adds Σ (a + m·w)^{-s} over lo < a + m·w <= hi, in lexicographic order.
fn add_shell(
    base: f64,
    w: &[f64],
    s: Complex64,
    lo: f64,
    hi: f64,
    acc: &mut ComplexSum,
    terms: &mut u64,
) {
    let Some((&wr, rest)) = w.split_last() else {
        if base > lo && base <= hi {
            acc.add(pow_neg(base, s));
            *terms += 1;
        }
        return;
    };
    if rest.is_empty() {
        let at = |m: u64| base + m as f64 * wr;
        let mut m = if base > lo {
            0
        } else {
            ((lo - base) / wr).floor().max(0.0) as u64
        };
        while m > 0 && at(m - 1) > lo {
            m -= 1;
        }
        while at(m) <= lo {
            m += 1;
        }
        while at(m) <= hi {
            acc.add(pow_neg(at(m), s));
            *terms += 1;
            m += 1;
        }
        return;
    }
    let mut m = 0u64;
    loop {
        let b = base + m as f64 * wr;
        if b > hi {
            break;
        }
        add_shell(b, rest, s, lo, hi, acc, terms);
        m += 1;
    }
}

/// Plain truncation of the series at a + m·w <= X, summed shell by shell.
///
/// X grows until the lattice-count tail bound drops below
/// `rel_tol · |partial sum|`; the request fails with `BudgetExceeded` when the
/// required X would need more than `term_cap` terms. Exact but slow near σ = r.
pub fn eval_shell(
    params: &BarnesParams,
    s: Complex64,
    rel_tol: f64,
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    check_convergent(params, s)?;
    check_rel_tol(rel_tol)?;
    let sigma = s.re;
    let wmax = params.weights().iter().cloned().fold(0.0, f64::max);
    let mut acc = ComplexSum::new();
    let mut terms = 0u64;
    let mut lo = 0.0;
    let mut hi = params.a() + wmax;
    loop {
        let count = lattice_count_bound(params, hi);
        if count > cfg.term_cap {
            return Err(Error::BudgetExceeded {
                what: "shell-truncated series",
                needed: count,
                cap: cfg.term_cap,
            });
        }
        add_shell(
            params.a(),
            params.weights(),
            s,
            lo,
            hi,
            &mut acc,
            &mut terms,
        );
        let partial = acc.value().norm();
        let bound = shell_tail_bound(params, sigma, hi);
        if bound <= rel_tol * partial {
            let value = check_finite(acc.value(), "shell summation")?;
            return Ok(EvalResult {
                value,
                err_estimate: bound,
                err_kind: ErrKind::RigorousBound,
                method: Method::DirectSeries,
                terms_used: terms,
            });
        }
        // Jump straight to the X the bound asks for, at least doubling.
        let target = rel_tol * partial;
        let mut next = 2.0 * hi;
        while shell_tail_bound(params, sigma, next) > target && next < 1e300 {
            next *= 2.0;
        }
        if lattice_count_bound(params, next) > cfg.term_cap {
            return Err(Error::BudgetExceeded {
                what: "shell-truncated series",
                needed: lattice_count_bound(params, next),
                cap: cfg.term_cap,
            });
        }
        lo = hi;
        hi = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate_params;

    #[test]
    fn shell_agrees_with_em_where_affordable() {
        let p = validate_params(0.7, &[1.0, 1.5]).unwrap();
        let s = Complex64::new(6.0, 2.0);
        let cfg = EvalConfig::default();
        let shell = eval_shell(&p, s, 1e-9, &cfg).unwrap();
        let em = eval_direct(&p, s, 1e-12, &cfg).unwrap();
        let diff = (shell.value - em.value).norm();
        assert!(diff <= shell.err_estimate + em.err_estimate, "{diff}");
        assert!(shell.err_estimate <= 1e-9 * shell.value.norm());
    }

    #[test]
    fn shell_refuses_unaffordable_tolerance() {
        let p = validate_params(1.0, &[1.0]).unwrap();
        let r = eval_shell(&p, Complex64::new(2.0, 0.0), 1e-10, &EvalConfig::default());
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn shells_partition_the_lattice() {
        let w = [0.3, 0.7, 1.1];
        let s = Complex64::new(0.0, 0.0);
        let mut one = ComplexSum::new();
        let mut n_one = 0;
        add_shell(0.5, &w, s, 0.0, 9.0, &mut one, &mut n_one);
        let mut split = ComplexSum::new();
        let mut n_split = 0;
        for (lo, hi) in [(0.0, 2.0), (2.0, 2.1), (2.1, 9.0)] {
            add_shell(0.5, &w, s, lo, hi, &mut split, &mut n_split);
        }
        assert_eq!(n_one, n_split);
        assert_eq!(one.value().re, n_one as f64);
    }

    #[test]
    fn direct_requires_convergence() {
        let p = validate_params(1.0, &[1.0, 2.0]).unwrap();
        let r = eval_direct(&p, Complex64::new(2.0, 3.0), 1e-8, &EvalConfig::default());
        assert!(matches!(r, Err(Error::SigmaTooSmall { .. })));
    }
}
