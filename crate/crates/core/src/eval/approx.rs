use super::{
    check_finite, check_poles, pole_denominator, pow_neg, ErrKind, EvalConfig, EvalResult, Method,
};
use crate::error::{Error, Result};
use crate::params::BarnesParams;
use crate::summation::{pairwise_reduce, ComplexSum};
use num_complex::Complex64;
use rayon::prelude::*;

/// Per-axis index ranges `p_i <= m_i <= q_i` with `0 <= p_i < q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRange {
    bounds: Vec<(f64, f64)>,
}

impl BoxRange {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (axis, &(p, q)) in bounds.iter().enumerate() {
            if !(p >= 0.0 && p < q && q.is_finite()) {
                return Err(Error::InvalidBox { axis, p, q });
            }
        }
        Ok(Self { bounds })
    }

    /// The cube `[0, x]^r`.
    pub fn cube(r: usize, x: f64) -> Result<Self> {
        Self::new(vec![(0.0, x); r])
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
}

/// Leading term and remainder surrogate of a box sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSum {
    pub main_term: Complex64,
    pub remainder_estimate: f64,
}

fn check_strip(params: &BarnesParams, s: Complex64) -> Result<()> {
    let bound = params.rank() as f64 - 1.0;
    if s.re > bound {
        Ok(())
    } else {
        Err(Error::SigmaTooSmall { sigma: s.re, bound })
    }
}

/// Leading Euler–Maclaurin term of Σ_{p_i <= m_i <= q_i} (a + m·w)^{-s}:
///
/// `1/((s-1)...(s-r) w_1...w_r) · Σ_{b_i ∈ {p_i, q_i}} (-1)^{#q chosen} (a + b·w)^{r-s}`.
///
/// The remainder surrogate is
/// `k_rem · Σ_i Σ_{c_j ∈ {p_j, q_j}} Π_{j<i} max(c_j, 1) · (a + c_i w_i)^{r-i-σ}`,
/// the shape of the error sum with the unknown constants replaced by `k_rem`.
pub fn em_block_sum(
    params: &BarnesParams,
    s: Complex64,
    range: &BoxRange,
    cfg: &EvalConfig,
) -> Result<BlockSum> {
    let r = params.rank();
    if range.bounds().len() != r {
        return Err(Error::InvalidArgument(format!(
            "box has {} axes but r = {r}",
            range.bounds().len()
        )));
    }
    check_strip(params, s)?;
    check_poles(r, s, cfg.pole_guard)?;
    let w = params.weights();
    let exponent = s - r as f64;
    let mut acc = ComplexSum::new();
    for mask in 0u32..(1 << r) {
        let mut base = params.a();
        for (i, &(p, q)) in range.bounds().iter().enumerate() {
            base += if mask >> i & 1 == 1 { q } else { p } * w[i];
        }
        let term = pow_neg(base, exponent);
        if mask.count_ones() % 2 == 1 {
            acc.add(-term);
        } else {
            acc.add(term);
        }
    }
    let main_term = acc.value() / pole_denominator(r, s, params.weight_product());

    let sigma = s.re;
    let mut rem = 0.0;
    for i in 1..=r {
        for mask in 0u32..(1 << i) {
            let pick = |j: usize| {
                let (p, q) = range.bounds()[j];
                if mask >> j & 1 == 1 {
                    q
                } else {
                    p
                }
            };
            let count: f64 = (0..i - 1).map(|j| pick(j).max(1.0)).product();
            let last = params.a() + pick(i - 1) * w[i - 1];
            rem += count * last.powf(r as f64 - i as f64 - sigma);
        }
    }
    Ok(BlockSum {
        main_term: check_finite(main_term, "block sum")?,
        remainder_estimate: cfg.k_rem * rem,
    })
}

/// `-Σ_{∅ ≠ E ⊆ {w_1..w_r}} (-1)^{#E} (a + x Σ_{e∈E} e)^{r-s} / ((s-1)...(s-r) w_1...w_r)`,
/// the correction added to the box sum in the truncation formula.
pub fn boundary_correction(
    params: &BarnesParams,
    s: Complex64,
    x: f64,
    cfg: &EvalConfig,
) -> Result<Complex64> {
    let r = params.rank();
    check_poles(r, s, cfg.pole_guard)?;
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "truncation x must be positive, got {x}"
        )));
    }
    let w = params.weights();
    let exponent = s - r as f64;
    let mut acc = ComplexSum::new();
    for mask in 1u32..(1 << r) {
        let subset_sum: f64 = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        let term = pow_neg(params.a() + x * subset_sum, exponent);
        // -(-1)^{#E}
        if mask.count_ones() % 2 == 1 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
    }
    check_finite(
        acc.value() / pole_denominator(r, s, params.weight_product()),
        "boundary correction",
    )
}

fn add_box_axes(base: f64, w: &[f64], s: Complex64, n_max: u64, acc: &mut ComplexSum) {
    match w.split_first() {
        None => acc.add(pow_neg(base, s)),
        Some((&wi, rest)) => {
            for m in 0..=n_max {
                add_box_axes(base + m as f64 * wi, rest, s, n_max, acc);
            }
        }
    }
}

/// Σ_{0 <= m_i <= n_max} (a + m·w)^{-s}.
///
/// The first axis is cut into blocks of `block_size` indices summed in
/// parallel; block sums are combined by a fixed pairwise tree, so the result
/// does not depend on the thread count.
pub fn box_sum(params: &BarnesParams, s: Complex64, n_max: u64, block_size: usize) -> Complex64 {
    let w = params.weights();
    let (w0, rest) = w.split_first().expect("validated params have r >= 1");
    let block = block_size.max(1) as u64;
    let blocks = (n_max + 1).div_ceil(block);
    let parts: Vec<ComplexSum> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = ComplexSum::new();
            let end = ((b + 1) * block).min(n_max + 1);
            for m in b * block..end {
                add_box_axes(params.a() + m as f64 * w0, rest, s, n_max, &mut acc);
            }
            acc
        })
        .collect();
    pairwise_reduce(parts).value()
}

/// Truncation formula: box sum over `0 <= m_i <= floor(x)` plus
/// [`boundary_correction`], valid for σ > r - 1 and `|t| <= 2πx/C`.
///
/// The error estimate `k_err · x^{r-1-σ}` is heuristic.
pub fn eval_approx(
    params: &BarnesParams,
    s: Complex64,
    x: f64,
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    let r = params.rank();
    check_strip(params, s)?;
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "truncation x must be >= 1, got {x}"
        )));
    }
    let limit = cfg.t_limit(x);
    if s.im.abs() > limit {
        return Err(Error::TruncationTooShort { t: s.im, x, limit });
    }
    check_poles(r, s, cfg.pole_guard)?;
    let n_max = x.floor() as u64;
    let terms = (n_max as f64 + 1.0).powi(r as i32);
    if terms > cfg.term_cap {
        return Err(Error::BudgetExceeded {
            what: "truncated box sum",
            needed: terms,
            cap: cfg.term_cap,
        });
    }
    let head = box_sum(params, s, n_max, cfg.block_size);
    let value = check_finite(
        head + boundary_correction(params, s, x, cfg)?,
        "truncation formula",
    )?;
    Ok(EvalResult {
        value,
        err_estimate: cfg.k_err * x.powf(r as f64 - 1.0 - s.re),
        err_kind: ErrKind::HeuristicEstimate,
        method: Method::ApproxFormula,
        terms_used: terms as u64,
    })
}

/// Both sides of the inclusion–exclusion boundary identity for `1 <= x <= N`.
///
/// Left: over all assignments `(p_i, q_i) ∈ {(0, x), (x, N)}` except the
/// all-`(0, x)` one, the signed endpoint sums
/// `Σ_{b_i ∈ {p_i, q_i}} (-1)^{#q chosen} (a + b·w)^{r-s}`.
/// Right: `Σ_{E ≠ ∅} (-1)^{#E} [(a + N Σ_E e)^{r-s} - (a + x Σ_E e)^{r-s}]`.
pub fn boundary_identity_check(
    params: &BarnesParams,
    s: Complex64,
    x: f64,
    big_n: f64,
) -> Result<(Complex64, Complex64)> {
    let r = params.rank();
    if r > 5 {
        return Err(Error::InvalidArgument(format!(
            "identity check supports r <= 5, got {r}"
        )));
    }
    if !(1.0 <= x && x <= big_n && big_n.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= x <= N, got x = {x}, N = {big_n}"
        )));
    }
    let a = params.a();
    let w = params.weights();
    let exponent = s - r as f64;

    let mut lhs = ComplexSum::new();
    for intervals in 1u32..(1 << r) {
        for ends in 0u32..(1 << r) {
            let mut base = a;
            for (i, &wi) in w.iter().enumerate() {
                let upper = intervals >> i & 1 == 1;
                let pick_q = ends >> i & 1 == 1;
                let b = match (upper, pick_q) {
                    (false, false) => 0.0,
                    (false, true) | (true, false) => x,
                    (true, true) => big_n,
                };
                base += b * wi;
            }
            let term = pow_neg(base, exponent);
            if ends.count_ones() % 2 == 1 {
                lhs.add(-term);
            } else {
                lhs.add(term);
            }
        }
    }

    let mut rhs = ComplexSum::new();
    for mask in 1u32..(1 << r) {
        let e: f64 = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        let bracket = pow_neg(a + big_n * e, exponent) - pow_neg(a + x * e, exponent);
        if mask.count_ones() % 2 == 1 {
            rhs.add(-bracket);
        } else {
            rhs.add(bracket);
        }
    }
    Ok((lhs.value(), rhs.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::validate_params;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_two_correction_matches_closed_form() {
        let (a, w1, w2, x) = (1.3, 0.8, 2.1, 17.0);
        let p = validate_params(a, &[w1, w2]).unwrap();
        let s = c(1.6, 4.0);
        let got = boundary_correction(&p, s, x, &EvalConfig::default()).unwrap();
        let pw = |b: f64| Complex64::new(b, 0.0).powc(2.0 - s);
        let want = (pw(a + x * w1) + pw(a + x * w2) - pw(a + x * w1 + x * w2))
            / ((s - 1.0) * (s - 2.0) * w1 * w2);
        assert!((got - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn rank_one_correction_shape() {
        let p = validate_params(1.0, &[1.0]).unwrap();
        let s = c(0.7, 9.0);
        let x = 30.0;
        let got = boundary_correction(&p, s, x, &EvalConfig::default()).unwrap();
        let want = Complex64::new(1.0 + x, 0.0).powc(1.0 - s) / (s - 1.0);
        assert!((got - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn real_arguments_give_real_correction() {
        let p = validate_params(0.4, &[1.0, 3.0, 0.5]).unwrap();
        let v = boundary_correction(&p, c(3.7, 0.0), 12.5, &EvalConfig::default()).unwrap();
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn block_sum_against_partial_sum() {
        let p = validate_params(1.0, &[1.0]).unwrap();
        let s = c(2.5, 0.0);
        let range = BoxRange::new(vec![(10.0, 1e4)]).unwrap();
        let b = em_block_sum(&p, s, &range, &EvalConfig::default()).unwrap();
        let exact: f64 = (10..=10_000).map(|m| (1.0 + m as f64).powf(-2.5)).sum();
        assert!((b.main_term.re - exact).abs() < b.remainder_estimate);
    }

    #[test]
    fn block_sum_r1_cube_closed_form() {
        let p = validate_params(0.6, &[1.7]).unwrap();
        let s = c(1.9, -3.0);
        let x = 40.0;
        let b = em_block_sum(
            &p,
            s,
            &BoxRange::cube(1, x).unwrap(),
            &EvalConfig::default(),
        )
        .unwrap();
        let pw = |base: f64| Complex64::new(base, 0.0).powc(1.0 - s);
        let want = (pw(0.6) - pw(0.6 + x * 1.7)) / ((s - 1.0) * 1.7);
        assert!((b.main_term - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn block_sum_real_for_real_s() {
        let p = validate_params(1.0, &[1.0, 2.0f64.sqrt()]).unwrap();
        let b = em_block_sum(
            &p,
            c(2.8, 0.0),
            &BoxRange::cube(2, 25.0).unwrap(),
            &EvalConfig::default(),
        )
        .unwrap();
        assert_eq!(b.main_term.im, 0.0);
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(matches!(
            BoxRange::new(vec![(5.0, 5.0)]),
            Err(Error::InvalidBox { axis: 0, .. })
        ));
        assert!(BoxRange::new(vec![(0.0, 1.0), (3.0, 2.0)]).is_err());
        assert!(BoxRange::new(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn identity_examples() {
        let p = validate_params(1.0, &[1.0, 2.0]).unwrap();
        let (l, r) = boundary_identity_check(&p, c(2.5, 3.0), 10.0, 100.0).unwrap();
        assert!((l - r).norm() <= 1e-12 * r.norm());
        let p = validate_params(0.5, &[1.0, 2f64.sqrt(), 3f64.sqrt()]).unwrap();
        let (l, r) = boundary_identity_check(&p, c(3.5, 7.0), 5.0, 50.0).unwrap();
        assert!((l - r).norm() <= 1e-12 * r.norm());
        let (l, r) = boundary_identity_check(&p, c(3.5, 7.0), 20.0, 20.0).unwrap();
        assert_eq!(r, Complex64::new(0.0, 0.0));
        assert!(l.norm() < 1e-15);
    }

    #[test]
    fn approx_preconditions() {
        let p = validate_params(1.0, &[1.0, 2.0]).unwrap();
        let cfg = EvalConfig::default();
        assert!(matches!(
            eval_approx(&p, c(0.9, 0.0), 10.0, &cfg),
            Err(Error::SigmaTooSmall { .. })
        ));
        assert!(matches!(
            eval_approx(&p, c(1.5, 40.0), 10.0, &cfg),
            Err(Error::TruncationTooShort { .. })
        ));
        assert!(matches!(
            eval_approx(&p, c(2.0, 0.0), 10.0, &cfg),
            Err(Error::NearPole { pole: 2, .. })
        ));
        let tight = EvalConfig {
            term_cap: 100.0,
            ..cfg
        };
        assert!(matches!(
            eval_approx(&p, c(1.5, 0.0), 10.0, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn approx_shape_in_critical_strip() {
        let p = validate_params(1.0, &[1.0]).unwrap();
        let r = eval_approx(&p, c(0.75, 50.0), 100.0, &EvalConfig::default()).unwrap();
        assert!(r.value.re.is_finite() && r.value.im.is_finite());
        assert_eq!(r.err_kind, ErrKind::HeuristicEstimate);
        assert_eq!(r.method, Method::ApproxFormula);
        assert_eq!(r.terms_used, 101);
    }

    #[test]
    fn box_sum_block_size_independent() {
        let p = validate_params(0.9, &[1.0, 1.3]).unwrap();
        let s = c(1.7, 11.0);
        let a = box_sum(&p, s, 300, 7);
        let b = box_sum(&p, s, 300, 128);
        assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}
