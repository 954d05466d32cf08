//! Barnes parameters, weight-structure analysis and representation counts.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Shift `a` and weights `w_1..w_r` of ζ_r(s, a, w). The rank `r` is always
/// `w.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarnesParams {
    a: f64,
    w: Vec<f64>,
}

impl BarnesParams {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn rank(&self) -> usize {
        self.w.len()
    }

    pub fn weight_sum(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn weight_product(&self) -> f64 {
        self.w.iter().product()
    }

    /// Same weights, different shift. Used by the scaling identities.
    pub fn with_shift(&self, a: f64) -> Result<Self> {
        validate_params(a, &self.w)
    }
}

/// Checks `a > 0`, every `w_i > 0` and `r >= 1`. Values are copied verbatim.
pub fn validate_params(a: f64, w: &[f64]) -> Result<BarnesParams> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::NonPositiveShift(a));
    }
    if w.is_empty() {
        return Err(Error::EmptyWeights);
    }
    for (index, &value) in w.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveWeight { index, value });
        }
    }
    Ok(BarnesParams { a, w: w.to_vec() })
}

/// One weight as supplied by a caller: an exact rational `p/q` or a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightLiteral {
    Exact(Ratio<u64>),
    Float(f64),
}

impl WeightLiteral {
    pub fn to_f64(&self) -> f64 {
        match *self {
            WeightLiteral::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            WeightLiteral::Float(x) => x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, WeightLiteral::Exact(_))
    }
}

impl fmt::Display for WeightLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightLiteral::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            WeightLiteral::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for WeightLiteral {
    type Err = Error;

    /// `"p/q"` parses as an exact rational, anything else as a decimal float.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let bad = || Error::InvalidArgument(format!("malformed rational weight {s:?}"));
            let num: u64 = num.trim().parse().map_err(|_| bad())?;
            let den: u64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            if num == 0 {
                return Err(Error::NonPositiveWeight {
                    index: 0,
                    value: 0.0,
                });
            }
            Ok(WeightLiteral::Exact(Ratio::new(num, den)))
        } else {
            s.parse::<f64>()
                .map(WeightLiteral::Float)
                .map_err(|_| Error::InvalidArgument(format!("malformed weight {s:?}")))
        }
    }
}

/// Parses a comma-separated weight list such as `"1,1/2,1.414"`.
pub fn parse_weight_list(s: &str) -> Result<Vec<WeightLiteral>> {
    s.split(',').map(str::parse).collect()
}

/// Caller's explicit statement about the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredMode {
    Independent,
    Rational,
}

impl FromStr for DeclaredMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(DeclaredMode::Independent),
            "rational" => Ok(DeclaredMode::Rational),
            other => Err(Error::InvalidArgument(format!(
                "weights mode must be independent or rational, got {other:?}"
            ))),
        }
    }
}

/// Whether the diagonal condition m·w = n·w collapses to m = n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightStructure {
    AssumedIndependent,
    /// `w_i = p_i / q` in lowest joint terms.
    Rational {
        q: u64,
        p: Vec<u64>,
    },
}

/// Classifies a weight list.
///
/// Exact rationals become `Rational` with `q` the lcm of the reduced
/// denominators. Floats are never inferred to be rationally dependent. A list
/// mixing two or more exact rationals with floats is rejected because those
/// rationals are dependent with each other while the floats are not exact.
pub fn analyze_weights(
    w: &[WeightLiteral],
    declared: Option<DeclaredMode>,
) -> Result<WeightStructure> {
    if w.is_empty() {
        return Err(Error::EmptyWeights);
    }
    for (index, lit) in w.iter().enumerate() {
        let value = lit.to_f64();
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveWeight { index, value });
        }
    }
    let exact = w.iter().filter(|l| l.is_exact()).count();
    match declared {
        Some(DeclaredMode::Independent) => Ok(WeightStructure::AssumedIndependent),
        Some(DeclaredMode::Rational) => {
            if let Some(bad) = w.iter().find(|l| !l.is_exact()) {
                return Err(Error::ConflictingDeclaration(bad.to_string()));
            }
            rational_structure(w)
        }
        None if exact == w.len() => rational_structure(w),
        None if exact >= 2 => Err(Error::UnsupportedWeightStructure { exact }),
        None => Ok(WeightStructure::AssumedIndependent),
    }
}

fn rational_structure(w: &[WeightLiteral]) -> Result<WeightStructure> {
    let ratios: Vec<Ratio<u64>> = w
        .iter()
        .map(|l| match l {
            WeightLiteral::Exact(r) => *r,
            WeightLiteral::Float(_) => unreachable!("checked by caller"),
        })
        .collect();
    let q = ratios.iter().fold(1u64, |acc, r| acc.lcm(r.denom()));
    let p = ratios
        .iter()
        .map(|r| {
            (q / r.denom())
                .checked_mul(*r.numer())
                .ok_or_else(|| Error::InvalidArgument("rational weights too large".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightStructure::Rational { q, p })
}

/// Number of nonnegative integer solutions of Σ m_i p_i = k.
///
/// Coin-change dynamic programming over a table of size `k + 1`.
pub fn denumerant(p: &[u64], k: u64) -> Result<u128> {
    Ok(denumerant_table(p, k)?[k as usize])
}

/// All counts R(0..=k) at once.
pub fn denumerant_table(p: &[u64], k: u64) -> Result<Vec<u128>> {
    if p.contains(&0) {
        return Err(Error::InvalidArgument(
            "denumerant parts must be >= 1".into(),
        ));
    }
    let len = usize::try_from(k)
        .ok()
        .and_then(|k| k.checked_add(1))
        .ok_or(Error::Overflow { k })?;
    let mut table = vec![0u128; len];
    table[0] = 1;
    for &part in p {
        let part = part as usize;
        for j in part..len {
            table[j] = table[j]
                .checked_add(table[j - part])
                .ok_or(Error::Overflow { k: j as u64 })?;
        }
    }
    Ok(table)
}

#[cfg(test)]
// Truncated square roots are the literal inputs under test.
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn exact(n: u64, d: u64) -> WeightLiteral {
        WeightLiteral::Exact(Ratio::new(n, d))
    }

    #[test]
    fn valid_params_pass_through() {
        let p = validate_params(1.0, &[1.0, 1.41421356]).unwrap();
        assert_eq!(p.a(), 1.0);
        assert_eq!(p.weights(), &[1.0, 1.41421356]);
        assert_eq!(p.rank(), 2);
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(
            validate_params(0.0, &[1.0]),
            Err(Error::NonPositiveShift(0.0))
        );
        assert_eq!(validate_params(1.0, &[]), Err(Error::EmptyWeights));
        assert!(matches!(
            validate_params(1.0, &[1.0, -2.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(validate_params(f64::NAN, &[1.0]).is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let s = analyze_weights(&[exact(1, 1), exact(1, 2)], None).unwrap();
        assert_eq!(
            s,
            WeightStructure::Rational {
                q: 2,
                p: vec![2, 1]
            }
        );
        let s = analyze_weights(&[exact(3, 4), exact(5, 6)], None).unwrap();
        assert_eq!(
            s,
            WeightStructure::Rational {
                q: 12,
                p: vec![9, 10]
            }
        );
    }

    #[test]
    fn floats_are_never_rational() {
        let w = [
            WeightLiteral::Float(1.0),
            WeightLiteral::Float(1.4142135623),
        ];
        assert_eq!(
            analyze_weights(&w, None).unwrap(),
            WeightStructure::AssumedIndependent
        );
        assert!(matches!(
            analyze_weights(&w, Some(DeclaredMode::Rational)),
            Err(Error::ConflictingDeclaration(_))
        ));
    }

    #[test]
    fn mixed_exact_and_float_is_unsupported() {
        let w = [exact(1, 2), exact(1, 3), WeightLiteral::Float(1.414)];
        assert!(matches!(
            analyze_weights(&w, None),
            Err(Error::UnsupportedWeightStructure { exact: 2 })
        ));
        let w = [exact(1, 2), WeightLiteral::Float(1.414)];
        assert_eq!(
            analyze_weights(&w, None).unwrap(),
            WeightStructure::AssumedIndependent
        );
    }

    #[test]
    fn parses_literals() {
        let w = parse_weight_list("1, 2/4 ,1.5").unwrap();
        assert_eq!(w[0], WeightLiteral::Float(1.0));
        assert_eq!(w[1], exact(1, 2));
        assert_eq!(w[2], WeightLiteral::Float(1.5));
        assert!(parse_weight_list("1/0").is_err());
        assert!(parse_weight_list("x").is_err());
    }

    #[test]
    fn denumerant_examples() {
        assert_eq!(denumerant(&[1, 2], 4).unwrap(), 3);
        assert_eq!(denumerant(&[1], 7).unwrap(), 1);
        assert_eq!(denumerant(&[2, 3], 1).unwrap(), 0);
        assert_eq!(denumerant(&[4, 9, 6], 0).unwrap(), 1);
    }

    #[test]
    fn denumerant_overflow_is_reported() {
        // R(k) for 40 unit parts grows like k^39 / 39!.
        let p = vec![1u64; 40];
        assert!(matches!(
            denumerant(&p, 100_000),
            Err(Error::Overflow { .. })
        ));
    }
}
