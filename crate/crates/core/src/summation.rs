//! Compensated accumulators.
//!
//! Long alternating and oscillating sums lose digits quickly in plain `f64`
//! addition. The accumulators here carry a Neumaier correction term so the
//! rounding error stays at a few ulps of the largest partial sum rather than
//! growing with the number of terms.

use num_complex::Complex64;
use std::iter::Sum;
use std::ops::AddAssign;

/// Neumaier (improved Kahan) summation of real values.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both correction terms.
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Component-wise Neumaier summation of complex values.
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

impl Sum<Complex64> for ComplexSum {
    fn sum<I: Iterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Pairwise (tree) reduction of per-block partial sums.
///
/// The reduction shape depends only on the number of blocks, so the result is
/// identical no matter which thread produced which block.
pub fn pairwise_reduce(mut parts: Vec<ComplexSum>) -> ComplexSum {
    if parts.is_empty() {
        return ComplexSum::new();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.chunks(2);
        for pair in &mut it {
            let mut acc = pair[0];
            if let Some(b) = pair.get(1) {
                acc.merge(b);
            }
            next.push(acc);
        }
        parts = next;
    }
    parts[0]
}
