use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest polynomial degree the library accepts. `n!` leaves double range at 171,
/// and Borel coefficients `k! a_k` must stay representable.
pub const DEGREE_CAP: usize = 100;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Estimated size of the discarded remainder of a truncated series on `|z| <= radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub radius: f64,
    pub bound: f64,
}

/// A polynomial, or a truncation of a power series, stored by ascending coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorPoly {
    pub coeffs: Vec<Complex64>,
    #[serde(default = "default_exact")]
    pub is_exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailEstimate>,
}

fn default_exact() -> bool {
    true
}

impl TaylorPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![ZERO] } else { coeffs };
        TaylorPoly { coeffs, is_exact: true, tail: None }
    }

    pub fn truncated(coeffs: Vec<Complex64>, tail: Option<TailEstimate>) -> Self {
        let mut p = Self::new(coeffs);
        p.is_exact = false;
        p.tail = tail;
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::new(vec![ZERO])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Stored length minus one. Trailing zeros count.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn check_cap(&self) -> Result<()> {
        let degree = self.degree();
        if degree > DEGREE_CAP {
            return Err(Error::DegreeCap { degree, cap: DEGREE_CAP });
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derive(&self) -> Self {
        let coeffs: Vec<Complex64> = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
        TaylorPoly { coeffs: if coeffs.is_empty() { vec![ZERO] } else { coeffs }, ..self.clone() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TaylorPoly { coeffs: self.coeffs.iter().map(|&c| c * s).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect();
        TaylorPoly { coeffs, is_exact: self.is_exact && other.is_exact, tail: self.tail.or(other.tail) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `f(z + a)`, computed by repeated synthetic division (Taylor shift).
    pub fn translate(&self, a: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        let d = c.len();
        for i in 0..d {
            for k in (i..d - 1).rev() {
                let upper = c[k + 1];
                c[k] += a * upper;
            }
        }
        TaylorPoly { coeffs: c, ..self.clone() }
    }

    /// Drop trailing zero coefficients (keeps at least the constant term).
    pub fn trimmed(&self) -> Self {
        let mut p = self.clone();
        p.coeffs.truncate(self.degree() + 1);
        p
    }

    /// Sum of `|a_k| r^k`, the natural scale for rounding errors at radius `r`.
    pub fn abs_sum(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// Geometric tail estimate from the last quartile of `|a_k| r^k`.
    ///
    /// The envelope of each half of the quartile gives a fitted ratio `q`; the
    /// remainder is bounded by `b q / (1 - q)` where `b` is the envelope of the
    /// trailing half, plus a rounding term proportional to [`abs_sum`](Self::abs_sum).
    /// Exact polynomials report zero; a ratio `>= 1` reports infinity.
    pub fn estimate_tail(&self, radius: f64) -> TailEstimate {
        if self.is_exact {
            return TailEstimate { radius, bound: 0.0 };
        }
        let mags: Vec<f64> = self.coeffs.iter().enumerate().map(|(k, c)| c.norm() * radius.powi(k as i32)).collect();
        let len = mags.len();
        let quart = (len / 4).max(2).min(len);
        let window = &mags[len - quart..];
        let half = window.len() / 2;
        let early = window[..half.max(1)].iter().cloned().fold(0.0, f64::max);
        let late = window[half.max(1)..].iter().cloned().fold(0.0, f64::max);
        let rounding = 64.0 * f64::EPSILON * mags.iter().sum::<f64>();
        let bound = if late == 0.0 {
            0.0
        } else if early == 0.0 {
            f64::INFINITY
        } else {
            let span = (window.len() - half.max(1)).max(1) as f64;
            let q = (late / early).powf(1.0 / span);
            if q >= 1.0 {
                f64::INFINITY
            } else {
                late * q / (1.0 - q)
            }
        };
        TailEstimate { radius, bound: bound + rounding }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Truncated Cauchy product through degree `m`.
pub(crate) fn mul_truncated(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; m + 1];
    for (i, &ai) in a.iter().enumerate().take(m + 1) {
        if ai == ZERO {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_at_zero_is_constant_term() {
        let p = TaylorPoly::new(vec![c(2.0, -1.0), c(3.0, 0.0), c(0.0, 5.0)]);
        assert_eq!(p.eval(ZERO), c(2.0, -1.0));
    }

    #[test]
    fn derivative_shifts_coefficients() {
        let p = TaylorPoly::from_real(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.derive().coeffs, TaylorPoly::from_real(&[2.0, 6.0, 12.0]).coeffs);
        assert_eq!(TaylorPoly::constant(c(7.0, 0.0)).derive().coeffs, vec![ZERO]);
    }

    #[test]
    fn trailing_zeros_do_not_change_values() {
        let p = TaylorPoly::from_real(&[1.0, -2.0]);
        let q = TaylorPoly::from_real(&[1.0, -2.0, 0.0, 0.0]);
        let z = c(0.3, 1.7);
        assert_eq!(p.eval(z), q.eval(z));
        assert_eq!(q.degree(), 1);
        assert_eq!(q.order(), 3);
    }

    #[test]
    fn translate_matches_binomial_expansion() {
        // (z+1)^2 = z^2 + 2z + 1
        let p = TaylorPoly::monomial(2, c(1.0, 0.0)).translate(c(1.0, 0.0));
        assert_eq!(p.coeffs, TaylorPoly::from_real(&[1.0, 2.0, 1.0]).coeffs);
        let f = TaylorPoly::new(vec![c(0.0, -1.0), ZERO, ZERO, c(1.0, 0.0)]);
        let a = c(0.5, -2.0);
        let z = c(-0.7, 0.4);
        assert!((f.translate(a).eval(z) - f.eval(z + a)).norm() < 1e-12);
    }

    #[test]
    fn exact_polynomials_have_no_tail() {
        let p = TaylorPoly::from_real(&[1.0, 1.0]);
        assert_eq!(p.estimate_tail(3.0).bound, 0.0);
    }

    #[test]
    fn exponential_tail_is_small_and_conservative() {
        let mut coeffs = vec![c(1.0, 0.0)];
        for k in 1..=20 {
            let prev = coeffs[k - 1];
            coeffs.push(prev / k as f64);
        }
        let p = TaylorPoly::truncated(coeffs, None);
        let est = p.estimate_tail(1.0);
        let actual = (std::f64::consts::E - p.eval(c(1.0, 0.0)).re).abs();
        assert!(est.bound >= actual, "{} < {}", est.bound, actual);
        assert!(est.bound < 1e-13);
    }

    #[test]
    fn cap_is_enforced() {
        let p = TaylorPoly::monomial(DEGREE_CAP + 1, c(1.0, 0.0));
        assert!(matches!(p.check_cap(), Err(Error::DegreeCap { .. })));
        assert!(TaylorPoly::monomial(DEGREE_CAP, c(1.0, 0.0)).check_cap().is_ok());
    }
}
