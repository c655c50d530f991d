//! Expression trees for index-dependent entire functions `n -> Phi_n(z)`.
//!
//! The JSON form is internally tagged by `kind`:
//!
//! ```json
//! {"kind": "add",
//!  "left":  {"kind": "mul", "left": {"kind": "seq", "seq": {"tag": "geometric", "ratio": [5.0, 0.0]}},
//!                           "right": {"kind": "pow", "base": {"kind": "z"}, "exponent": {"scale": 1, "offset": 0}}},
//!  "right": {"kind": "mul", "left": {"kind": "seq", "seq": {"tag": "geometric", "ratio": [0.1111111111111111, 0.0]}},
//!                           "right": {"kind": "exp", "scale": {"kind": "seq", "seq": {"tag": "power", "exponent": 1.0}}}}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs.

use std::fmt;
use std::ops;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{mul_truncated, TaylorPoly};
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Catalog of index-dependent scalars `c_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqScalar {
    /// `c`
    Constant { value: Complex64 },
    /// `r^n`
    Geometric { ratio: Complex64 },
    /// `log(n + 1)`; the shift keeps `c_1` nonzero.
    LogShifted,
    /// `n^p`
    Power { exponent: f64 },
    /// `values[n]`
    List { values: Vec<Complex64> },
    /// `n!`
    Factorial,
}

impl SeqScalar {
    pub fn value(&self, n: usize) -> Result<Complex64> {
        let v = match self {
            SeqScalar::Constant { value } => *value,
            SeqScalar::Geometric { ratio } => ratio.powi(n as i32),
            SeqScalar::LogShifted => Complex64::new(((n + 1) as f64).ln(), 0.0),
            SeqScalar::Power { exponent } => Complex64::new((n as f64).powf(*exponent), 0.0),
            SeqScalar::List { values } => *values.get(n).ok_or(Error::Index { n, len: values.len() })?,
            SeqScalar::Factorial => Complex64::new(ln_factorial(n).exp(), 0.0),
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::overflow(format!("c_{n} of {self}")));
        }
        Ok(v)
    }

    /// `ln |c_n|`, computed without forming `c_n` where the tag allows it.
    pub fn log_abs(&self, n: usize) -> Result<f64> {
        let v = match self {
            SeqScalar::Geometric { ratio } => n as f64 * ratio.norm().ln(),
            SeqScalar::LogShifted => ((n + 1) as f64).ln().ln(),
            SeqScalar::Power { exponent } => exponent * (n as f64).ln(),
            SeqScalar::Factorial => ln_factorial(n),
            SeqScalar::Constant { .. } | SeqScalar::List { .. } => self.value(n)?.norm().ln(),
        };
        if v == f64::NEG_INFINITY {
            return Err(Error::ZeroScalar { n });
        }
        Ok(v)
    }
}

impl fmt::Display for SeqScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqScalar::Constant { value } => write!(f, "{value}"),
            SeqScalar::Geometric { ratio } => write!(f, "({ratio})^n"),
            SeqScalar::LogShifted => write!(f, "log(n+1)"),
            SeqScalar::Power { exponent } => write!(f, "n^{exponent}"),
            SeqScalar::List { values } => write!(f, "list[{}]", values.len()),
            SeqScalar::Factorial => write!(f, "n!"),
        }
    }
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Integer exponent `scale * n + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexAffine {
    pub scale: i64,
    pub offset: i64,
}

impl IndexAffine {
    /// The exponent `n`.
    pub const N: IndexAffine = IndexAffine { scale: 1, offset: 0 };

    pub fn fixed(k: u32) -> Self {
        IndexAffine { scale: 0, offset: k as i64 }
    }

    pub fn at(&self, n: usize) -> Result<u32> {
        let k = self.scale * n as i64 + self.offset;
        u32::try_from(k).map_err(|_| Error::invalid(format!("exponent {k} at n = {n} is not a nonnegative integer")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionExpr {
    Z {},
    Const {
        value: Complex64,
    },
    Seq {
        seq: SeqScalar,
    },
    Add {
        left: Box<FunctionExpr>,
        right: Box<FunctionExpr>,
    },
    Mul {
        left: Box<FunctionExpr>,
        right: Box<FunctionExpr>,
    },
    Pow {
        base: Box<FunctionExpr>,
        exponent: IndexAffine,
    },
    /// `exp(a_n z)`; `scale` must not depend on `z`.
    Exp {
        scale: Box<FunctionExpr>,
    },
}

impl FunctionExpr {
    pub fn z() -> Self {
        FunctionExpr::Z {}
    }

    pub fn constant(value: Complex64) -> Self {
        FunctionExpr::Const { value }
    }

    pub fn real(x: f64) -> Self {
        FunctionExpr::Const { value: Complex64::new(x, 0.0) }
    }

    pub fn seq(seq: SeqScalar) -> Self {
        FunctionExpr::Seq { seq }
    }

    pub fn pow(base: FunctionExpr, exponent: IndexAffine) -> Self {
        FunctionExpr::Pow { base: Box::new(base), exponent }
    }

    pub fn powi(base: FunctionExpr, k: u32) -> Self {
        Self::pow(base, IndexAffine::fixed(k))
    }

    /// `exp(scale * z)`
    pub fn exp(scale: FunctionExpr) -> Self {
        FunctionExpr::Exp { scale: Box::new(scale) }
    }

    pub fn depends_on_z(&self) -> bool {
        match self {
            FunctionExpr::Z {} => true,
            FunctionExpr::Const { .. } | FunctionExpr::Seq { .. } => false,
            FunctionExpr::Add { left, right } | FunctionExpr::Mul { left, right } => {
                left.depends_on_z() || right.depends_on_z()
            }
            FunctionExpr::Pow { base, .. } => base.depends_on_z(),
            FunctionExpr::Exp { .. } => true,
        }
    }

    /// Structural checks: every `Exp` scale is free of `z`.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionExpr::Z {} | FunctionExpr::Const { .. } | FunctionExpr::Seq { .. } => Ok(()),
            FunctionExpr::Add { left, right } | FunctionExpr::Mul { left, right } => {
                left.validate()?;
                right.validate()
            }
            FunctionExpr::Pow { base, .. } => base.validate(),
            FunctionExpr::Exp { scale } => {
                if scale.depends_on_z() {
                    return Err(Error::invalid("exp scale must not depend on z"));
                }
                scale.validate()
            }
        }
    }

    /// Value of the tree at `(n, z)` without the `Phi_0 = 1` convention.
    pub fn eval_raw(&self, n: usize, z: Complex64) -> Result<Complex64> {
        let v = match self {
            FunctionExpr::Z {} => z,
            FunctionExpr::Const { value } => *value,
            FunctionExpr::Seq { seq } => seq.value(n)?,
            FunctionExpr::Add { left, right } => left.eval_raw(n, z)? + right.eval_raw(n, z)?,
            FunctionExpr::Mul { left, right } => left.eval_raw(n, z)? * right.eval_raw(n, z)?,
            FunctionExpr::Pow { base, exponent } => {
                let k = exponent.at(n)?;
                let b = base.eval_raw(n, z)?;
                if k == 0 {
                    ONE
                } else {
                    b.powu(k)
                }
            }
            FunctionExpr::Exp { scale } => {
                if scale.depends_on_z() {
                    return Err(Error::invalid("exp scale must not depend on z"));
                }
                let a = scale.eval_raw(n, ZERO)?;
                let v = (a * z).exp();
                if v == ZERO {
                    return Err(Error::overflow(format!("exp({a} z) underflows at z = {z}")));
                }
                v
            }
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::overflow(format!("{self} at n = {n}, z = {z}")));
        }
        Ok(v)
    }

    /// Degree in `z` at index `n` when the tree is a polynomial there.
    pub fn poly_degree(&self, n: usize) -> Option<usize> {
        match self {
            FunctionExpr::Z {} => Some(1),
            FunctionExpr::Const { .. } | FunctionExpr::Seq { .. } => Some(0),
            FunctionExpr::Add { left, right } => Some(left.poly_degree(n)?.max(right.poly_degree(n)?)),
            FunctionExpr::Mul { left, right } => Some(left.poly_degree(n)? + right.poly_degree(n)?),
            FunctionExpr::Pow { base, exponent } => {
                let k = exponent.at(n).ok()? as usize;
                if k == 0 {
                    Some(0)
                } else {
                    Some(base.poly_degree(n)? * k)
                }
            }
            FunctionExpr::Exp { scale } => match scale.eval_raw(n, ZERO) {
                Ok(a) if a == ZERO => Some(0),
                _ => None,
            },
        }
    }

    /// Taylor coefficients at the origin through degree `m`, without the `Phi_0` convention.
    pub fn series_raw(&self, n: usize, m: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; m + 1];
        match self {
            FunctionExpr::Z {} => {
                if m >= 1 {
                    out[1] = ONE;
                }
            }
            FunctionExpr::Const { value } => out[0] = *value,
            FunctionExpr::Seq { seq } => out[0] = seq.value(n)?,
            FunctionExpr::Add { left, right } => {
                let a = left.series_raw(n, m)?;
                let b = right.series_raw(n, m)?;
                for k in 0..=m {
                    out[k] = a[k] + b[k];
                }
            }
            FunctionExpr::Mul { left, right } => {
                let a = left.series_raw(n, m)?;
                let b = right.series_raw(n, m)?;
                out = mul_truncated(&a, &b, m);
            }
            FunctionExpr::Pow { base, exponent } => {
                let mut k = exponent.at(n)?;
                let mut acc = out.clone();
                acc[0] = ONE;
                let mut sq = base.series_raw(n, m)?;
                while k > 0 {
                    if k & 1 == 1 {
                        acc = mul_truncated(&acc, &sq, m);
                    }
                    k >>= 1;
                    if k > 0 {
                        sq = mul_truncated(&sq, &sq, m);
                    }
                }
                out = acc;
            }
            FunctionExpr::Exp { scale } => {
                if scale.depends_on_z() {
                    return Err(Error::invalid("exp scale must not depend on z"));
                }
                let a = scale.eval_raw(n, ZERO)?;
                out[0] = ONE;
                for k in 1..=m {
                    out[k] = out[k - 1] * a / k as f64;
                }
            }
        }
        if out.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::overflow(format!("Taylor coefficients of {self} at n = {n}")));
        }
        Ok(out)
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionExpr::Z {} => write!(f, "z"),
            FunctionExpr::Const { value } => {
                if value.im == 0.0 {
                    write!(f, "{}", value.re)
                } else {
                    write!(f, "({value})")
                }
            }
            FunctionExpr::Seq { seq } => write!(f, "{seq}"),
            FunctionExpr::Add { left, right } => write!(f, "({left} + {right})"),
            FunctionExpr::Mul { left, right } => write!(f, "{left}*{right}"),
            FunctionExpr::Pow { base, exponent } => match (exponent.scale, exponent.offset) {
                (0, k) => write!(f, "{base}^{k}"),
                (1, 0) => write!(f, "{base}^n"),
                (s, o) => write!(f, "{base}^({s}n{o:+})"),
            },
            FunctionExpr::Exp { scale } => write!(f, "exp({scale} z)"),
        }
    }
}

impl ops::Add for FunctionExpr {
    type Output = FunctionExpr;
    fn add(self, rhs: FunctionExpr) -> FunctionExpr {
        FunctionExpr::Add { left: Box::new(self), right: Box::new(rhs) }
    }
}

impl ops::Mul for FunctionExpr {
    type Output = FunctionExpr;
    fn mul(self, rhs: FunctionExpr) -> FunctionExpr {
        FunctionExpr::Mul { left: Box::new(self), right: Box::new(rhs) }
    }
}

/// `Phi_n(z)`, with `Phi_0 = 1` identically.
pub fn evaluate(expr: &FunctionExpr, n: usize, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Ok(ONE);
    }
    expr.eval_raw(n, z)
}

/// Taylor coefficients of `Phi_n` through degree `m`.
///
/// Exact when `Phi_n` is a polynomial of degree `<= m`; otherwise the result is
/// flagged as a truncation and carries a tail estimate on the unit disk.
pub fn taylor_coeffs(expr: &FunctionExpr, n: usize, m: usize) -> Result<TaylorPoly> {
    if n == 0 {
        let mut coeffs = vec![ZERO; m + 1];
        coeffs[0] = ONE;
        return Ok(TaylorPoly::new(coeffs));
    }
    let coeffs = expr.series_raw(n, m)?;
    match expr.poly_degree(n) {
        Some(d) if d <= m => Ok(TaylorPoly::new(coeffs)),
        _ => {
            let mut p = TaylorPoly::truncated(coeffs, None);
            p.tail = Some(p.estimate_tail(1.0));
            Ok(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_plus_exp_over_9() -> FunctionExpr {
        FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * FunctionExpr::exp(FunctionExpr::real(1.0))
    }

    fn five_n_family() -> FunctionExpr {
        let mono = FunctionExpr::seq(SeqScalar::Geometric { ratio: c(5.0, 0.0) })
            * FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N);
        let expo = FunctionExpr::seq(SeqScalar::Geometric { ratio: c(1.0 / 9.0, 0.0) })
            * FunctionExpr::exp(FunctionExpr::seq(SeqScalar::Power { exponent: 1.0 }));
        mono + expo
    }

    #[test]
    fn evaluate_examples() {
        let v = evaluate(&z_plus_exp_over_9(), 1, ZERO).unwrap();
        assert!((v - c(1.0 / 9.0, 0.0)).norm() < 1e-15);
        assert_eq!(evaluate(&z_plus_exp_over_9(), 0, c(17.0, -3.0)).unwrap(), ONE);
        let v = evaluate(&five_n_family(), 2, ZERO).unwrap();
        assert!((v - c(1.0 / 81.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exhausted_list_is_an_index_error() {
        let e = FunctionExpr::seq(SeqScalar::List { values: vec![ONE, ONE] });
        assert!(evaluate(&e, 1, ZERO).is_ok());
        assert_eq!(evaluate(&e, 2, ZERO), Err(Error::Index { n: 2, len: 2 }));
    }

    #[test]
    fn overflow_is_reported() {
        let e = FunctionExpr::exp(FunctionExpr::real(1.0));
        assert!(matches!(evaluate(&e, 1, c(800.0, 0.0)), Err(Error::Overflow { .. })));
        assert!(matches!(evaluate(&e, 1, c(-800.0, 0.0)), Err(Error::Overflow { .. })));
    }

    #[test]
    fn exp_scale_must_be_z_free() {
        let bad = FunctionExpr::exp(FunctionExpr::z());
        assert!(bad.validate().is_err());
        assert!(evaluate(&bad, 1, ONE).is_err());
    }

    #[test]
    fn taylor_examples() {
        let p = taylor_coeffs(&FunctionExpr::exp(FunctionExpr::real(2.0)), 1, 3).unwrap();
        let want = [1.0, 2.0, 2.0, 4.0 / 3.0];
        for (got, w) in p.coeffs.iter().zip(want) {
            assert!((got - c(w, 0.0)).norm() < 1e-15);
        }
        assert!(!p.is_exact);

        let p = taylor_coeffs(&z_plus_exp_over_9(), 1, 2).unwrap();
        let want = [1.0 / 9.0, 1.0 + 1.0 / 9.0, 1.0 / 18.0];
        for (got, w) in p.coeffs.iter().zip(want) {
            assert!((got - c(w, 0.0)).norm() < 1e-15);
        }

        let p = taylor_coeffs(&five_n_family(), 1, 1).unwrap();
        let want = [1.0 / 9.0, 5.0 + 1.0 / 9.0];
        for (got, w) in p.coeffs.iter().zip(want) {
            assert!((got - c(w, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn polynomial_series_are_exact() {
        let e = FunctionExpr::pow(FunctionExpr::z() + FunctionExpr::real(1.0), IndexAffine::N);
        let p = taylor_coeffs(&e, 3, 5).unwrap();
        assert!(p.is_exact);
        assert_eq!(p.coeffs[..4], TaylorPoly::from_real(&[1.0, 3.0, 3.0, 1.0]).coeffs[..]);
        assert!(!taylor_coeffs(&e, 3, 2).unwrap().is_exact);
    }

    #[test]
    fn seq_catalog_values() {
        assert_eq!(SeqScalar::LogShifted.value(1).unwrap(), c(2f64.ln(), 0.0));
        assert_eq!(SeqScalar::Factorial.value(5).unwrap().re.round(), 120.0);
        assert_eq!(SeqScalar::Power { exponent: 2.0 }.value(3).unwrap(), c(9.0, 0.0));
        assert!(matches!(SeqScalar::LogShifted.log_abs(0), Err(Error::ZeroScalar { n: 0 })));
        assert!((SeqScalar::Factorial.log_abs(10_000).unwrap() - 82108.92783681436).abs() < 1e-6);
    }

    #[test]
    fn json_shape() {
        let e = z_plus_exp_over_9();
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.starts_with(r#"{"kind":"add","left":{"kind":"z"}"#), "{s}");
        let back: FunctionExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        let bad = r#"{"kind":"z","extra":1}"#;
        assert!(serde_json::from_str::<FunctionExpr>(bad).is_err());
    }
}
