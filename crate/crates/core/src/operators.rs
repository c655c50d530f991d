//! Convolution operators `Phi_n(D)` acting on polynomials and truncated series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{evaluate, taylor_coeffs, FunctionExpr, IndexAffine, SeqScalar, TaylorPoly};

/// `n -> Phi_n(D)`, backed by an expression with a free index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSequence {
    pub label: String,
    pub expr: FunctionExpr,
    #[serde(default = "default_n_start")]
    pub n_start: usize,
}

fn default_n_start() -> usize {
    1
}

impl OperatorSequence {
    pub fn new(label: impl Into<String>, expr: FunctionExpr) -> Self {
        OperatorSequence { label: label.into(), expr, n_start: 1 }
    }

    /// `Phi_n(t)`, with `Phi_0 = 1`.
    pub fn symbol(&self, n: usize, t: Complex64) -> Result<Complex64> {
        evaluate(&self.expr, n, t)
    }
}

/// `c_n * Phi^n` as an expression with free index `n`.
pub fn operator_power_expr(base: &FunctionExpr, scalar: SeqScalar) -> FunctionExpr {
    FunctionExpr::seq(scalar) * FunctionExpr::pow(base.clone(), IndexAffine::N)
}

/// `(Phi_n(D) f)(z) = sum_j h_j f^{(j)}(z)` where `Phi_n = sum_j h_j z^j`.
///
/// The sum stops at `f.order()`, so the result is exact when `f` is a genuine
/// polynomial. A truncated `f` gives a truncated result of the same order whose
/// tail estimate is recomputed at the radius of the input's tail.
pub fn apply_operator(seq: &OperatorSequence, n: usize, f: &TaylorPoly) -> Result<TaylorPoly> {
    if n == 0 {
        return Ok(f.clone());
    }
    let order = f.order();
    if order > crate::series::DEGREE_CAP {
        return Err(Error::DegreeCap { degree: order, cap: crate::series::DEGREE_CAP });
    }
    let h = taylor_coeffs(&seq.expr, n, order)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut deriv = f.clone();
    for (j, &hj) in h.coeffs.iter().enumerate() {
        if j > 0 {
            deriv = deriv.derive();
        }
        if hj != Complex64::new(0.0, 0.0) {
            for (a, &d) in acc.iter_mut().zip(&deriv.coeffs) {
                *a += hj * d;
            }
        }
    }
    if acc.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::overflow(format!("{}(D) applied at n = {n}", seq.label)));
    }
    if f.is_exact {
        Ok(TaylorPoly::new(acc))
    } else {
        let mut out = TaylorPoly::truncated(acc, None);
        let radius = f.tail.map(|t| t.radius).unwrap_or(1.0);
        out.tail = Some(out.estimate_tail(radius));
        Ok(out)
    }
}

/// Max over `samples` of `|Phi_n(D)(tau_a f) - tau_a(Phi_n(D) f)|`.
pub fn commutation_check(
    seq: &OperatorSequence,
    n: usize,
    a: Complex64,
    f: &TaylorPoly,
    samples: &[Complex64],
) -> Result<f64> {
    if !f.is_exact {
        return Err(Error::invalid("commutation check needs an exact polynomial"));
    }
    let translate_then_apply = apply_operator(seq, n, &f.translate(a))?;
    let apply_then_translate = apply_operator(seq, n, f)?.translate(a);
    Ok(samples
        .iter()
        .map(|&z| (translate_then_apply.eval(z) - apply_then_translate.eval(z)).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn translation() -> OperatorSequence {
        OperatorSequence::new("tau_1", FunctionExpr::exp(FunctionExpr::real(1.0)))
    }

    fn z_exp9() -> OperatorSequence {
        OperatorSequence::new(
            "z + e^z/9",
            FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * FunctionExpr::exp(FunctionExpr::real(1.0)),
        )
    }

    fn close(a: &TaylorPoly, b: &TaylorPoly, tol: f64) -> bool {
        let len = a.coeffs.len().max(b.coeffs.len());
        (0..len).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol)
    }

    #[test]
    fn translation_shifts_argument() {
        let out = apply_operator(&translation(), 1, &TaylorPoly::monomial(2, c(1.0, 0.0))).unwrap();
        assert!(close(&out, &TaylorPoly::from_real(&[1.0, 2.0, 1.0]), 1e-14));
        assert!(out.is_exact);
    }

    #[test]
    fn index_zero_is_identity() {
        let f = TaylorPoly::new(vec![c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(apply_operator(&z_exp9(), 0, &f).unwrap(), f);
    }

    #[test]
    fn termwise_oracle_for_z_plus_exp() {
        // D z = 1 and (1/9) tau_1 z = (z + 1)/9
        let out = apply_operator(&z_exp9(), 1, &TaylorPoly::monomial(1, c(1.0, 0.0))).unwrap();
        assert!(close(&out, &TaylorPoly::from_real(&[1.0 + 1.0 / 9.0, 1.0 / 9.0]), 1e-15));
    }

    #[test]
    fn power_expr_examples() {
        let one = SeqScalar::Constant { value: c(1.0, 0.0) };
        let d3 = OperatorSequence::new("D^n", operator_power_expr(&FunctionExpr::z(), one.clone()));
        let out = apply_operator(&d3, 3, &TaylorPoly::monomial(5, c(1.0, 0.0))).unwrap();
        assert!(close(&out, &TaylorPoly::monomial(2, c(60.0, 0.0)), 1e-12));

        let tau = OperatorSequence::new("tau^n", operator_power_expr(&FunctionExpr::exp(FunctionExpr::real(1.0)), one));
        let out = apply_operator(&tau, 2, &TaylorPoly::monomial(1, c(1.0, 0.0))).unwrap();
        assert!(close(&out, &TaylorPoly::from_real(&[2.0, 1.0]), 1e-14));

        let geo = SeqScalar::Geometric { ratio: c(2.0, 0.0) };
        let scaled = OperatorSequence::new("2^n D^n", operator_power_expr(&FunctionExpr::z(), geo));
        let out = apply_operator(&scaled, 2, &TaylorPoly::monomial(2, c(1.0, 0.0))).unwrap();
        assert!(close(&out, &TaylorPoly::constant(c(8.0, 0.0)), 1e-14));
    }

    #[test]
    fn truncated_input_gives_annotated_result() {
        let f = TaylorPoly::truncated(vec![c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)], None);
        let out = apply_operator(&translation(), 1, &f).unwrap();
        assert!(!out.is_exact);
        assert!(out.tail.is_some());
        assert_eq!(out.order(), 2);
    }

    #[test]
    fn degree_cap() {
        let f = TaylorPoly::monomial(101, c(1.0, 0.0));
        assert!(matches!(apply_operator(&translation(), 1, &f), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn commutation_examples() {
        let grid: Vec<Complex64> =
            (0..5).flat_map(|i| (0..5).map(move |j| c(-1.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64))).collect();
        let d = OperatorSequence::new("D", FunctionExpr::z());
        let dev = commutation_check(&d, 1, c(1.0, 0.0), &TaylorPoly::monomial(2, c(1.0, 0.0)), &grid).unwrap();
        assert!(dev < 1e-14);
        let dev = commutation_check(&z_exp9(), 1, c(0.0, 1.0), &TaylorPoly::monomial(3, c(1.0, 0.0)), &grid).unwrap();
        assert!(dev <= 1e-9);
        let dev =
            commutation_check(&z_exp9(), 0, c(3.0, -2.0), &TaylorPoly::from_real(&[1.0, 2.0, 3.0]), &grid).unwrap();
        assert!(dev < 1e-12);
    }
}
