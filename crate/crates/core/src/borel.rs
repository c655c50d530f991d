//! Borel transforms of polynomials, Polya reconstruction, and the contour-integral
//! right inverse `S_n` of `Phi_n(D)`.
//!
//! Every contour integral here has the form
//! `(1/2 pi i) oint_{|t|=R} e^{zt} g(t) dt`, discretized by the trapezoidal rule on
//! `M` equispaced nodes. For a kernel analytic near the circle the rule converges
//! geometrically, so `M` is doubled until two successive estimates agree.

use std::f64::consts::E;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorSequence;
use crate::series::circle::{check_nodes, circle_nodes};
use crate::series::expr::ln_factorial;
use crate::series::{local_dip, TailEstimate, TaylorPoly, DEGREE_CAP};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative floor below which a sampled divisor counts as vanishing.
pub const NEAR_ZERO_RATIO: f64 = 1e-8;

/// Borel transform `sum_k k! a_k t^{-(k+1)}` of a polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelRational {
    source: TaylorPoly,
    coeffs: Vec<Complex64>,
    log_coeffs: Vec<(f64, f64)>,
}

impl BorelRational {
    pub fn new(p: &TaylorPoly) -> Result<Self> {
        let source = p.trimmed();
        source.check_cap()?;
        let log_coeffs: Vec<(f64, f64)> =
            source.coeffs.iter().enumerate().map(|(k, a)| (ln_factorial(k) + a.norm().ln(), a.arg())).collect();
        let coeffs = log_coeffs
            .iter()
            .zip(&source.coeffs)
            .map(|(&(lm, ph), a)| if *a == ZERO { ZERO } else { Complex64::from_polar(lm.exp(), ph) })
            .collect();
        Ok(BorelRational { source, coeffs, log_coeffs })
    }

    pub fn source(&self) -> &TaylorPoly {
        &self.source
    }

    /// `k! a_k`
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, t: Complex64) -> Result<Complex64> {
        if t == ZERO {
            return Err(Error::Pole);
        }
        let w = t.inv();
        let horner = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c) * w;
        if horner.re.is_finite() && horner.im.is_finite() {
            return Ok(horner);
        }
        self.eval_log_scaled(t)
    }

    /// Sum of the terms in log-magnitude/phase form, for radii where Horner overflows.
    fn eval_log_scaled(&self, t: Complex64) -> Result<Complex64> {
        let (lr, ar) = (t.norm().ln(), t.arg());
        let terms: Vec<(f64, f64)> = self
            .log_coeffs
            .iter()
            .enumerate()
            .filter(|(_, (lm, _))| lm.is_finite())
            .map(|(k, &(lm, ph))| (lm - (k + 1) as f64 * lr, ph - (k + 1) as f64 * ar))
            .collect();
        let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(ZERO);
        }
        let sum: Complex64 = terms.iter().map(|&(lm, ph)| Complex64::from_polar((lm - top).exp(), ph)).sum();
        let out = sum * top.exp();
        if !(out.re.is_finite() && out.im.is_finite()) {
            return Err(Error::overflow(format!("Borel transform at t = {t}")));
        }
        Ok(out)
    }
}

pub fn borel_eval(b: &BorelRational, t: Complex64) -> Result<Complex64> {
    b.eval(t)
}

/// Trapezoidal rule on `|t| = radius`, starting at `nodes` and doubling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Starting node count.
    #[serde(default = "default_nodes", alias = "M0")]
    pub nodes: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_doublings")]
    pub max_doublings: u32,
}

fn default_radius() -> f64 {
    1.0
}
fn default_nodes() -> usize {
    64
}
fn default_tol() -> f64 {
    1e-12
}
fn default_doublings() -> u32 {
    8
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radius: default_radius(),
            nodes: default_nodes(),
            tol: default_tol(),
            max_doublings: default_doublings(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_radius(self, radius: f64) -> Self {
        QuadratureSpec { radius, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_nodes(self.nodes)?;
        if !(self.radius > 0.0) {
            return Err(Error::invalid(format!("contour radius {} must be positive", self.radius)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("quadrature tolerance must be positive"));
        }
        Ok(())
    }
}

/// A converged contour integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureValue {
    pub value: Complex64,
    /// `|I_M - I_{M/2}|` at the accepted node count.
    pub error_estimate: f64,
    pub nodes: usize,
    /// Mean absolute integrand, the scale against which `tol` is measured.
    pub scale: f64,
    /// `(M, I_M)` for every node count tried.
    pub estimates: Vec<(usize, Complex64)>,
}

impl QuadratureValue {
    fn exact(value: Complex64) -> Self {
        QuadratureValue { value, error_estimate: 0.0, nodes: 0, scale: value.norm(), estimates: Vec::new() }
    }
}

type Kernel<'a> = Box<dyn Fn(Complex64) -> Result<Complex64> + 'a>;
type Divisor<'a> = Box<dyn Fn(Complex64) -> Result<Complex64> + 'a>;

/// `(1/2 pi i) oint_{|t|=R} e^{zt} g(t) dt` for many `z`, caching kernel samples per level.
pub struct ContourIntegral<'a> {
    spec: QuadratureSpec,
    kernel: Kernel<'a>,
    divisor: Option<Divisor<'a>>,
    /// Per level: `(t_j, t_j g(t_j))`.
    levels: Vec<Vec<(Complex64, Complex64)>>,
}

impl<'a> ContourIntegral<'a> {
    pub fn new<G>(spec: QuadratureSpec, kernel: G) -> Result<Self>
    where
        G: Fn(Complex64) -> Result<Complex64> + 'a,
    {
        spec.validate()?;
        Ok(ContourIntegral { spec, kernel: Box::new(kernel), divisor: None, levels: Vec::new() })
    }

    /// Adds a pre-flight check: each sampled level fails with `NearZeroDivisor`
    /// if some node has `|d| < 1e-8` times the larger of its neighbours.
    fn with_divisor<D>(mut self, divisor: D) -> Result<Self>
    where
        D: Fn(Complex64) -> Result<Complex64> + 'a,
    {
        self.divisor = Some(Box::new(divisor));
        self.level(0)?;
        Ok(self)
    }

    fn level(&mut self, l: usize) -> Result<&[(Complex64, Complex64)]> {
        while self.levels.len() <= l {
            let m = self.spec.nodes << self.levels.len();
            let nodes = circle_nodes(self.spec.radius, m);
            if let Some(d) = &self.divisor {
                let moduli = nodes.iter().map(|&t| Ok(d(t)?.norm())).collect::<Result<Vec<f64>>>()?;
                let (_, dip) = local_dip(&moduli);
                if !(dip > NEAR_ZERO_RATIO) {
                    let lo = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = moduli.iter().cloned().fold(0.0, f64::max);
                    return Err(Error::NearZeroDivisor { radius: self.spec.radius, min_modulus: lo, max_modulus: hi });
                }
            }
            let samples = nodes.into_iter().map(|t| Ok((t, t * (self.kernel)(t)?))).collect::<Result<Vec<_>>>()?;
            self.levels.push(samples);
        }
        Ok(&self.levels[l])
    }

    fn estimate(&mut self, l: usize, z: Complex64) -> Result<(Complex64, f64)> {
        let samples = self.level(l)?;
        let m = samples.len() as f64;
        let mut sum = ZERO;
        let mut abs = 0.0;
        for &(t, w) in samples {
            let term = (z * t).exp() * w;
            sum += term;
            abs += term.norm();
        }
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            return Err(Error::overflow(format!("contour integral at z = {z}")));
        }
        Ok((sum / m, abs / m))
    }

    pub fn eval(&mut self, z: Complex64) -> Result<QuadratureValue> {
        let (mut prev, _) = self.estimate(0, z)?;
        let mut estimates = vec![(self.spec.nodes, prev)];
        for l in 1..=self.spec.max_doublings as usize {
            let (cur, scale) = self.estimate(l, z)?;
            let nodes = self.spec.nodes << l;
            estimates.push((nodes, cur));
            let err = (cur - prev).norm();
            if err <= self.spec.tol * scale || scale == 0.0 {
                return Ok(QuadratureValue { value: cur, error_estimate: err, nodes, scale, estimates });
            }
            prev = cur;
        }
        let n = estimates.len();
        Err(Error::NotConverged {
            estimate: estimates[n - 1].1,
            previous: estimates[n - 2].1,
            nodes: estimates[n - 1].0,
        })
    }

    /// Taylor coefficients at 0 of the integral as a function of `z`:
    /// `c_k = (1/2 pi i) oint t^k / k! g(t) dt`, doubled until the change in
    /// `sum_k |c_k| disk^k` falls below `tol` times the Cauchy majorant.
    fn moments(&mut self, order: usize, disk: f64) -> Result<(Vec<Complex64>, f64, usize)> {
        let r = self.spec.radius;
        let one_level = |samples: &[(Complex64, Complex64)]| {
            let m = samples.len() as f64;
            let mut c = vec![ZERO; order + 1];
            let mut gmax = 0.0f64;
            for &(t, w) in samples {
                gmax = gmax.max(w.norm() / r);
                let mut term = w / m;
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck += term;
                    term = term * t / (k + 1) as f64;
                }
            }
            (c, gmax)
        };
        let (mut prev, _) = one_level(self.level(0)?);
        for l in 1..=self.spec.max_doublings as usize {
            let (cur, gmax) = one_level(self.level(l)?);
            let diff: f64 =
                cur.iter().zip(&prev).enumerate().map(|(k, (a, b))| (a - b).norm() * disk.powi(k as i32)).sum();
            let majorant = r * gmax * (r * disk).exp();
            if diff <= self.spec.tol * majorant || majorant == 0.0 {
                return Ok((cur, gmax, self.spec.nodes << l));
            }
            prev = cur;
        }
        let nodes = self.spec.nodes << self.spec.max_doublings;
        Err(Error::NotConverged { estimate: prev[0], previous: prev[0], nodes })
    }
}

/// `P(z) = (1/2 pi i) oint e^{zt} (BP)(t) dt`, valid on any circle.
pub fn polya_reconstruct(b: &BorelRational, q: &QuadratureSpec, z: Complex64) -> Result<QuadratureValue> {
    ContourIntegral::new(*q, |t| b.eval(t))?.eval(z)
}

/// Contour radius for the Polya integral of `p` on `|z| <= disk`.
///
/// `e^{|z| R} k! / R^k` is smallest at `R = k / |z|`; below that the `k!` in
/// `BP` makes the sum lose `log10(k!)` digits to cancellation.
pub fn polya_radius(p: &TaylorPoly, disk: f64) -> f64 {
    (p.trimmed().degree() as f64 / disk).max(1.0)
}

/// One fixed-size trapezoidal estimate of the Polya integral, for convergence studies.
pub fn polya_trapezoid(b: &BorelRational, radius: f64, z: Complex64, nodes: usize) -> Result<Complex64> {
    let pts = circle_nodes(radius, nodes);
    let mut sum = ZERO;
    for t in pts {
        sum += (z * t).exp() * b.eval(t)? * t;
    }
    Ok(sum / nodes as f64)
}

/// Prepared integral for `T_k S_m P`: kernel `(BP)(t) Phi_k(t) / Phi_m(t)`.
pub fn transfer_integral<'a>(
    seq: &'a OperatorSequence,
    k: usize,
    m: usize,
    p: &TaylorPoly,
    q: &QuadratureSpec,
) -> Result<ContourIntegral<'a>> {
    let b = BorelRational::new(p)?;
    let kernel = move |t: Complex64| -> Result<Complex64> {
        let num = if k == m { Complex64::new(1.0, 0.0) } else { seq.symbol(k, t)? / seq.symbol(m, t)? };
        Ok(b.eval(t)? * num)
    };
    let integral = ContourIntegral::new(*q, kernel)?;
    if m == 0 {
        Ok(integral)
    } else {
        integral.with_divisor(move |t| seq.symbol(m, t))
    }
}

/// `(T_k S_m P)(z) = (1/2 pi i) oint e^{zt} (BP)(t) Phi_k(t)/Phi_m(t) dt`.
pub fn transfer_apply(
    seq: &OperatorSequence,
    k: usize,
    m: usize,
    p: &TaylorPoly,
    q: &QuadratureSpec,
    z: Complex64,
) -> Result<QuadratureValue> {
    transfer_integral(seq, k, m, p, q)?.eval(z)
}

/// `(S_n P)(z) = (1/2 pi i) oint e^{zt} (BP)(t) / Phi_n(t) dt`; `S_0` is the identity.
pub fn right_inverse_eval(
    seq: &OperatorSequence,
    n: usize,
    p: &TaylorPoly,
    q: &QuadratureSpec,
    z: Complex64,
) -> Result<QuadratureValue> {
    if n == 0 {
        return Ok(QuadratureValue::exact(p.eval(z)));
    }
    transfer_integral(seq, 0, n, p, q)?.eval(z)
}

/// `ceil(e * sigma * disk) + 30`, capped at [`DEGREE_CAP`].
pub fn default_truncation_order(sigma: f64, disk: f64) -> usize {
    ((E * sigma * disk).ceil() as usize + 30).min(DEGREE_CAP)
}

/// Taylor coefficients of `S_n P` through `order`, from contour moments with kernel `t^k / k!`.
///
/// The result is a truncation carrying the Cauchy tail bound
/// `R max|BP/Phi_n| sum_{k > order} (R disk)^k / k!` on `|z| <= disk`.
pub fn right_inverse_taylor(
    seq: &OperatorSequence,
    n: usize,
    p: &TaylorPoly,
    q: &QuadratureSpec,
    order: usize,
    disk: f64,
) -> Result<TaylorPoly> {
    if n == 0 {
        return Ok(p.clone());
    }
    if order > DEGREE_CAP {
        return Err(Error::DegreeCap { degree: order, cap: DEGREE_CAP });
    }
    let mut integral = transfer_integral(seq, 0, n, p, q)?;
    let (coeffs, gmax, _) = integral.moments(order, disk)?;
    let bound = q.radius * gmax * exp_tail(q.radius * disk, order);
    Ok(TaylorPoly::truncated(coeffs, Some(TailEstimate { radius: disk, bound })))
}

/// `sum_{k > order} x^k / k!`, bounded by its first term over `1 - x/(order+2)`.
fn exp_tail(x: f64, order: usize) -> f64 {
    let k = order + 1;
    let ratio = x / (k + 1) as f64;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let first = (k as f64 * x.ln() - ln_factorial(k)).exp();
    first / (1.0 - ratio)
}

/// Max pairwise deviation of `S_n P` computed on several radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusInvariance {
    pub radii: Vec<f64>,
    pub max_deviation: f64,
    /// `10 tol max(1, integrand scale)`
    pub threshold: f64,
    pub pass: bool,
}

pub fn radius_invariance_check(
    seq: &OperatorSequence,
    n: usize,
    p: &TaylorPoly,
    radii: &[f64],
    grid: &[Complex64],
    q: &QuadratureSpec,
) -> Result<RadiusInvariance> {
    let mut values: Vec<Vec<Complex64>> = Vec::with_capacity(radii.len());
    let mut scale = 1.0f64;
    for &r in radii {
        let spec = q.with_radius(r);
        let row = if n == 0 {
            grid.iter().map(|&z| p.eval(z)).collect()
        } else {
            let mut integral = transfer_integral(seq, 0, n, p, &spec)?;
            grid.iter()
                .map(|&z| {
                    let v = integral.eval(z)?;
                    scale = scale.max(v.scale);
                    Ok(v.value)
                })
                .collect::<Result<Vec<_>>>()?
        };
        values.push(row);
    }
    let mut max_deviation = 0.0f64;
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            for (x, y) in values[a].iter().zip(&values[b]) {
                max_deviation = max_deviation.max((x - y).norm());
            }
        }
    }
    let threshold = 10.0 * q.tol * scale;
    Ok(RadiusInvariance { radii: radii.to_vec(), max_deviation, threshold, pass: max_deviation <= threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{FunctionExpr, IndexAffine};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zn() -> OperatorSequence {
        OperatorSequence::new("z^n", FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N))
    }

    fn tau() -> OperatorSequence {
        OperatorSequence::new("e^z", FunctionExpr::exp(FunctionExpr::real(1.0)))
    }

    #[test]
    fn borel_examples() {
        let b = BorelRational::new(&TaylorPoly::constant(c(1.0, 0.0))).unwrap();
        assert!((b.eval(c(0.0, 2.0)).unwrap() - c(0.0, -0.5)).norm() < 1e-16);
        let b = BorelRational::new(&TaylorPoly::monomial(2, c(1.0, 0.0))).unwrap();
        assert_eq!(b.eval(c(1.0, 0.0)).unwrap(), c(2.0, 0.0));
        let b = BorelRational::new(&TaylorPoly::from_real(&[1.0, 1.0])).unwrap();
        assert_eq!(b.eval(c(2.0, 0.0)).unwrap(), c(0.75, 0.0));
        assert_eq!(b.eval(ZERO), Err(Error::Pole));
    }

    #[test]
    fn log_scaled_evaluation_past_double_range() {
        let b = BorelRational::new(&TaylorPoly::monomial(100, c(1e-150, 0.0))).unwrap();
        let t = c(0.5, 0.0);
        // 100! * 1e-150 * 2^101 is about 2.36e38.
        let want = (ln_factorial(100) - 150.0 * 10f64.ln() + 101.0 * 2f64.ln()).exp();
        let got = b.eval(t).unwrap();
        assert!((got.re - want).abs() <= 1e-10 * want, "{got} vs {want}");
        let huge = BorelRational::new(&TaylorPoly::monomial(100, c(1.0, 0.0))).unwrap();
        assert!(huge.eval(c(1e-3, 0.0)).is_err());
    }

    #[test]
    fn polya_examples() {
        let q = QuadratureSpec::default();
        let b = BorelRational::new(&TaylorPoly::monomial(2, c(1.0, 0.0))).unwrap();
        let v = polya_reconstruct(&b, &q, c(1.0, 1.0)).unwrap();
        assert!((v.value - c(0.0, 2.0)).norm() < 1e-12);
        let b = BorelRational::new(&TaylorPoly::constant(c(1.0, 0.0))).unwrap();
        for r in [0.1, 1.0, 10.0] {
            let v = polya_reconstruct(&b, &q.with_radius(r), ZERO).unwrap();
            assert!((v.value - c(1.0, 0.0)).norm() < 1e-12);
        }
        // Residue of e^{-2t}/t^2 at 0 is -2.
        let b = BorelRational::new(&TaylorPoly::monomial(1, c(1.0, 0.0))).unwrap();
        let v = polya_reconstruct(&b, &q.with_radius(3.0), c(-2.0, 0.0)).unwrap();
        assert!((v.value - c(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported_with_both_estimates() {
        let b = BorelRational::new(&TaylorPoly::monomial(1, c(1.0, 0.0))).unwrap();
        let q = QuadratureSpec { radius: 30.0, nodes: 64, tol: 1e-14, max_doublings: 1 };
        match polya_reconstruct(&b, &q, c(20.0, 0.0)) {
            Err(Error::NotConverged { nodes, .. }) => assert_eq!(nodes, 128),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn right_inverse_examples() {
        let q = QuadratureSpec::default();
        // Residue of e^{(z-1)t}/t^2 is z - 1.
        let v = right_inverse_eval(&tau(), 1, &TaylorPoly::monomial(1, c(1.0, 0.0)), &q, c(5.0, 0.0)).unwrap();
        assert!((v.value - c(4.0, 0.0)).norm() < 1e-10);
        // Residue of e^{zt}/t^3 is z^2/2.
        let v = right_inverse_eval(&zn(), 2, &TaylorPoly::constant(c(1.0, 0.0)), &q, c(2.0, 0.0)).unwrap();
        assert!((v.value - c(2.0, 0.0)).norm() < 1e-10);
        let p = TaylorPoly::monomial(3, c(1.0, 0.0));
        let z = c(1.0, 1.0);
        let v = right_inverse_eval(&zn(), 0, &p, &q, z).unwrap();
        assert_eq!(v.value, z * z * z);
    }

    #[test]
    fn near_zero_divisor_aborts() {
        // Phi_1 = z - 1 vanishes on the unit circle.
        let seq = OperatorSequence::new("z-1", FunctionExpr::z() + FunctionExpr::real(-1.0));
        let r = right_inverse_eval(&seq, 1, &TaylorPoly::constant(c(1.0, 0.0)), &QuadratureSpec::default(), ZERO);
        assert!(matches!(r, Err(Error::NearZeroDivisor { .. })));
    }

    #[test]
    fn right_inverse_taylor_examples() {
        let q = QuadratureSpec::default();
        let s = right_inverse_taylor(&zn(), 3, &TaylorPoly::constant(c(1.0, 0.0)), &q, 20, 1.0).unwrap();
        for (k, ck) in s.coeffs.iter().enumerate() {
            let want = if k == 3 { 1.0 / 6.0 } else { 0.0 };
            assert!((ck - c(want, 0.0)).norm() < 1e-14, "k={k} {ck}");
        }
        assert!(!s.is_exact);
        let s = right_inverse_taylor(&tau(), 1, &TaylorPoly::monomial(1, c(1.0, 0.0)), &q, 20, 1.0).unwrap();
        assert!((s.coeff(0) - c(-1.0, 0.0)).norm() < 1e-13);
        assert!((s.coeff(1) - c(1.0, 0.0)).norm() < 1e-13);
        assert!(s.coeffs[2..].iter().all(|ck| ck.norm() < 1e-13));
        let p = TaylorPoly::from_real(&[1.0, -2.0, 0.5]);
        assert_eq!(right_inverse_taylor(&tau(), 0, &p, &q, 20, 1.0).unwrap(), p);
    }

    #[test]
    fn transfer_examples() {
        let q = QuadratureSpec::default();
        let seq = zn();
        let v = transfer_apply(&seq, 5, 5, &TaylorPoly::monomial(2, c(1.0, 0.0)), &q, c(0.0, 1.0)).unwrap();
        assert!((v.value - c(-1.0, 0.0)).norm() < 1e-12);
        let one = TaylorPoly::constant(c(1.0, 0.0));
        let v = transfer_apply(&seq, 1, 2, &one, &q, c(3.0, 0.0)).unwrap();
        assert!((v.value - c(3.0, 0.0)).norm() < 1e-11);
        for z in [ZERO, c(1.0, -2.0), c(-0.5, 0.3)] {
            let v = transfer_apply(&seq, 2, 1, &one, &q, z).unwrap();
            assert!(v.value.norm() < 1e-12);
        }
    }

    #[test]
    fn radius_invariance_examples() {
        let grid: Vec<Complex64> = (0..5).map(|j| c(-1.0 + 0.5 * j as f64, 0.25)).collect();
        let q = QuadratureSpec::default();
        let r = radius_invariance_check(&zn(), 1, &TaylorPoly::constant(c(1.0, 0.0)), &[0.5, 2.0], &grid, &q).unwrap();
        assert!(r.max_deviation <= 1e-10 && r.pass, "{r:?}");
        let phi = OperatorSequence::new(
            "z+e^z/9",
            FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * FunctionExpr::exp(FunctionExpr::real(1.0)),
        );
        let r =
            radius_invariance_check(&phi, 1, &TaylorPoly::monomial(1, c(1.0, 0.0)), &[1.0, 2.0], &grid, &q).unwrap();
        assert!(r.max_deviation <= 1e-9, "{r:?}");
    }

    #[test]
    fn exp_tail_bounds_remainder() {
        let x: f64 = 2.0;
        let order = 10;
        let partial: f64 = (0..=order).map(|k| x.powi(k as i32) / ln_factorial(k).exp()).sum();
        let actual = x.exp() - partial;
        let bound = exp_tail(x, order);
        assert!(bound >= actual && bound < 2.0 * actual);
    }
}
