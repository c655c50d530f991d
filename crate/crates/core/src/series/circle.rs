use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::{evaluate, FunctionExpr};
use crate::error::{Error, Result};

/// Default sample count for extrema on a circle.
pub const DEFAULT_NODES: usize = 4096;

const GOLDEN_STEPS: usize = 48;

pub fn circle_point(radius: f64, angle: f64) -> Complex64 {
    Complex64::from_polar(radius, angle)
}

/// `radius * exp(2 pi i j / count)` for `j = 0..count`.
pub fn circle_nodes(radius: f64, count: usize) -> Vec<Complex64> {
    (0..count).map(|j| circle_point(radius, 2.0 * PI * j as f64 / count as f64)).collect()
}

pub(crate) fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < 64 || !nodes.is_power_of_two() {
        return Err(Error::invalid(format!("node count {nodes} must be a power of two >= 64")));
    }
    Ok(())
}

/// Sampled extrema of a modulus on a circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleExtrema {
    pub radius: f64,
    pub min_mod: f64,
    pub max_mod: f64,
    pub argmin: f64,
    pub argmax: f64,
    pub nodes: usize,
}

/// Smallest `|f_j| / max(|f_{j-1}|, |f_{j+1}|)` over a closed ring of samples.
///
/// A zero on the contour shows as a sharp local dip. The global `min/max` ratio
/// is not used: for `Phi^n` it decays like `(min/max)^n` with no zero present.
pub fn local_dip(moduli: &[f64]) -> (usize, f64) {
    let k = moduli.len();
    let mut worst = (0, f64::INFINITY);
    for j in 0..k {
        let around = moduli[(j + k - 1) % k].max(moduli[(j + 1) % k]);
        let r = if around > 0.0 { moduli[j] / around } else { 0.0 };
        let r = if r.is_nan() { 0.0 } else { r };
        if r < worst.1 {
            worst = (j, r);
        }
    }
    worst
}

/// `local_dip` on log moduli: smallest `l_j - max(l_{j-1}, l_{j+1})`.
pub fn local_log_dip(logs: &[f64]) -> (usize, f64) {
    let k = logs.len();
    let mut worst = (0, f64::INFINITY);
    for j in 0..k {
        let d = logs[j] - logs[(j + k - 1) % k].max(logs[(j + 1) % k]);
        let d = if d.is_nan() { f64::NEG_INFINITY } else { d };
        if d < worst.1 {
            worst = (j, d);
        }
    }
    worst
}

/// Extrema of `modulus(R e^{i theta})` over uniform nodes, each refined by a
/// golden-section search on the bracketing interval around the best node.
pub fn extrema_of<F>(modulus: F, radius: f64, nodes: usize) -> Result<CircleExtrema>
where
    F: Fn(Complex64) -> Result<f64>,
{
    check_nodes(nodes)?;
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("radius {radius} must be positive")));
    }
    let h = 2.0 * PI / nodes as f64;
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for j in 0..nodes {
        let theta = h * j as f64;
        let m = modulus(circle_point(radius, theta))?;
        if m < lo.0 {
            lo = (m, theta);
        }
        if m > hi.0 {
            hi = (m, theta);
        }
    }
    let at = |theta: f64| modulus(circle_point(radius, theta));
    let (min_mod, argmin) = golden(&at, lo.1 - h, lo.1 + h, lo, false)?;
    let (max_mod, argmax) = golden(&at, hi.1 - h, hi.1 + h, hi, true)?;
    Ok(CircleExtrema {
        radius,
        min_mod,
        max_mod,
        argmin: argmin.rem_euclid(2.0 * PI),
        argmax: argmax.rem_euclid(2.0 * PI),
        nodes,
    })
}

/// Golden-section search that never returns worse than the seed sample.
fn golden<F>(f: &F, mut a: f64, mut b: f64, seed: (f64, f64), maximize: bool) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |t: f64| -> Result<f64> { Ok(sign * f(t)?) };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    for _ in 0..GOLDEN_STEPS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d)?;
        }
    }
    let (best, arg) = if fc < fd { (fc, c) } else { (fd, d) };
    let best = sign * best;
    let better = if maximize { best > seed.0 } else { best < seed.0 };
    Ok(if better { (best, arg) } else { seed })
}

/// Sampled `min |Phi_n|` and `max |Phi_n|` on `|t| = radius`.
pub fn circle_extrema(expr: &FunctionExpr, n: usize, radius: f64, nodes: usize) -> Result<CircleExtrema> {
    extrema_of(|t| Ok(evaluate(expr, n, t)?.norm()), radius, nodes)
}

/// Finite-radius growth diagnostics for one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthMetrics {
    pub radius: f64,
    pub max_modulus: f64,
    /// `log M(r) / r`
    pub type_estimate: f64,
    /// `log log M(r) / log r`, defined when `M(r) > 1` and `r != 1`.
    pub order_estimate: Option<f64>,
}

pub fn growth_metrics(expr: &FunctionExpr, n: usize, radii: &[f64]) -> Result<Vec<GrowthMetrics>> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("radii must be positive"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    radii
        .iter()
        .map(|&r| {
            let ext = circle_extrema(expr, n, r, DEFAULT_NODES)?;
            let log_m = ext.max_mod.ln();
            let order_estimate = (log_m > 0.0 && r != 1.0).then(|| log_m.ln() / r.ln());
            Ok(GrowthMetrics { radius: r, max_modulus: ext.max_mod, type_estimate: log_m / r, order_estimate })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::expr::{IndexAffine, SeqScalar};

    fn exp_z(a: f64) -> FunctionExpr {
        FunctionExpr::exp(FunctionExpr::real(a))
    }

    #[test]
    fn exp_extrema_on_unit_circle() {
        let e = circle_extrema(&exp_z(1.0), 1, 1.0, DEFAULT_NODES).unwrap();
        assert!((e.min_mod - (-1f64).exp()).abs() < 1e-12);
        assert!((e.max_mod - 1f64.exp()).abs() < 1e-12);
        assert!((e.argmin - PI).abs() < 1e-6);
        assert!(e.argmax.min(2.0 * PI - e.argmax) < 1e-6);
    }

    #[test]
    fn monomial_has_constant_modulus() {
        for k in 0..=8u32 {
            let e = FunctionExpr::powi(FunctionExpr::z(), k);
            let ext = circle_extrema(&e, 1, 2.0, 256).unwrap();
            let want = 2f64.powi(k as i32);
            assert!((ext.min_mod - want).abs() <= 1e-12 * want);
            assert!((ext.max_mod - want).abs() <= 1e-12 * want);
        }
        let zn = FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N);
        let ext = circle_extrema(&zn, 3, 2.0, 64).unwrap();
        assert!((ext.min_mod - 8.0).abs() < 1e-12 && (ext.max_mod - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rouche_lower_bound_on_radius_two() {
        let phi = FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * exp_z(1.0);
        let ext = circle_extrema(&phi, 1, 2.0, DEFAULT_NODES).unwrap();
        assert!(ext.min_mod >= 2.0 - 8.0 / 9.0);
    }

    #[test]
    fn node_count_must_be_power_of_two() {
        assert!(circle_extrema(&FunctionExpr::z(), 1, 1.0, 100).is_err());
        assert!(circle_extrema(&FunctionExpr::z(), 1, 1.0, 32).is_err());
    }

    #[test]
    fn growth_examples() {
        let g = growth_metrics(&exp_z(3.0), 1, &[10.0]).unwrap();
        assert!((g[0].type_estimate - 3.0).abs() < 0.01);

        // log(r^2)/r is 0.092 at r = 100 and drops below 0.05 only past r = 190.
        let g = growth_metrics(&FunctionExpr::powi(FunctionExpr::z(), 2), 1, &[100.0, 1000.0]).unwrap();
        assert!((g[0].type_estimate - 2.0 * 100f64.ln() / 100.0).abs() < 1e-12);
        assert!(g[1].type_estimate <= 0.05);

        // Dominant-term oracle: M(20) = e^20 / 9 + 20, attained at z = 20.
        let phi = FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * exp_z(1.0);
        let g = growth_metrics(&phi, 1, &[20.0]).unwrap();
        let oracle = (20f64.exp() / 9.0 + 20.0).ln() / 20.0;
        assert!((g[0].type_estimate - oracle).abs() < 1e-9, "{}", g[0].type_estimate);
    }

    #[test]
    fn growth_rejects_bad_radii() {
        assert!(growth_metrics(&FunctionExpr::z(), 1, &[1.0, 0.5]).is_err());
        assert!(growth_metrics(&FunctionExpr::z(), 1, &[-1.0]).is_err());
    }

    #[test]
    fn max_modulus_is_monotone() {
        let radii: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
        let exprs = [
            exp_z(1.0),
            FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * exp_z(1.0),
            FunctionExpr::seq(SeqScalar::LogShifted) * FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N),
        ];
        for e in &exprs {
            let g = growth_metrics(e, 3, &radii).unwrap();
            assert!(g.windows(2).all(|w| w[1].max_modulus >= w[0].max_modulus));
        }
    }
}
