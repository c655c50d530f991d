//! Sup-norm surrogates for the four convergence conditions of the
//! frequent-hypercyclicity criterion, with the majorant chains that bound them,
//! plus orbit sampling and hitting-time densities.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::borel::{default_truncation_order, right_inverse_taylor, transfer_integral, BorelRational, QuadratureSpec};
use crate::criterion::{compute_bound_matrices, Verdict};
use crate::error::{Error, Result};
use crate::operators::{apply_operator, OperatorSequence};
use crate::series::circle::extrema_of;
use crate::series::{circle_extrema, TaylorPoly, DEFAULT_NODES};

/// Slack allowed between a direct partial sum and its majorant.
pub const MAJORANT_SLACK: f64 = 1.05;

/// Tail size below which a direct series is treated as numerically Cauchy.
pub const CAUCHY_TAIL: f64 = 1e-6;

/// Agreement required between `T_n S_n P` and `P`.
pub const IDENTITY_TOL: f64 = 1e-7;

/// Sample points in the closed disk `|z| <= disk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupGrid {
    pub disk: f64,
    pub points: Vec<Complex64>,
}

impl SupGrid {
    /// The origin plus `radii` circles (at `disk * i / radii`) of `angles` points each.
    pub fn polar(disk: f64, radii: usize, angles: usize) -> Self {
        let mut points = vec![Complex64::new(0.0, 0.0)];
        for i in 1..=radii {
            let r = disk * i as f64 / radii as f64;
            points.extend((0..angles).map(|j| Complex64::from_polar(r, 2.0 * PI * j as f64 / angles as f64)));
        }
        SupGrid { disk, points }
    }

    /// `side x side` square lattice over `[-disk, disk]^2`, clipped to the disk.
    pub fn square(disk: f64, side: usize) -> Self {
        let step = if side > 1 { 2.0 * disk / (side - 1) as f64 } else { 0.0 };
        let points = (0..side)
            .flat_map(|i| (0..side).map(move |j| Complex64::new(-disk + step * i as f64, -disk + step * j as f64)))
            .filter(|z| z.norm() <= disk * (1.0 + 1e-12))
            .collect();
        SupGrid { disk, points }
    }

    pub fn sup<F>(&self, f: F) -> Result<f64>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let mut f = f;
        let mut best = 0.0f64;
        for &z in &self.points {
            best = best.max(f(z)?.norm());
        }
        Ok(best)
    }
}

/// Max deviation of `T_n S_n P` from `P`, by quadrature and through the Taylor expansion of `S_n P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub label: String,
    /// `(n, quadrature deviation, Taylor deviation)`
    pub per_n: Vec<(usize, f64, f64)>,
    pub max_deviation: f64,
    pub verdict: Verdict,
}

/// Condition (iv): `T_n S_n P = P` on the grid, along two independent paths.
pub fn verify_condition_iv(
    seq: &OperatorSequence,
    ns: std::ops::RangeInclusive<usize>,
    p: &TaylorPoly,
    q: &QuadratureSpec,
    grid: &SupGrid,
) -> Result<IdentityReport> {
    let rows = ns
        .into_par_iter()
        .map(|n| -> Result<(usize, f64, f64)> {
            if n == 0 {
                return Ok((0, 0.0, 0.0));
            }
            let mut integral = transfer_integral(seq, n, n, p, q)?;
            let dq = grid.sup(|z| Ok(integral.eval(z)?.value - p.eval(z)))?;
            let order =
                default_truncation_order(q.radius, grid.disk).max(n + p.degree() + 10).min(crate::series::DEGREE_CAP);
            let s = right_inverse_taylor(seq, n, p, q, order, grid.disk)?;
            let back = apply_operator(seq, n, &s)?;
            let dt = grid.sup(|z| Ok(back.eval(z) - p.eval(z)))?;
            Ok((n, dq, dt))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = rows.iter().map(|r| r.1.max(r.2)).fold(0.0, f64::max);
    let verdict = if max_deviation <= IDENTITY_TOL { Verdict::PassNumeric } else { Verdict::Fail };
    Ok(IdentityReport { label: "(iv)".into(), per_n: rows, max_deviation, verdict })
}

/// Direct sup-norm sums next to the majorant that bounds them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLedger {
    pub condition: String,
    /// Contour radius the majorant is taken on.
    pub radius: f64,
    #[serde(rename = "K")]
    pub disk: f64,
    pub n_max: usize,
    pub k_max: Option<usize>,
    pub direct_terms: Vec<f64>,
    pub direct_partial_sums: Vec<f64>,
    pub majorant_partial_sums: Vec<f64>,
    /// `R e^{K R} sup_{|t|=R} |BP(t)|`
    pub constant: f64,
    pub analytic_bound: f64,
    pub tail: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl ConvergenceLedger {
    /// First truncation point whose direct partial sum exceeds the slack-adjusted majorant.
    pub fn majorant_violation(&self) -> Option<usize> {
        self.direct_partial_sums.iter().zip(&self.majorant_partial_sums).position(|(d, m)| *d > MAJORANT_SLACK * m)
    }

    fn judge(mut self, settled: bool) -> Self {
        let violation = self.majorant_violation();
        self.verdict = if let Some(i) = violation {
            self.note = format!("direct partial sum {i} exceeds {MAJORANT_SLACK} x majorant");
            Verdict::Fail
        } else if !self.analytic_bound.is_finite() {
            self.note = "majorant is not finite".into();
            Verdict::Inconclusive
        } else if settled {
            Verdict::PassNumeric
        } else {
            self.note = format!("tail {:.3e} has not settled", self.tail);
            Verdict::Inconclusive
        };
        self
    }
}

fn borel_constant(p: &TaylorPoly, radius: f64, disk: f64) -> Result<f64> {
    let b = BorelRational::new(p)?;
    let sup_b = if b.coefficients().is_empty() {
        0.0
    } else {
        extrema_of(|t| Ok(b.eval(t)?.norm()), radius, DEFAULT_NODES)?.max_mod
    };
    Ok(radius * (disk * radius).exp() * sup_b)
}

fn running_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |s, x| {
            *s += x;
            Some(*s)
        })
        .collect()
}

fn half_tail(terms: &[f64]) -> f64 {
    terms[terms.len() / 2..].iter().sum()
}

/// Condition (iii): `sum_n sup_{|z|<=K} |S_n P|` against
/// `R3 e^{K R3} sup|BP| sum_n 1/min_{|t|=R3} |Phi_n|`.
pub fn bound_condition_iii(
    seq: &OperatorSequence,
    p: &TaylorPoly,
    r3: f64,
    n_max: usize,
    q: &QuadratureSpec,
    grid: &SupGrid,
) -> Result<ConvergenceLedger> {
    let q = q.with_radius(r3);
    let constant = borel_constant(p, r3, grid.disk)?;
    let pairs = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<(f64, f64)> {
            let mut integral = transfer_integral(seq, 0, n, p, &q)?;
            let direct = grid.sup(|z| Ok(integral.eval(z)?.value))?;
            let min = circle_extrema(&seq.expr, n, r3, DEFAULT_NODES)?.min_mod;
            Ok((direct, constant / min))
        })
        .collect::<Result<Vec<_>>>()?;
    let direct_terms: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let majorant: Vec<f64> = pairs.iter().map(|x| x.1).collect();
    let majorant_partial_sums = running_sums(&majorant);
    let tail = half_tail(&direct_terms);
    let ledger = ConvergenceLedger {
        condition: "(iii)".into(),
        radius: r3,
        disk: grid.disk,
        n_max,
        k_max: None,
        direct_partial_sums: running_sums(&direct_terms),
        direct_terms,
        analytic_bound: *majorant_partial_sums.last().unwrap_or(&0.0),
        majorant_partial_sums,
        constant,
        tail,
        verdict: Verdict::Inconclusive,
        note: String::new(),
    };
    Ok(ledger.judge(tail < CAUCHY_TAIL))
}

/// Condition (ii): `sup_k sum_n sup_{|z|<=K} |T_k S_{n+k} P|` against
/// `R2 e^{K R2} sup|BP| sup_k sum_n beta[n+k][k]`, for `k <= k_max`.
///
/// Entry `N` of each partial-sum list is the sup over `k` of the sum up to `n = N`.
pub fn bound_condition_ii(
    seq: &OperatorSequence,
    p: &TaylorPoly,
    r2: f64,
    n_max: usize,
    k_max: usize,
    q: &QuadratureSpec,
    grid: &SupGrid,
) -> Result<ConvergenceLedger> {
    let q = q.with_radius(r2);
    let constant = borel_constant(p, r2, grid.disk)?;
    let bm = compute_bound_matrices(seq, r2, r2, n_max + k_max, DEFAULT_NODES)?;
    let pairs: Vec<(usize, usize)> = (0..=k_max).flat_map(|k| (1..=n_max).map(move |n| (k, n))).collect();
    let values = pairs
        .par_iter()
        .map(|&(k, n)| -> Result<f64> {
            let mut integral = transfer_integral(seq, k, n + k, p, &q)?;
            grid.sup(|z| Ok(integral.eval(z)?.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut direct_partial_sums = vec![0.0f64; n_max];
    let mut majorant_partial_sums = vec![0.0f64; n_max];
    let mut direct_terms = vec![0.0f64; n_max];
    for k in 0..=k_max {
        let (mut d, mut m) = (0.0, 0.0);
        for n in 1..=n_max {
            let v = values[k * n_max + n - 1];
            d += v;
            m += constant * bm.beta[n + k][k];
            direct_terms[n - 1] = direct_terms[n - 1].max(v);
            direct_partial_sums[n - 1] = direct_partial_sums[n - 1].max(d);
            majorant_partial_sums[n - 1] = majorant_partial_sums[n - 1].max(m);
        }
    }
    let tail = half_tail(&direct_terms);
    let ledger = ConvergenceLedger {
        condition: "(ii)".into(),
        radius: r2,
        disk: grid.disk,
        n_max,
        k_max: Some(k_max),
        direct_terms,
        direct_partial_sums,
        analytic_bound: *majorant_partial_sums.last().unwrap_or(&0.0),
        majorant_partial_sums,
        constant,
        tail,
        verdict: Verdict::Inconclusive,
        note: String::new(),
    };
    Ok(ledger.judge(tail < CAUCHY_TAIL))
}

/// Condition (i): `sup_k sum_{n=1}^{k} sup_{|z|<=K} |T_k S_{k-n} P|` against
/// `R1 e^{K R1} sup|BP| sup_k sum_j alpha[k][j]`, for `1 <= k <= k_max`.
///
/// `direct_terms[k-1]` is the finite sum for `k`; partial sums are running sups over `k`.
pub fn bound_condition_i(
    seq: &OperatorSequence,
    p: &TaylorPoly,
    r1: f64,
    k_max: usize,
    q: &QuadratureSpec,
    grid: &SupGrid,
) -> Result<ConvergenceLedger> {
    let q = q.with_radius(r1);
    let constant = borel_constant(p, r1, grid.disk)?;
    let bm = compute_bound_matrices(seq, r1, r1, k_max, DEFAULT_NODES)?;
    let pairs: Vec<(usize, usize)> = (1..=k_max).flat_map(|k| (1..=k).map(move |n| (k, n))).collect();
    let values = pairs
        .par_iter()
        .map(|&(k, n)| -> Result<f64> {
            let mut integral = transfer_integral(seq, k, k - n, p, &q)?;
            grid.sup(|z| Ok(integral.eval(z)?.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut direct_terms = vec![0.0f64; k_max];
    for (&(k, _), v) in pairs.iter().zip(&values) {
        direct_terms[k - 1] += v;
    }
    let majorant: Vec<f64> = (1..=k_max).map(|k| constant * bm.alpha[k].iter().sum::<f64>()).collect();
    let running_max = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .scan(0.0f64, |s, x| {
                *s = s.max(*x);
                Some(*s)
            })
            .collect()
    };
    let direct_partial_sums = running_max(&direct_terms);
    let majorant_partial_sums = running_max(&majorant);
    let last = *direct_partial_sums.last().unwrap_or(&0.0);
    let mid = direct_partial_sums.get(k_max / 2).copied().unwrap_or(0.0);
    let ledger = ConvergenceLedger {
        condition: "(i)".into(),
        radius: r1,
        disk: grid.disk,
        n_max: k_max,
        k_max: Some(k_max),
        direct_terms,
        direct_partial_sums,
        analytic_bound: *majorant_partial_sums.last().unwrap_or(&0.0),
        majorant_partial_sums,
        constant,
        tail: last - mid,
        verdict: Verdict::Inconclusive,
        note: String::new(),
    };
    Ok(ledger.judge(last <= MAJORANT_SLACK * mid + 1e-12))
}

/// `Phi_n(D) f` sampled on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub n: usize,
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub sup_norm: f64,
}

pub fn orbit_apply(seq: &OperatorSequence, n: usize, f: &TaylorPoly, grid: &SupGrid) -> Result<OrbitSample> {
    let g = apply_operator(seq, n, f)?;
    let values: Vec<Complex64> = grid.points.iter().map(|&z| g.eval(z)).collect();
    let sup_norm = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(OrbitSample { n, points: grid.points.clone(), values, sup_norm })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingDensityReport {
    #[serde(rename = "N")]
    pub horizon: usize,
    pub hits: Vec<usize>,
    /// `d_m = #(hits in 1..=m) / m` for `m = 1..=N`.
    pub density_curve: Vec<f64>,
    /// `min d_m` over `m` in `[ceil(N/2), N]`.
    pub liminf_estimate: f64,
}

impl HittingDensityReport {
    pub fn from_hits(mut hits: Vec<usize>, horizon: usize) -> Self {
        hits.sort_unstable();
        hits.dedup();
        hits.retain(|&h| (1..=horizon).contains(&h));
        let mut density_curve = Vec::with_capacity(horizon);
        let mut count = 0usize;
        let mut it = hits.iter().peekable();
        for m in 1..=horizon {
            while it.next_if(|&&h| h <= m).is_some() {
                count += 1;
            }
            density_curve.push(count as f64 / m as f64);
        }
        let start = horizon.div_ceil(2).max(1);
        let liminf_estimate = density_curve[start - 1..].iter().cloned().fold(f64::INFINITY, f64::min);
        HittingDensityReport { horizon, hits, density_curve, liminf_estimate }
    }
}

/// Indices `n <= N` with `sup_grid |Phi_n(D) f - target| < eps`.
pub fn hitting_density(
    seq: &OperatorSequence,
    f: &TaylorPoly,
    target: &TaylorPoly,
    eps: f64,
    grid: &SupGrid,
    horizon: usize,
) -> Result<HittingDensityReport> {
    if horizon < 10 {
        return Err(Error::invalid(format!("horizon {horizon} must be at least 10")));
    }
    let hits = (1..=horizon)
        .into_par_iter()
        .map(|n| -> Result<Option<usize>> {
            let g = apply_operator(seq, n, f)?;
            let d = grid.sup(|z| Ok(g.eval(z) - target.eval(z)))?;
            Ok((d < eps).then_some(n))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HittingDensityReport::from_hits(hits.into_iter().flatten().collect(), horizon))
}
