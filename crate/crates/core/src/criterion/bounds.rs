//! Comparison constants between consecutive symbols on the two boundary circles,
//! and the two series conditions built on them.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConditionResult, Verdict, Witness};
use crate::borel::NEAR_ZERO_RATIO;
use crate::error::{Error, Result};
use crate::operators::OperatorSequence;
use crate::series::circle::{check_nodes, circle_point};
use crate::series::{circle_extrema, local_log_dip};

/// Multiplier applied to every sampled ratio maximum.
pub const SAFETY_FACTOR: f64 = 1.01;

/// Rows (or columns) shorter than this are left out of tail-ratio fits.
const MIN_FIT_LEN: usize = 8;

/// `A(R1, R2, R3) = { rho <= |z| <= sigma }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annulus {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl Annulus {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Annulus { r1, r2, r3 }
    }

    pub fn rho(&self) -> f64 {
        self.r1.min(self.r2).min(self.r3)
    }

    pub fn sigma(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }

    pub fn contains(&self, z: num_complex::Complex64) -> bool {
        let r = z.norm();
        self.rho() <= r && r <= self.sigma()
    }

    pub fn violations(&self) -> Vec<String> {
        [("r1", self.r1), ("r2", self.r2), ("r3", self.r3)]
            .iter()
            .filter(|(_, r)| !(r.is_finite() && *r > 0.0))
            .map(|(name, r)| format!("annulus.{name} = {r} must be a positive finite radius"))
            .collect()
    }
}

/// `alpha[n][j] >= |Phi_n / Phi_j|` on `|t| = R1` and `beta[n][j] >= |Phi_j / Phi_n|`
/// on `|t| = R2`, for `n > j >= 0`, as sampled maxima times [`SAFETY_FACTOR`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundMatrices {
    pub n_max: usize,
    pub r1: f64,
    pub r2: f64,
    pub nodes: usize,
    /// `alpha[n]` has length `n`.
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    /// `sum_j alpha[n][j]` for `n = 1..=n_max` (index `n - 1`).
    pub alpha_row_sums: Vec<f64>,
    /// `sum_{n > j} beta[n][j]` for `j = 0..n_max` (index `j`).
    pub beta_col_sums: Vec<f64>,
    pub row_sum_sup_alpha: f64,
    /// Over `j >= 1`.
    pub col_sum_sup_beta: f64,
    /// Over `j >= 0`.
    pub col_sum_sup_beta_with_zero: f64,
    pub alpha_tail_ratio: f64,
    pub beta_tail_ratio: f64,
    /// Sampled `(min, max)` of `|Phi_n|` on `R1` and `R2`, for `n = 0..=n_max`.
    pub extrema_r1: Vec<(f64, f64)>,
    pub extrema_r2: Vec<(f64, f64)>,
}

/// `ln |Phi_n(t_i)|` on `nodes` equispaced points starting at angle `offset`.
pub(crate) fn log_moduli(seq: &OperatorSequence, n: usize, radius: f64, nodes: usize, offset: f64) -> Result<Vec<f64>> {
    let h = 2.0 * PI / nodes as f64;
    let logs = (0..nodes)
        .map(|i| Ok(seq.symbol(n, circle_point(radius, offset + h * i as f64))?.norm().ln()))
        .collect::<Result<Vec<f64>>>()?;
    let (at, dip) = local_log_dip(&logs);
    if !(dip > NEAR_ZERO_RATIO.ln()) {
        return Err(Error::ZeroOnContour { radius, angle: offset + h * at as f64, modulus: logs[at].exp() });
    }
    Ok(logs)
}

fn max_log_ratio(a: &[f64], b: &[f64]) -> (f64, usize) {
    a.iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |acc, (i, d)| if d > acc.0 { (d, i) } else { acc })
}

fn circle_logs(seq: &OperatorSequence, radius: f64, n_max: usize, nodes: usize, offset: f64) -> Result<Vec<Vec<f64>>> {
    (0..=n_max).into_par_iter().map(|n| log_moduli(seq, n, radius, nodes, offset)).collect()
}

fn extrema(logs: &[Vec<f64>]) -> Vec<(f64, f64)> {
    logs.iter()
        .map(|row| {
            let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo.exp(), hi.exp())
        })
        .collect()
}

/// Fitted geometric ratio over the last quarter of `entries`.
fn tail_ratio(entries: &[f64]) -> f64 {
    let len = entries.len();
    let start = (3 * len) / 4;
    let window = &entries[start.min(len - 2)..];
    let (first, last) = (window[0], window[window.len() - 1]);
    (last / first).powf(1.0 / (window.len() - 1) as f64)
}

pub fn compute_bound_matrices(
    seq: &OperatorSequence,
    r1: f64,
    r2: f64,
    n_max: usize,
    nodes: usize,
) -> Result<BoundMatrices> {
    check_nodes(nodes)?;
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let l1 = circle_logs(seq, r1, n_max, nodes, 0.0)?;
    let l2 = circle_logs(seq, r2, n_max, nodes, 0.0)?;
    let alpha: Vec<Vec<f64>> = (0..=n_max)
        .into_par_iter()
        .map(|n| (0..n).map(|j| SAFETY_FACTOR * max_log_ratio(&l1[n], &l1[j]).0.exp()).collect())
        .collect();
    let beta: Vec<Vec<f64>> = (0..=n_max)
        .into_par_iter()
        .map(|n| (0..n).map(|j| SAFETY_FACTOR * max_log_ratio(&l2[j], &l2[n]).0.exp()).collect())
        .collect();
    let mut bm = BoundMatrices {
        n_max,
        r1,
        r2,
        nodes,
        alpha,
        beta,
        alpha_row_sums: Vec::new(),
        beta_col_sums: Vec::new(),
        row_sum_sup_alpha: 0.0,
        col_sum_sup_beta: 0.0,
        col_sum_sup_beta_with_zero: 0.0,
        alpha_tail_ratio: 0.0,
        beta_tail_ratio: 0.0,
        extrema_r1: extrema(&l1),
        extrema_r2: extrema(&l2),
    };
    bm.alpha_row_sums = (1..=n_max).map(|n| bm.alpha[n].iter().sum()).collect();
    bm.beta_col_sums = (0..n_max).map(|j| (j + 1..=n_max).map(|n| bm.beta[n][j]).sum()).collect();
    let (a, b1, b0) = bm.sups(n_max);
    bm.row_sum_sup_alpha = a;
    bm.col_sum_sup_beta = b1;
    bm.col_sum_sup_beta_with_zero = b0;
    bm.alpha_tail_ratio = (MIN_FIT_LEN..=n_max)
        .map(|n| {
            let row: Vec<f64> = (1..=n).map(|d| bm.alpha[n][n - d]).collect();
            tail_ratio(&row)
        })
        .fold(0.0, f64::max);
    bm.beta_tail_ratio = (0..n_max.saturating_sub(MIN_FIT_LEN - 1))
        .map(|j| {
            let col: Vec<f64> = (j + 1..=n_max).map(|n| bm.beta[n][j]).collect();
            tail_ratio(&col)
        })
        .fold(0.0, f64::max);
    Ok(bm)
}

impl BoundMatrices {
    /// Sup sums using only entries with `n <= limit`:
    /// `(sup_n sum_j alpha, sup_{j>=1} sum_n beta, sup_{j>=0} sum_n beta)`.
    pub fn sups(&self, limit: usize) -> (f64, f64, f64) {
        let limit = limit.min(self.n_max);
        let a = (1..=limit).map(|n| self.alpha[n].iter().sum::<f64>()).fold(0.0, f64::max);
        let col = |j: usize| (j + 1..=limit).map(|n| self.beta[n][j]).sum::<f64>();
        let b1 = (1..limit).map(col).fold(0.0, f64::max);
        let b0 = (0..limit).map(col).fold(0.0, f64::max);
        (a, b1, b0)
    }

    /// Re-samples both circles on `factor`-times more nodes (shifted by half a step)
    /// and reports the first stored constant that a new sample exceeds.
    pub fn validate(&self, seq: &OperatorSequence, factor: usize) -> Result<(Option<Witness>, Option<Witness>)> {
        let nodes = self.nodes * factor;
        let offset = PI / nodes as f64;
        let l1 = circle_logs(seq, self.r1, self.n_max, nodes, offset)?;
        let l2 = circle_logs(seq, self.r2, self.n_max, nodes, offset)?;
        let find = |logs: &[Vec<f64>], stored: &[Vec<f64>], radius: f64, flip: bool| -> Option<Witness> {
            (1..=self.n_max).find_map(|n| {
                (0..n).find_map(|j| {
                    let (d, i) =
                        if flip { max_log_ratio(&logs[j], &logs[n]) } else { max_log_ratio(&logs[n], &logs[j]) };
                    let ratio = d.exp();
                    (ratio > stored[n][j]).then(|| Witness::RatioExceeded {
                        n,
                        j,
                        t: circle_point(radius, offset + 2.0 * PI * i as f64 / nodes as f64),
                        ratio,
                        bound: stored[n][j],
                    })
                })
            })
        };
        Ok((find(&l1, &self.alpha, self.r1, false), find(&l2, &self.beta, self.r2, true)))
    }
}

/// Condition (a): bounded row sums of `alpha` and column sums of `beta`.
///
/// PASS_NUMERIC when both sups are finite, the last tenth of the range raises
/// neither by more than 5%, and both fitted tail ratios are below one.
/// FAIL when either sup grows by a factor of 1.5 or more across each of two
/// successive doublings of the range. Otherwise INCONCLUSIVE.
pub fn check_condition_a(bm: &BoundMatrices) -> ConditionResult {
    let n = bm.n_max;
    let (a, b1, _) = bm.sups(n);
    let summary = format!(
        "sup_n sum_j alpha = {a:.6}, sup_j>=1 sum_n beta = {b1:.6} (j>=0: {:.6}), tail ratios {:.4} / {:.4}, N = {n}",
        bm.col_sum_sup_beta_with_zero, bm.alpha_tail_ratio, bm.beta_tail_ratio
    );
    if n < 50 {
        return ConditionResult::new("(a)", Verdict::Inconclusive, format!("{summary}; range below 50"));
    }
    let (a90, b90, _) = bm.sups((9 * n) / 10);
    let finite = a.is_finite() && b1.is_finite();
    let steady = a <= 1.05 * a90 && b1 <= 1.05 * b90;
    let decaying = bm.alpha_tail_ratio < 1.0 && bm.beta_tail_ratio < 1.0;
    if finite && steady && decaying {
        return ConditionResult::new("(a)", Verdict::PassNumeric, summary);
    }
    let s4 = bm.sups(n / 4);
    let s2 = bm.sups(n / 2);
    let grows = |x4: f64, x2: f64, x1: f64| x2 >= 1.5 * x4 && x1 >= 1.5 * x2;
    let witness = if grows(s4.0, s2.0, a) {
        Some(Witness::GrowingSums { family: "alpha".into(), limits: [n / 4, n / 2, n], sups: [s4.0, s2.0, a] })
    } else if grows(s4.1, s2.1, b1) {
        Some(Witness::GrowingSums { family: "beta".into(), limits: [n / 4, n / 2, n], sups: [s4.1, s2.1, b1] })
    } else {
        None
    };
    match witness {
        Some(w) => ConditionResult::new("(a)", Verdict::Fail, summary).with_witness(w),
        None => ConditionResult::new("(a)", Verdict::Inconclusive, summary),
    }
}

/// Terms and partial sums of `sum_n 1 / min_{|t|=R3} |Phi_n(t)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalSeries {
    pub radius: f64,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Angles of the sampled minima.
    pub argmins: Vec<f64>,
    /// Sampled `max |Phi_n|` on the circle, for plotting.
    pub maxima: Vec<f64>,
    pub fitted_ratio: f64,
}

/// Condition (e): PASS_NUMERIC when the last-quartile fitted term ratio is below 0.95;
/// FAIL when the minimum term over each of the windows `(N/8, N/4]`, `(N/4, N/2]`,
/// `(N/2, N]` is at least half the previous window's.
pub fn check_condition_e(
    seq: &OperatorSequence,
    r3: f64,
    n_max: usize,
    nodes: usize,
) -> Result<(ConditionResult, ReciprocalSeries)> {
    if n_max < 8 {
        return Err(Error::invalid("condition (e) needs n_max >= 8"));
    }
    let ext = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            log_moduli(seq, n, r3, nodes, 0.0)?;
            circle_extrema(&seq.expr, n, r3, nodes)
        })
        .collect::<Result<Vec<_>>>()?;
    let terms: Vec<f64> = ext.iter().map(|e| 1.0 / e.min_mod).collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |s, t| {
            *s += t;
            Some(*s)
        })
        .collect();
    let fitted_ratio = tail_ratio(&terms);
    let series = ReciprocalSeries {
        radius: r3,
        argmins: ext.iter().map(|e| e.argmin).collect(),
        maxima: ext.iter().map(|e| e.max_mod).collect(),
        terms,
        partial_sums,
        fitted_ratio,
    };
    let total = *series.partial_sums.last().unwrap();
    let summary = format!("partial sum to N = {n_max}: {total:.9e}, fitted term ratio {fitted_ratio:.4}");
    if fitted_ratio < 0.95 {
        return Ok((ConditionResult::new("(e)", Verdict::PassNumeric, summary), series));
    }
    let window_min = |lo: usize, hi: usize| series.terms[lo..hi].iter().cloned().fold(f64::INFINITY, f64::min);
    let (w1, w2, w3) =
        (window_min(n_max / 8, n_max / 4), window_min(n_max / 4, n_max / 2), window_min(n_max / 2, n_max));
    if w2 >= 0.5 * w1 && w3 >= 0.5 * w2 {
        let n = n_max;
        let w = Witness::DivergentTerms {
            n,
            t: circle_point(r3, series.argmins[n - 1]),
            term: series.terms[n - 1],
            window_minima: [w1, w2, w3],
        };
        return Ok((ConditionResult::new("(e)", Verdict::Fail, summary).with_witness(w), series));
    }
    Ok((ConditionResult::new("(e)", Verdict::Inconclusive, summary), series))
}
