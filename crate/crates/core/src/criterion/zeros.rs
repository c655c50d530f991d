//! Argument-principle zero counting and annulus zero-exclusion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Annulus, CriterionOptions, Verdict, Witness};
use crate::borel::{QuadratureSpec, NEAR_ZERO_RATIO};
use crate::error::{Error, Result};
use crate::operators::OperatorSequence;
use crate::series::circle::{check_nodes, circle_point};
use crate::series::local_dip;
use crate::series::{evaluate, FunctionExpr};

/// Number of zeros of `Phi_n` inside `|t| < radius`, from the unwrapped phase change.
///
/// Nodes start at `q.nodes` and double (up to `q.max_doublings` times) until every
/// phase step between neighbouring nodes is below `pi/2` at two consecutive node counts
/// that give the same count.
pub fn winding_number(expr: &FunctionExpr, n: usize, radius: f64, q: &QuadratureSpec) -> Result<i64> {
    winding_with(|t| evaluate(expr, n, t), radius, q)
}

pub(crate) fn winding_with<F>(f: F, radius: f64, q: &QuadratureSpec) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    check_nodes(q.nodes)?;
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("radius {radius} must be positive")));
    }
    let mut nodes = q.nodes;
    let mut previous: Option<i64> = None;
    for _ in 0..=q.max_doublings {
        let h = 2.0 * PI / nodes as f64;
        let values = (0..nodes).map(|j| f(circle_point(radius, h * j as f64))).collect::<Result<Vec<_>>>()?;
        let moduli: Vec<f64> = values.iter().map(|v| v.norm()).collect();
        let (lo_at, dip) = local_dip(&moduli);
        if !(dip > NEAR_ZERO_RATIO) {
            return Err(Error::ZeroOnContour { radius, angle: h * lo_at as f64, modulus: moduli[lo_at] });
        }
        let mut total = 0.0;
        let mut resolved = true;
        for j in 0..nodes {
            let step = (values[(j + 1) % nodes] / values[j]).arg();
            if step.abs() >= PI / 2.0 {
                resolved = false;
                break;
            }
            total += step;
        }
        previous = if resolved {
            let w = total / (2.0 * PI);
            let rounded = w.round();
            if (w - rounded).abs() > 0.01 {
                return Err(Error::NonIntegerWinding { radius, estimate: w });
            }
            // A coarse grid can alias a fast phase into small steps; require the
            // count to survive one more doubling.
            if previous == Some(rounded as i64) {
                return Ok(rounded as i64);
            }
            Some(rounded as i64)
        } else {
            None
        };
        nodes *= 2;
    }
    Err(Error::PhaseStepTooLarge { radius, nodes: nodes / 2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCounts {
    pub n: usize,
    pub inner: i64,
    pub outer: i64,
    /// Smallest neighbour-relative modulus dip seen on the intermediate circles.
    pub min_relative_modulus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroFreeReport {
    pub verdict: Verdict,
    pub counts: Vec<ZeroCounts>,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

enum PerIndex {
    Ok(ZeroCounts),
    Fail(Witness),
    Unknown(String),
}

fn check_one(seq: &OperatorSequence, n: usize, ann: &Annulus, opts: &CriterionOptions) -> PerIndex {
    let (rho, sigma) = (ann.rho(), ann.sigma());
    let count = |r: f64| winding_number(&seq.expr, n, r, &opts.quadrature);
    let near_zero = |err: &Error| match *err {
        Error::ZeroOnContour { radius, angle, modulus } => {
            Some(Witness::NearZero { n, t: circle_point(radius, angle), modulus })
        }
        _ => None,
    };
    let (inner, outer) = match (count(rho), count(sigma)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return match near_zero(&e) {
                Some(w) => PerIndex::Fail(w),
                None => PerIndex::Unknown(format!("n = {n}: {e}")),
            }
        }
    };
    if inner != outer {
        return PerIndex::Fail(Witness::ZeroCountMismatch { n, rho, sigma, inner, outer });
    }
    let mut min_rel = 1.0f64;
    let circles = opts.intermediate_circles;
    for i in 1..=circles {
        let r = rho + (sigma - rho) * i as f64 / (circles + 1) as f64;
        if r == rho || r == sigma {
            continue;
        }
        let h = 2.0 * PI / opts.nodes as f64;
        let mut moduli = Vec::with_capacity(opts.nodes);
        for j in 0..opts.nodes {
            match evaluate(&seq.expr, n, circle_point(r, h * j as f64)) {
                Ok(v) => moduli.push(v.norm()),
                Err(e) => return PerIndex::Unknown(format!("n = {n}: {e}")),
            }
        }
        let (at, dip) = local_dip(&moduli);
        if !(dip > NEAR_ZERO_RATIO) {
            let t = circle_point(r, h * at as f64);
            return PerIndex::Fail(Witness::NearZero { n, t, modulus: moduli[at] });
        }
        min_rel = min_rel.min(dip);
    }
    PerIndex::Ok(ZeroCounts { n, inner, outer, min_relative_modulus: min_rel })
}

/// `Phi_n` has no zero in the closed annulus, for every `n` in `ns`.
///
/// Passes when the zero counts on the inner and outer circles agree and no
/// sampled modulus on the intermediate circles nearly vanishes.
pub fn annulus_zero_free(
    seq: &OperatorSequence,
    ns: std::ops::RangeInclusive<usize>,
    ann: &Annulus,
    opts: &CriterionOptions,
) -> ZeroFreeReport {
    let results: Vec<PerIndex> = ns.into_par_iter().map(|n| check_one(seq, n, ann, opts)).collect();
    let mut counts = Vec::new();
    let mut witness = None;
    let mut note = None;
    for r in results {
        match r {
            PerIndex::Ok(c) => counts.push(c),
            PerIndex::Fail(w) => {
                witness.get_or_insert(w);
            }
            PerIndex::Unknown(msg) => {
                note.get_or_insert(msg);
            }
        }
    }
    let verdict = if witness.is_some() {
        Verdict::Fail
    } else if note.is_some() {
        Verdict::Inconclusive
    } else {
        Verdict::PassNumeric
    };
    ZeroFreeReport { verdict, counts, witness, note }
}
