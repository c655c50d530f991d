//! Ratio statistics of a scalar sequence and the radius search for `c_n Phi^n`.

use serde::{Deserialize, Serialize};

use super::CriterionOptions;
use crate::borel::NEAR_ZERO_RATIO;
use crate::criterion::zeros::winding_number;
use crate::error::{Error, Result};
use crate::series::{circle_extrema, FunctionExpr, SeqScalar};

/// Default end of the ratio window.
pub const DEFAULT_RATIO_WINDOW: usize = 10_000;

/// `gamma = inf |c_{n+1}/c_n|`, `delta = sup |c_{n+1}/c_n|` over `n` in `[N/2, N-1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub window_start: usize,
    pub window_end: usize,
    pub gamma: f64,
    pub delta: f64,
    /// `delta` grew by more than 1.5x from the window ending at `N/2`.
    pub delta_unbounded: bool,
    /// `gamma` shrank by more than 1.5x from the window ending at `N/2`.
    pub gamma_vanishing: bool,
}

impl RatioStats {
    /// `gamma`, or `0` when it trends to zero.
    pub fn gamma_effective(&self) -> f64 {
        if self.gamma_vanishing {
            0.0
        } else {
            self.gamma
        }
    }

    /// `delta`, or `+inf` when it trends upward.
    pub fn delta_effective(&self) -> f64 {
        if self.delta_unbounded {
            f64::INFINITY
        } else {
            self.delta
        }
    }

    pub fn is_usable(&self) -> bool {
        let (g, d) = (self.gamma_effective(), self.delta_effective());
        g > 0.0 && d.is_finite()
    }
}

fn window(c: &SeqScalar, lo: usize, hi: usize) -> Result<(f64, f64)> {
    let mut prev = c.log_abs(lo)?;
    let (mut g, mut d) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in lo..hi {
        let next = c.log_abs(n + 1)?;
        let r = (next - prev).exp();
        g = g.min(r);
        d = d.max(r);
        prev = next;
    }
    Ok((g, d))
}

/// Ratio statistics over `[N/2, N-1]`, with trend flags from `[N/4, N/2-1]`.
///
/// For a finite list the window end is clamped to its last index.
pub fn ratio_stats(c: &SeqScalar, window_end: usize) -> Result<RatioStats> {
    let end = match c {
        SeqScalar::List { values } => window_end.min(values.len().saturating_sub(1)),
        _ => window_end,
    };
    if end < 8 {
        return Err(Error::invalid(format!("ratio window end {end} must be at least 8")));
    }
    let (g, d) = window(c, end / 2, end)?;
    let (g_half, d_half) = window(c, end / 4, end / 2)?;
    Ok(RatioStats {
        window_start: end / 2,
        window_end: end - 1,
        gamma: g,
        delta: d,
        delta_unbounded: !d.is_finite() || d > 1.5 * d_half,
        gamma_vanishing: !(g > 0.0) || g < g_half / 1.5,
    })
}

/// Log-spaced radius grid, `per_decade` points per decade over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let steps = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=steps).map(|k| lo * 10f64.powf(k as f64 / per_decade as f64)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusChoice {
    pub r1: f64,
    pub r2: f64,
    pub max_on_r1: f64,
    pub min_on_r2: f64,
    /// Factors actually met: `max <= upper/delta`, `min >= lower/gamma`.
    pub upper_factor: f64,
    pub lower_factor: f64,
    pub from_seed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RadiusSearch {
    Found(RadiusChoice),
    NotFound { blocking: String },
}

/// Margin tiers tried in order: `(max factor on R1, min factor on R2)`.
const TIERS: [(f64, f64); 2] = [(0.5, 2.0), (0.95, 1.05)];

fn annulus_zero_free(phi: &FunctionExpr, r1: f64, r2: f64, opts: &CriterionOptions) -> bool {
    let q = &opts.quadrature;
    matches!(
        (winding_number(phi, 1, r1, q), winding_number(phi, 1, r2, q)),
        (Ok(a), Ok(b)) if a == b
    )
}

/// Finds `R1 < R2` with `max_{|t|=R1} |Phi| <= 0.95/delta`, `min_{|t|=R2} |Phi| >= 1.05/gamma`
/// and `Phi` zero-free between them. A wider factor-two margin is preferred when available.
pub fn radius_search(
    phi: &FunctionExpr,
    stats: &RatioStats,
    seed: Option<(f64, f64)>,
    grid: &[f64],
    opts: &CriterionOptions,
) -> Result<RadiusSearch> {
    if !stats.is_usable() {
        return Ok(RadiusSearch::NotFound {
            blocking: format!(
                "ratio statistics are not finite and positive (gamma = {}, delta = {})",
                stats.gamma_effective(),
                stats.delta_effective()
            ),
        });
    }
    let (gamma, delta) = (stats.gamma, stats.delta);
    let extrema = |r: f64| -> Option<(f64, f64)> {
        let e = circle_extrema(phi, 1, r, opts.nodes).ok()?;
        (e.min_mod > NEAR_ZERO_RATIO * e.max_mod && e.max_mod.is_finite()).then_some((e.min_mod, e.max_mod))
    };
    let (hi_factor, lo_factor) = TIERS[TIERS.len() - 1];
    if let Some((r1, r2)) = seed {
        if r1 > 0.0 && r2 > r1 {
            if let (Some((_, max1)), Some((min2, _))) = (extrema(r1), extrema(r2)) {
                if max1 <= hi_factor / delta && min2 >= lo_factor / gamma && annulus_zero_free(phi, r1, r2, opts) {
                    let (upper_factor, lower_factor) = TIERS
                        .iter()
                        .cloned()
                        .find(|&(u, l)| max1 <= u / delta && min2 >= l / gamma)
                        .unwrap_or((hi_factor, lo_factor));
                    return Ok(RadiusSearch::Found(RadiusChoice {
                        r1,
                        r2,
                        max_on_r1: max1,
                        min_on_r2: min2,
                        upper_factor,
                        lower_factor,
                        from_seed: true,
                    }));
                }
            }
        }
    }
    let samples: Vec<Option<(f64, f64)>> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&r| extrema(r)).collect()
    };
    let mut blocking = format!("no grid radius has min|Phi| >= {lo_factor}/gamma = {:.6e}", lo_factor / gamma);
    for &(upper, lower) in TIERS.iter() {
        for (i2, s2) in samples.iter().enumerate() {
            let Some((min2, _)) = *s2 else { continue };
            if min2 < lower / gamma {
                continue;
            }
            let below = (0..i2).rev().find_map(|i1| match samples[i1] {
                Some((_, max1)) if max1 <= upper / delta => Some((i1, max1)),
                _ => None,
            });
            let Some((i1, max1)) = below else {
                blocking = format!(
                    "no grid radius below R2 = {:.6e} has max|Phi| <= {upper}/delta = {:.6e}",
                    grid[i2],
                    upper / delta
                );
                continue;
            };
            if !annulus_zero_free(phi, grid[i1], grid[i2], opts) {
                blocking = format!("Phi has zeros between {:.6e} and {:.6e}", grid[i1], grid[i2]);
                continue;
            }
            return Ok(RadiusSearch::Found(RadiusChoice {
                r1: grid[i1],
                r2: grid[i2],
                max_on_r1: max1,
                min_on_r2: min2,
                upper_factor: upper,
                lower_factor: lower,
                from_seed: false,
            }));
        }
    }
    Ok(RadiusSearch::NotFound { blocking })
}
