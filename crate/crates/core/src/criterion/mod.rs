//! Numerical checks of the annulus criterion for frequent hypercyclicity of a
//! sequence of convolution operators, and of its specialization to `c_n Phi(D)^n`.

pub mod bounds;
pub mod ratio;
pub mod zeros;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::borel::QuadratureSpec;
use crate::error::Result;
use crate::operators::{operator_power_expr, OperatorSequence};
use crate::series::{FunctionExpr, SeqScalar, DEFAULT_NODES};

pub use bounds::{
    check_condition_a, check_condition_e, compute_bound_matrices, Annulus, BoundMatrices, ReciprocalSeries,
};
pub use ratio::{log_grid, radius_search, ratio_stats, RadiusChoice, RadiusSearch, RatioStats, DEFAULT_RATIO_WINDOW};
pub use zeros::{annulus_zero_free, winding_number, ZeroCounts, ZeroFreeReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    PassNumeric,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Conjunction: any FAIL gives FAIL, else any INCONCLUSIVE gives INCONCLUSIVE.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => PassNumeric,
        }
    }

    pub fn all<I: IntoIterator<Item = Verdict>>(it: I) -> Verdict {
        it.into_iter().fold(Verdict::PassNumeric, Verdict::and)
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::PassNumeric => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PassNumeric => "PASS_NUMERIC",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Concrete data behind a FAIL verdict, enough to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    ZeroCountMismatch { n: usize, rho: f64, sigma: f64, inner: i64, outer: i64 },
    NearZero { n: usize, t: Complex64, modulus: f64 },
    RatioExceeded { n: usize, j: usize, t: Complex64, ratio: f64, bound: f64 },
    GrowingSums { family: String, limits: [usize; 3], sups: [f64; 3] },
    DivergentTerms { n: usize, t: Complex64, term: f64, window_minima: [f64; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub label: String,
    pub verdict: Verdict,
    pub summary: String,
    pub witness: Option<Witness>,
}

impl ConditionResult {
    pub fn new(label: &str, verdict: Verdict, summary: impl Into<String>) -> Self {
        ConditionResult { label: label.into(), verdict, summary: summary.into(), witness: None }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    fn skipped(label: &str, why: &str) -> Self {
        ConditionResult::new(label, Verdict::Inconclusive, format!("not evaluated: {why}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionOptions {
    /// Samples per circle for extrema and bound matrices.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// Starting nodes and doublings for winding numbers.
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_circles")]
    pub intermediate_circles: usize,
    /// Resampling factor used to validate the bound matrices.
    #[serde(default = "default_resample")]
    pub resample_factor: usize,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}
fn default_circles() -> usize {
    8
}
fn default_resample() -> usize {
    4
}

impl Default for CriterionOptions {
    fn default() -> Self {
        CriterionOptions {
            nodes: default_nodes(),
            quadrature: QuadratureSpec::default(),
            intermediate_circles: default_circles(),
            resample_factor: default_resample(),
        }
    }
}

/// One CSV row per index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerIndexRow {
    pub n: usize,
    pub zeros_inner: Option<i64>,
    pub zeros_outer: Option<i64>,
    pub min_r1: Option<f64>,
    pub max_r1: Option<f64>,
    pub min_r2: Option<f64>,
    pub max_r2: Option<f64>,
    pub min_r3: Option<f64>,
    pub max_r3: Option<f64>,
    pub alpha_row_sum: Option<f64>,
    pub beta_col_sum: Option<f64>,
    pub e_term: Option<f64>,
    pub e_partial_sum: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub row_sum_sup_alpha: f64,
    pub col_sum_sup_beta: f64,
    pub col_sum_sup_beta_with_zero: f64,
    pub alpha_tail_ratio: f64,
    pub beta_tail_ratio: f64,
    pub nodes: usize,
}

/// Scalar sequence, ratio statistics and radii behind a `c_n Phi^n` check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSetup {
    pub base: FunctionExpr,
    pub scalar: SeqScalar,
    pub ratio_stats: Option<RatioStats>,
    pub radius_search: Option<RadiusSearch>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub operator: String,
    pub n_max: usize,
    pub annulus: Option<Annulus>,
    pub conditions: Vec<ConditionResult>,
    pub overall: Verdict,
    pub per_n: Vec<PerIndexRow>,
    pub bounds: Option<BoundSummary>,
    pub condition_e: Option<ReciprocalSeries>,
    pub power: Option<PowerSetup>,
    /// Full bound matrices; omitted from JSON, written as CSV sidecars.
    #[serde(skip)]
    pub matrices: Option<BoundMatrices>,
}

impl CriterionReport {
    pub fn condition(&self, label: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.label == label)
    }

    fn finish(mut self) -> Self {
        self.conditions.sort_by(|a, b| a.label.cmp(&b.label));
        self.overall = Verdict::all(self.conditions.iter().map(|c| c.verdict));
        self
    }
}

/// Runs conditions (a)-(e) for `Phi_n`, `1 <= n <= n_max`, on `ann`.
///
/// Zero-freeness (b) gates the rest: unless it passes, (a) and (c)-(e) are
/// reported INCONCLUSIVE without being evaluated.
pub fn check_criterion(
    seq: &OperatorSequence,
    ann: &Annulus,
    n_max: usize,
    opts: &CriterionOptions,
) -> Result<CriterionReport> {
    let bad = ann.violations();
    if !bad.is_empty() {
        return Err(crate::error::Error::Config(bad.join("; ")));
    }
    let mut rep = CriterionReport {
        operator: seq.label.clone(),
        n_max,
        annulus: Some(*ann),
        conditions: Vec::new(),
        overall: Verdict::Inconclusive,
        per_n: (1..=n_max).map(|n| PerIndexRow { n, ..PerIndexRow::default() }).collect(),
        bounds: None,
        condition_e: None,
        power: None,
        matrices: None,
    };

    let zf = annulus_zero_free(seq, 1..=n_max, ann, opts);
    for c in &zf.counts {
        let row = &mut rep.per_n[c.n - 1];
        row.zeros_inner = Some(c.inner);
        row.zeros_outer = Some(c.outer);
    }
    let summary = match (&zf.witness, &zf.note) {
        (Some(_), _) => "Phi_n vanishes in the annulus".to_string(),
        (None, Some(note)) => format!("zero count undecided: {note}"),
        _ => format!("zero counts agree on |t| = {} and |t| = {} for every n", ann.rho(), ann.sigma()),
    };
    let mut b = ConditionResult::new("(b)", zf.verdict, summary);
    b.witness = zf.witness.clone();
    rep.conditions.push(b);
    if zf.verdict != Verdict::PassNumeric {
        for label in ["(a)", "(c)", "(d)", "(e)"] {
            rep.conditions.push(ConditionResult::skipped(label, "zero-freeness not established"));
        }
        return Ok(rep.finish());
    }

    match compute_bound_matrices(seq, ann.r1, ann.r2, n_max, opts.nodes) {
        Ok(bm) => {
            let bound = |label: &str, family: &str, r: f64, w: Option<Witness>| match w {
                Some(w) => {
                    ConditionResult::new(label, Verdict::Fail, format!("sampled {family} bound exceeded on |t| = {r}"))
                        .with_witness(w)
                }
                None => ConditionResult::new(
                    label,
                    Verdict::PassNumeric,
                    format!("{family} bounds on |t| = {r} hold at {}x resampling", opts.resample_factor),
                ),
            };
            match bm.validate(seq, opts.resample_factor) {
                Ok((wa, wb)) => {
                    rep.conditions.push(bound("(c)", "alpha", ann.r1, wa));
                    rep.conditions.push(bound("(d)", "beta", ann.r2, wb));
                }
                Err(e) => {
                    let why = format!("resampling failed: {e}");
                    rep.conditions.push(ConditionResult::skipped("(c)", &why));
                    rep.conditions.push(ConditionResult::skipped("(d)", &why));
                }
            }
            rep.conditions.push(check_condition_a(&bm));
            for (i, row) in rep.per_n.iter_mut().enumerate() {
                let n = i + 1;
                row.min_r1 = Some(bm.extrema_r1[n].0);
                row.max_r1 = Some(bm.extrema_r1[n].1);
                row.min_r2 = Some(bm.extrema_r2[n].0);
                row.max_r2 = Some(bm.extrema_r2[n].1);
                row.alpha_row_sum = Some(bm.alpha_row_sums[i]);
                row.beta_col_sum = Some(bm.beta_col_sums[i]);
            }
            rep.bounds = Some(BoundSummary {
                row_sum_sup_alpha: bm.row_sum_sup_alpha,
                col_sum_sup_beta: bm.col_sum_sup_beta,
                col_sum_sup_beta_with_zero: bm.col_sum_sup_beta_with_zero,
                alpha_tail_ratio: bm.alpha_tail_ratio,
                beta_tail_ratio: bm.beta_tail_ratio,
                nodes: bm.nodes,
            });
            rep.matrices = Some(bm);
        }
        Err(e) => {
            let why = format!("bound matrices unavailable: {e}");
            for label in ["(a)", "(c)", "(d)"] {
                rep.conditions.push(ConditionResult::skipped(label, &why));
            }
        }
    }

    match check_condition_e(seq, ann.r3, n_max, opts.nodes) {
        Ok((res, series)) => {
            for (i, row) in rep.per_n.iter_mut().enumerate() {
                row.min_r3 = Some(1.0 / series.terms[i]);
                row.max_r3 = Some(series.maxima[i]);
                row.e_term = Some(series.terms[i]);
                row.e_partial_sum = Some(series.partial_sums[i]);
            }
            rep.conditions.push(res);
            rep.condition_e = Some(series);
        }
        Err(e) => rep.conditions.push(ConditionResult::skipped("(e)", &e.to_string())),
    }
    Ok(rep.finish())
}

/// Options for the `c_n Phi^n` specialization.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerOptions {
    pub ratio_window: usize,
    pub seed: Option<(f64, f64)>,
    pub grid: Vec<f64>,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions { ratio_window: DEFAULT_RATIO_WINDOW, seed: None, grid: log_grid(1e-3, 1e3, 200) }
    }
}

/// Checks `Phi_n = c_n Phi^n` by choosing `R1, R2` from the ratio statistics of `c_n`
/// and running [`check_criterion`] on `A(R1, R2, R2)`.
pub fn check_power_criterion(
    phi: &FunctionExpr,
    c: &SeqScalar,
    n_max: usize,
    opts: &CriterionOptions,
    popts: &PowerOptions,
) -> Result<CriterionReport> {
    let label = format!("({c}) * ({phi})^n");
    let mut setup =
        PowerSetup { base: phi.clone(), scalar: c.clone(), ratio_stats: None, radius_search: None, note: None };
    let undecided = |setup: PowerSetup, why: String| -> CriterionReport {
        CriterionReport {
            operator: label.clone(),
            n_max,
            annulus: None,
            conditions: ["(a)", "(b)", "(c)", "(d)", "(e)"].iter().map(|l| ConditionResult::skipped(l, &why)).collect(),
            overall: Verdict::Inconclusive,
            per_n: Vec::new(),
            bounds: None,
            condition_e: None,
            power: Some(setup),
            matrices: None,
        }
    };
    let stats = match ratio_stats(c, popts.ratio_window) {
        Ok(s) => s,
        Err(e) => {
            let why = format!("ratio statistics unavailable: {e}");
            setup.note = Some(why.clone());
            return Ok(undecided(setup, why));
        }
    };
    setup.ratio_stats = Some(stats.clone());
    let search = radius_search(phi, &stats, popts.seed, &popts.grid, opts)?;
    setup.radius_search = Some(search.clone());
    let choice = match search {
        RadiusSearch::Found(choice) => choice,
        RadiusSearch::NotFound { blocking } => {
            let why = format!("radius search failed: {blocking}");
            setup.note = Some(why.clone());
            return Ok(undecided(setup, why));
        }
    };
    let seq = OperatorSequence::new(label, operator_power_expr(phi, c.clone()));
    let ann = Annulus::new(choice.r1, choice.r2, choice.r2);
    let mut rep = check_criterion(&seq, &ann, n_max, opts)?;
    rep.power = Some(setup);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::IndexAffine;

    #[test]
    fn verdict_conjunction() {
        use Verdict::*;
        assert_eq!(Verdict::all([PassNumeric, PassNumeric]), PassNumeric);
        assert_eq!(Verdict::all([PassNumeric, Inconclusive]), Inconclusive);
        assert_eq!(Verdict::all([Inconclusive, Fail, PassNumeric]), Fail);
        assert_eq!(serde_json::to_string(&PassNumeric).unwrap(), "\"PASS_NUMERIC\"");
    }

    #[test]
    fn monomials_pass_and_unit_circle_fails() {
        let seq = OperatorSequence::new("z^n", FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N));
        let opts = CriterionOptions { nodes: 256, ..CriterionOptions::default() };
        let rep = check_criterion(&seq, &Annulus::new(0.5, 2.0, 2.0), 60, &opts).unwrap();
        assert_eq!(rep.overall, Verdict::PassNumeric, "{:#?}", rep.conditions);

        let rep = check_criterion(&seq, &Annulus::new(1.0, 1.0, 1.0), 60, &opts).unwrap();
        assert_eq!(rep.overall, Verdict::Fail);
        assert_eq!(rep.condition("(a)").unwrap().verdict, Verdict::Fail);
        assert_eq!(rep.condition("(e)").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn enclosed_zero_gates_remaining_conditions() {
        let seq = OperatorSequence::new("z-1", FunctionExpr::z() + FunctionExpr::real(-1.0));
        let opts = CriterionOptions { nodes: 256, ..CriterionOptions::default() };
        let rep = check_criterion(&seq, &Annulus::new(0.5, 2.0, 2.0), 10, &opts).unwrap();
        assert_eq!(rep.condition("(b)").unwrap().verdict, Verdict::Fail);
        assert_eq!(rep.condition("(a)").unwrap().verdict, Verdict::Inconclusive);
        assert_eq!(rep.overall, Verdict::Fail);
    }
}
