//! Command dispatch, run reports and CSV sidecars.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bg_verify::{
    bound_condition_i, bound_condition_ii, bound_condition_iii, hitting_density, orbit_apply, verify_condition_iv,
    ConvergenceLedger, HittingDensityReport, IdentityReport, SupGrid,
};
use crate::borel::{polya_reconstruct, polya_trapezoid, radius_invariance_check, BorelRational, RadiusInvariance};
use crate::config::ExperimentConfig;
use crate::criterion::{
    annulus_zero_free, check_criterion, check_power_criterion, winding_number, CriterionReport, Verdict, ZeroFreeReport,
};
use crate::error::{Error, Result};
use crate::operators::{apply_operator, commutation_check};
use crate::series::TaylorPoly;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Check32,
    Borel,
    Apply,
    Inverse,
    Zeros,
    Bg,
    Orbit,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Check,
        Command::Check32,
        Command::Borel,
        Command::Apply,
        Command::Inverse,
        Command::Zeros,
        Command::Bg,
        Command::Orbit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Check32 => "check32",
            Command::Borel => "borel",
            Command::Apply => "apply",
            Command::Inverse => "inverse",
            Command::Zeros => "zeros",
            Command::Bg => "bg",
            Command::Orbit => "orbit",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown command `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelTargetResult {
    pub target: TaylorPoly,
    /// `k! a_k`
    pub borel_coefficients: Vec<Complex64>,
    pub max_relative_error: f64,
    /// `(nodes, max error)` of fixed-size trapezoidal estimates.
    pub convergence: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApplyResult {
    pub target: TaylorPoly,
    pub n: usize,
    pub result: TaylorPoly,
    /// `|Phi_n(D) tau_1 f - tau_1 Phi_n(D) f|` on the sup grid.
    pub commutation_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseResult {
    pub target: TaylorPoly,
    pub identity: IdentityReport,
    pub invariance: Vec<(usize, RadiusInvariance)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountRow {
    pub n: usize,
    pub radius: f64,
    pub count: Option<i64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZerosResult {
    pub counts: Vec<ZeroCountRow>,
    pub annulus: Option<ZeroFreeReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BgTargetResult {
    pub target: TaylorPoly,
    pub ledgers: Vec<ConvergenceLedger>,
    pub identity: IdentityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub f: TaylorPoly,
    /// `(n, sup_{|z|<=K} |Phi_n(D) f|)`
    pub sup_norms: Vec<(usize, f64)>,
    pub density: Option<HittingDensityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CommandResult {
    Check(Box<CriterionReport>),
    Check32(Box<CriterionReport>),
    Borel { targets: Vec<BorelTargetResult> },
    Apply { results: Vec<ApplyResult> },
    Inverse { results: Vec<InverseResult> },
    Zeros(ZerosResult),
    Bg { results: Vec<BgTargetResult> },
    Orbit(OrbitResult),
}

/// Time-dependent fields, excluded from determinism comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub timestamp: u64,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: String,
    pub command: Command,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub summary: Vec<String>,
    pub result: CommandResult,
    pub sidecars: Vec<String>,
    pub run_info: RunInfo,
}

impl RunReport {
    /// The report as JSON with `run_info` removed.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("run_info");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

fn grid(cfg: &ExperimentConfig) -> SupGrid {
    SupGrid::polar(cfg.disk, cfg.grid.radii, cfg.grid.angles)
}

fn targets(cfg: &ExperimentConfig) -> Result<&[TaylorPoly]> {
    if cfg.targets.is_empty() {
        return Err(Error::Config("this command needs at least one entry in `targets`".into()));
    }
    Ok(&cfg.targets)
}

fn criterion_summary(rep: &CriterionReport) -> Vec<String> {
    rep.conditions.iter().map(|c| format!("{} {}: {}", c.label, c.verdict, c.summary)).collect()
}

fn run_borel(cfg: &ExperimentConfig) -> Result<(Verdict, Vec<String>, CommandResult)> {
    let points = if cfg.options.points.is_empty() { grid(cfg).points } else { cfg.options.points.clone() };
    let mut out = Vec::new();
    let mut summary = Vec::new();
    for p in targets(cfg)? {
        let b = BorelRational::new(p)?;
        let mut worst = 0.0f64;
        for &z in &points {
            let v = polya_reconstruct(&b, &cfg.quadrature, z)?.value;
            let exact = p.eval(z);
            worst = worst.max((v - exact).norm() / exact.norm().max(1.0));
        }
        let mut convergence = Vec::new();
        let mut m = 16;
        while m <= cfg.quadrature.nodes << cfg.quadrature.max_doublings {
            let mut err = 0.0f64;
            for &z in &points {
                err = err.max((polya_trapezoid(&b, cfg.quadrature.radius, z, m)? - p.eval(z)).norm());
            }
            convergence.push((m, err));
            m *= 2;
        }
        summary.push(format!("degree {}: max relative error {worst:.3e}", p.degree()));
        out.push(BorelTargetResult {
            target: p.clone(),
            borel_coefficients: b.coefficients().to_vec(),
            max_relative_error: worst,
            convergence,
        });
    }
    let verdict = if out.iter().all(|r| r.max_relative_error <= 1e-9) { Verdict::PassNumeric } else { Verdict::Fail };
    Ok((verdict, summary, CommandResult::Borel { targets: out }))
}

fn run_apply(cfg: &ExperimentConfig) -> Result<(Verdict, Vec<String>, CommandResult)> {
    let seq = cfg.require_sequence()?;
    let g = grid(cfg);
    let n_top = cfg.options.n.unwrap_or(1);
    let mut results = Vec::new();
    let mut verdict = Verdict::PassNumeric;
    for p in targets(cfg)? {
        for n in 0..=n_top {
            let result = apply_operator(seq, n, p)?;
            let dev = commutation_check(seq, n, Complex64::new(1.0, 0.0), p, &g.points)?;
            let scale = g.sup(|z| Ok(result.eval(z)))?.max(1.0);
            if dev > 1e-9 * scale {
                verdict = Verdict::Fail;
            }
            results.push(ApplyResult { target: p.clone(), n, result, commutation_deviation: dev });
        }
    }
    let worst = results.iter().map(|r| r.commutation_deviation).fold(0.0, f64::max);
    let summary = vec![format!("{} applications, max commutation deviation {worst:.3e}", results.len())];
    Ok((verdict, summary, CommandResult::Apply { results }))
}

fn run_inverse(cfg: &ExperimentConfig) -> Result<(Verdict, Vec<String>, CommandResult)> {
    let seq = cfg.require_sequence()?;
    let g = grid(cfg);
    let n_top = cfg.options.n.unwrap_or(10);
    let mut results = Vec::new();
    let mut verdict = Verdict::PassNumeric;
    let mut summary = Vec::new();
    for p in targets(cfg)? {
        let identity = verify_condition_iv(seq, 0..=n_top, p, &cfg.quadrature, &g)?;
        verdict = verdict.and(identity.verdict);
        let mut invariance = Vec::new();
        if cfg.options.radii.len() >= 2 {
            for n in 1..=n_top {
                let inv = radius_invariance_check(seq, n, p, &cfg.options.radii, &g.points, &cfg.quadrature)?;
                if !inv.pass {
                    verdict = verdict.and(Verdict::Fail);
                }
                invariance.push((n, inv));
            }
        }
        let worst_inv = invariance.iter().map(|(_, r)| r.max_deviation).fold(0.0, f64::max);
        summary.push(format!(
            "degree {}: T_n S_n P deviation {:.3e}, radius deviation {worst_inv:.3e}",
            p.degree(),
            identity.max_deviation
        ));
        results.push(InverseResult { target: p.clone(), identity, invariance });
    }
    Ok((verdict, summary, CommandResult::Inverse { results }))
}

fn run_zeros(cfg: &ExperimentConfig) -> Result<(Verdict, Vec<String>, CommandResult)> {
    let (expr, label) = match (&cfg.sequence, &cfg.power) {
        (Some(seq), _) => (seq.expr.clone(), seq.label.clone()),
        (None, Some(p)) => (p.phi.clone(), p.phi.to_string()),
        (None, None) => return Err(Error::Config("zeros needs a `sequence` or `power.phi`".into())),
    };
    let n_top = cfg.options.n.unwrap_or(1);
    let mut counts = Vec::new();
    let mut verdict = Verdict::PassNumeric;
    for n in 1..=n_top {
        for &r in &cfg.options.radii {
            let row = match winding_number(&expr, n, r, &cfg.quadrature) {
                Ok(c) => ZeroCountRow { n, radius: r, count: Some(c), error: None },
                Err(e) => {
                    verdict = verdict.and(Verdict::Inconclusive);
                    ZeroCountRow { n, radius: r, count: None, error: Some(e.to_string()) }
                }
            };
            counts.push(row);
        }
    }
    let annulus = match &cfg.annulus {
        Some(ann) => {
            let seq = crate::operators::OperatorSequence::new(label, expr);
            let rep = annulus_zero_free(&seq, 1..=n_top, ann, &cfg.criterion_options());
            verdict = verdict.and(rep.verdict);
            Some(rep)
        }
        None => None,
    };
    let summary = counts
        .iter()
        .map(|r| match r.count {
            Some(c) => format!("n = {}, |t| = {}: {c} zeros", r.n, r.radius),
            None => format!("n = {}, |t| = {}: {}", r.n, r.radius, r.error.as_deref().unwrap_or("")),
        })
        .collect();
    Ok((verdict, summary, CommandResult::Zeros(ZerosResult { counts, annulus })))
}

fn run_bg(cfg: &ExperimentConfig) -> Result<(Verdict, Vec<String>, CommandResult)> {
    let seq = cfg.require_sequence()?;
    let ann = cfg.require_annulus()?;
    let g = grid(cfg);
    let q = cfg.quadrature;
    let mut results = Vec::new();
    let mut verdict = Verdict::PassNumeric;
    let mut summary = Vec::new();
    for p in targets(cfg)? {
        let ledgers = vec![
            bound_condition_i(seq, p, ann.r1, cfg.k_max, &q, &g)?,
            bound_condition_ii(seq, p, ann.r2, cfg.n_max, cfg.k_max, &q, &g)?,
            bound_condition_iii(seq, p, ann.r3, cfg.n_max, &q, &g)?,
        ];
        let identity = verify_condition_iv(seq, 0..=cfg.n_max.min(10), p, &q.with_radius(ann.r3), &g)?;
        for l in &ledgers {
            verdict = verdict.and(l.verdict);
            summary.push(format!(
                "degree {} {} {}: direct {:.6e} <= bound {:.6e}",
                p.degree(),
                l.condition,
                l.verdict,
                l.direct_partial_sums.last().copied().unwrap_or(0.0),
                l.analytic_bound
            ));
        }
        verdict = verdict.and(identity.verdict);
        summary.push(format!(
            "degree {} (iv) {}: deviation {:.3e}",
            p.degree(),
            identity.verdict,
            identity.max_deviation
        ));
        results.push(BgTargetResult { target: p.clone(), ledgers, identity });
    }
    Ok((verdict, summary, CommandResult::Bg { results }))
}

fn run_orbit(cfg: &ExperimentConfig) -> Result<(Verdict, Vec<String>, CommandResult)> {
    let seq = cfg.require_sequence()?;
    let f = cfg.options.f.clone().ok_or_else(|| Error::Config("orbit needs `options.f`".into()))?;
    let g = grid(cfg);
    let n_top = cfg.options.n.unwrap_or(10);
    let sup_norms = (0..=n_top).map(|n| Ok((n, orbit_apply(seq, n, &f, &g)?.sup_norm))).collect::<Result<Vec<_>>>()?;
    let density = match cfg.targets.first() {
        Some(target) => Some(hitting_density(seq, &f, target, cfg.options.eps, &g, cfg.options.horizon)?),
        None => None,
    };
    let mut summary = vec![format!("orbit sup norms for n <= {n_top} computed")];
    if let Some(d) = &density {
        summary.push(format!(
            "{} hits up to N = {}, liminf estimate {:.4}",
            d.hits.len(),
            d.horizon,
            d.liminf_estimate
        ));
    }
    Ok((Verdict::PassNumeric, summary, CommandResult::Orbit(OrbitResult { f, sup_norms, density })))
}

/// Runs one command on a validated config.
pub fn run_command(cmd: Command, cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let (verdict, summary, result) = match cmd {
        Command::Check => {
            let seq = cfg.require_sequence()?;
            let rep = check_criterion(seq, cfg.require_annulus()?, cfg.n_max, &cfg.criterion_options())?;
            (rep.overall, criterion_summary(&rep), CommandResult::Check(Box::new(rep)))
        }
        Command::Check32 => {
            let p = cfg.power.as_ref().ok_or_else(|| Error::Config("check32 needs `power`".into()))?;
            let rep =
                check_power_criterion(&p.phi, &p.scalar, cfg.n_max, &cfg.criterion_options(), &cfg.power_options())?;
            let mut summary = criterion_summary(&rep);
            if let Some(stats) = rep.power.as_ref().and_then(|s| s.ratio_stats.as_ref()) {
                summary.insert(
                    0,
                    format!("gamma = {:.6}, delta = {:.6}", stats.gamma_effective(), stats.delta_effective()),
                );
            }
            (rep.overall, summary, CommandResult::Check32(Box::new(rep)))
        }
        Command::Borel => run_borel(cfg)?,
        Command::Apply => run_apply(cfg)?,
        Command::Inverse => run_inverse(cfg)?,
        Command::Zeros => run_zeros(cfg)?,
        Command::Bg => run_bg(cfg)?,
        Command::Orbit => run_orbit(cfg)?,
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: cmd,
        config: cfg.clone(),
        verdict,
        exit_code: verdict.exit_code(),
        summary,
        result,
        sidecars: Vec::new(),
        run_info: RunInfo { timestamp, wall_clock_seconds: start.elapsed().as_secs_f64() },
    })
}

/// A CSV file as a header and string rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Sidecar {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

fn sidecar(name: impl Into<String>, header: &[&str], rows: Vec<Vec<String>>) -> Sidecar {
    Sidecar { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows }
}

fn ledger_sidecar(name: String, l: &ConvergenceLedger) -> Sidecar {
    let rows = (0..l.direct_terms.len())
        .map(|i| {
            vec![
                (i + 1).to_string(),
                num(l.direct_terms[i]),
                num(l.direct_partial_sums[i]),
                num(l.majorant_partial_sums[i]),
            ]
        })
        .collect();
    sidecar(name, &["index", "direct_term", "direct_partial_sum", "majorant_partial_sum"], rows)
}

/// Plot-ready tables derived from arrays in the report.
pub fn sidecars(report: &RunReport) -> Vec<Sidecar> {
    let cmd = report.command.name();
    match &report.result {
        CommandResult::Check(rep) | CommandResult::Check32(rep) => {
            let rows = rep
                .per_n
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        opt(&r.zeros_inner),
                        opt(&r.zeros_outer),
                        opt(&r.min_r1),
                        opt(&r.max_r1),
                        opt(&r.min_r2),
                        opt(&r.max_r2),
                        opt(&r.min_r3),
                        opt(&r.max_r3),
                        opt(&r.alpha_row_sum),
                        opt(&r.beta_col_sum),
                        opt(&r.e_term),
                        opt(&r.e_partial_sum),
                    ]
                })
                .collect();
            let mut out = vec![sidecar(
                format!("{cmd}_per_n.csv"),
                &[
                    "n",
                    "zeros_inner",
                    "zeros_outer",
                    "min_r1",
                    "max_r1",
                    "min_r2",
                    "max_r2",
                    "min_r3",
                    "max_r3",
                    "alpha_row_sum",
                    "beta_col_sum",
                    "e_term",
                    "e_partial_sum",
                ],
                rows,
            )];
            if let Some(m) = &rep.matrices {
                let rows = (1..m.alpha.len())
                    .flat_map(|n| {
                        (0..n).map(move |j| vec![n.to_string(), j.to_string(), num(m.alpha[n][j]), num(m.beta[n][j])])
                    })
                    .collect();
                out.push(sidecar(format!("{cmd}_matrices.csv"), &["n", "j", "alpha", "beta"], rows));
            }
            out
        }
        CommandResult::Borel { targets } => {
            let rows = targets
                .iter()
                .enumerate()
                .flat_map(|(i, t)| t.convergence.iter().map(move |(m, e)| vec![i.to_string(), m.to_string(), num(*e)]))
                .collect();
            vec![sidecar("borel_convergence.csv", &["target", "nodes", "max_error"], rows)]
        }
        CommandResult::Apply { results } => {
            let rows = results
                .iter()
                .map(|r| vec![r.n.to_string(), r.target.degree().to_string(), num(r.commutation_deviation)])
                .collect();
            vec![sidecar("apply_commutation.csv", &["n", "target_degree", "commutation_deviation"], rows)]
        }
        CommandResult::Inverse { results } => {
            let rows = results
                .iter()
                .enumerate()
                .flat_map(|(i, r)| {
                    r.identity
                        .per_n
                        .iter()
                        .map(move |&(n, dq, dt)| vec![i.to_string(), n.to_string(), num(dq), num(dt)])
                })
                .collect();
            vec![sidecar("inverse_identity.csv", &["target", "n", "quadrature_deviation", "taylor_deviation"], rows)]
        }
        CommandResult::Zeros(z) => {
            let rows = z.counts.iter().map(|r| vec![r.n.to_string(), num(r.radius), opt(&r.count)]).collect();
            vec![sidecar("zeros.csv", &["n", "radius", "count"], rows)]
        }
        CommandResult::Bg { results } => results
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.ledgers.iter().map(move |l| {
                    let id = l.condition.trim_matches(|c| c == '(' || c == ')');
                    ledger_sidecar(format!("bg_{id}_target{i}.csv"), l)
                })
            })
            .collect(),
        CommandResult::Orbit(o) => {
            let mut out = vec![sidecar(
                "orbit_sup.csv",
                &["n", "sup_norm"],
                o.sup_norms.iter().map(|(n, s)| vec![n.to_string(), num(*s)]).collect(),
            )];
            if let Some(d) = &o.density {
                let rows =
                    d.density_curve.iter().enumerate().map(|(m, v)| vec![(m + 1).to_string(), num(*v)]).collect();
                out.push(sidecar("density.csv", &["m", "d_m"], rows));
            }
            out
        }
    }
}

/// Writes `<cmd>_report.json` and its CSV sidecars into `dir`; returns the report path.
pub fn write_outputs(report: &mut RunReport, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let tables = sidecars(report);
    report.sidecars = tables.iter().map(|t| t.name.clone()).collect();
    for t in &tables {
        let mut w = csv::Writer::from_path(dir.join(&t.name)).map_err(|e| Error::Io(e.to_string()))?;
        w.write_record(&t.header).map_err(|e| Error::Io(e.to_string()))?;
        for row in &t.rows {
            w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
    }
    let path = dir.join(format!("{}_report.json", report.command.name()));
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&path, json + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
        assert!("check31".parse::<Command>().is_err());
    }

    #[test]
    fn zeros_on_z_exp9() {
        let mut cfg = ExperimentConfig::new();
        cfg.power = Some(crate::config::PowerConfig {
            phi: catalog::z_exp9(),
            scalar: crate::series::SeqScalar::LogShifted,
            seed: None,
            ratio_window: 100,
        });
        cfg.options.radii = vec![0.5, 2.0];
        let rep = run_command(Command::Zeros, &cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::PassNumeric);
        match rep.result {
            CommandResult::Zeros(z) => assert!(z.counts.iter().all(|r| r.count == Some(1))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_pieces_are_config_errors() {
        let cfg = ExperimentConfig::new();
        assert!(matches!(run_command(Command::Check, &cfg), Err(Error::Config(_))));
        assert!(matches!(run_command(Command::Borel, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn orbit_of_translation() {
        let cfg = catalog::fixtures().into_iter().find(|(n, _)| *n == "translation.json").unwrap().1;
        let rep = run_command(Command::Orbit, &cfg).unwrap();
        match &rep.result {
            CommandResult::Orbit(o) => {
                // f(z + n) = (z + n)^2 on |z| <= 1 peaks at n^2 + 2n + 1.
                for &(n, s) in &o.sup_norms {
                    let want = ((n + 1) * (n + 1)) as f64;
                    assert!((s - want).abs() < 1e-9 * want, "{n}: {s}");
                }
            }
            other => panic!("{other:?}"),
        }
    }
}
