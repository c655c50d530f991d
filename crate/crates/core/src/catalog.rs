//! Named operator sequences and the shipped fixture configurations.

use num_complex::Complex64;

use crate::config::{ExperimentConfig, PowerConfig};
use crate::criterion::Annulus;
use crate::operators::{operator_power_expr, OperatorSequence};
use crate::series::{FunctionExpr, IndexAffine, SeqScalar, TaylorPoly};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `D^n`, symbol `z^n`.
pub fn derivative() -> OperatorSequence {
    OperatorSequence::new("D^n", FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N))
}

/// `tau_1^n f = f(. + n)`, symbol `e^{nz}`.
pub fn translation() -> OperatorSequence {
    OperatorSequence::new("tau_1^n", FunctionExpr::exp(FunctionExpr::seq(SeqScalar::Power { exponent: 1.0 })))
}

/// `Phi(z) = z + e^z / 9`.
pub fn z_exp9() -> FunctionExpr {
    FunctionExpr::z() + FunctionExpr::real(1.0 / 9.0) * FunctionExpr::exp(FunctionExpr::real(1.0))
}

/// `Phi_n(z) = 5^n z^n + 9^{-n} e^{nz}`.
pub fn five_n() -> OperatorSequence {
    let a = FunctionExpr::seq(SeqScalar::Geometric { ratio: real(5.0) })
        * FunctionExpr::pow(FunctionExpr::z(), IndexAffine::N);
    let b = FunctionExpr::seq(SeqScalar::Geometric { ratio: real(1.0 / 9.0) })
        * FunctionExpr::exp(FunctionExpr::seq(SeqScalar::Power { exponent: 1.0 }));
    OperatorSequence::new("5^n z^n + 9^-n e^nz", a + b)
}

/// `log(n+1) (z + e^z/9)^n`.
pub fn log_z_exp9() -> OperatorSequence {
    OperatorSequence::new("log(n+1) (z + e^z/9)^n", operator_power_expr(&z_exp9(), SeqScalar::LogShifted))
}

fn basis_targets() -> Vec<TaylorPoly> {
    vec![
        TaylorPoly::constant(real(1.0)),
        TaylorPoly::monomial(1, real(1.0)),
        TaylorPoly::monomial(2, real(1.0)),
        TaylorPoly::monomial(3, real(1.0)),
        TaylorPoly::new(vec![real(1.0), Complex64::new(0.0, 1.0)]),
    ]
}

/// `(file name, config)` for every shipped fixture, in the form stored on disk.
pub fn fixtures() -> Vec<(&'static str, ExperimentConfig)> {
    let mut dn = ExperimentConfig::new();
    dn.sequence = Some(derivative());
    dn.annulus = Some(Annulus::new(0.5, 2.0, 2.0));
    dn.n_max = 100;
    dn.k_max = 20;
    dn.targets = basis_targets();
    dn.quadrature = dn.quadrature.with_radius(1.0);

    let mut five = ExperimentConfig::new();
    five.sequence = Some(five_n());
    five.annulus = Some(Annulus::new(1.0 / 15.0, 1.0, 1.0));
    five.n_max = 50;
    five.k_max = 20;
    five.targets = basis_targets();
    five.quadrature = five.quadrature.with_radius(1.0);

    let mut log9 = ExperimentConfig::new();
    log9.sequence = Some(log_z_exp9());
    log9.power = Some(PowerConfig {
        phi: z_exp9(),
        scalar: SeqScalar::LogShifted,
        seed: Some([0.5, 2.0]),
        ratio_window: crate::criterion::DEFAULT_RATIO_WINDOW,
    });
    log9.annulus = Some(Annulus::new(0.5, 2.0, 2.0));
    log9.n_max = 200;
    log9.k_max = 20;
    log9.targets = basis_targets();
    log9.quadrature = log9.quadrature.with_radius(2.0);
    log9.options.radii = vec![0.5, 2.0];

    let mut divergent = ExperimentConfig::new();
    divergent.sequence = Some(derivative());
    divergent.annulus = Some(Annulus::new(1.0, 1.0, 0.5));
    divergent.n_max = 64;

    let mut factorial = ExperimentConfig::new();
    factorial.power =
        Some(PowerConfig { phi: FunctionExpr::z(), scalar: SeqScalar::Factorial, seed: None, ratio_window: 200 });
    factorial.n_max = 50;

    let mut translate = ExperimentConfig::new();
    translate.sequence = Some(translation());
    translate.targets = vec![TaylorPoly::monomial(2, real(1.0))];
    translate.options.f = Some(TaylorPoly::monomial(2, real(1.0)));
    translate.options.n = Some(5);

    vec![
        ("dn.json", dn),
        ("five_n.json", five),
        ("z_exp9_log.json", log9),
        ("neg_divergent_e.json", divergent),
        ("neg_factorial.json", factorial),
        ("translation.json", translate),
    ]
}

/// Fixtures whose sequence is one of the paper-scale positive examples.
pub fn positive_sequences() -> Vec<(OperatorSequence, Annulus)> {
    vec![
        (derivative(), Annulus::new(0.5, 2.0, 2.0)),
        (five_n(), Annulus::new(1.0 / 15.0, 1.0, 1.0)),
        (log_z_exp9(), Annulus::new(0.5, 2.0, 2.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn fixture_files_match_catalog() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        for (name, cfg) in fixtures() {
            let text = std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
            let parsed = ExperimentConfig::from_json(&text).unwrap();
            assert_eq!(parsed, cfg, "{name}");
            let on_disk: serde_json::Value = serde_json::from_str(&text).unwrap();
            let printed: serde_json::Value = serde_json::from_str(&parsed.to_json()).unwrap();
            assert_eq!(on_disk, printed, "{name} is not in canonical form");
        }
    }

    /// Rewrites the fixture files from the catalog: `cargo test -- --ignored regenerate`.
    #[test]
    #[ignore]
    fn regenerate_fixtures() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        std::fs::create_dir_all(&dir).unwrap();
        for (name, cfg) in fixtures() {
            std::fs::write(dir.join(name), cfg.to_json() + "\n").unwrap();
        }
    }

    #[test]
    fn five_n_symbol() {
        let t = Complex64::new(0.3, -0.2);
        let v = five_n().symbol(3, t).unwrap();
        let want = 125.0 * t.powu(3) + (3.0 * t).exp() / 729.0;
        assert!((v - want).norm() < 1e-12);
    }
}
