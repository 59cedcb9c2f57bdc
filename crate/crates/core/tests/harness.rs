use std::process::Command;

use riesz_morrey::geom::Point;
use riesz_morrey::harness::{
    emit_report, presets, run, ExperimentConfig, OutputFormat, Verdict, CSV_HEADER,
};
use riesz_morrey::kernel::Kernel;
use riesz_morrey::operators::{riesz_apply, QuadratureSpec};
use riesz_morrey::report::Extended;
use riesz_morrey::spaces::{Shape, TestFunction};
use riesz_morrey::Error;

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(text).unwrap()
}

const INDICATORS: &str = r#"
[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "gaussian"
terms = [{ shape = "gaussian", width = 1.0 }]
"#;

#[test]
fn poisoned_row_leaves_other_rows_untouched() {
    let clean = run(&cfg(&format!(
        "preset = \"spanne-classical\"\n{INDICATORS}"
    )))
    .unwrap();
    let poisoned = run(&cfg(r#"preset = "spanne-classical"
[[functions]]
id = "indicator-1"
terms = [{ shape = "indicator", radius = 1.0 }]

[[functions]]
id = "two-centres"
terms = [{ shape = "indicator", radius = 1.0 }, { shape = "indicator", radius = 0.5, center = [3.0] }]

[[functions]]
id = "gaussian"
terms = [{ shape = "gaussian", width = 1.0 }]
"#))
    .unwrap();
    assert_eq!(poisoned.rows.len(), 3);
    assert!(poisoned.rows[1].error.is_some());
    assert_eq!(poisoned.rows[0], clean.rows[0]);
    assert_eq!(poisoned.rows[2], clean.rows[1]);
    assert_eq!(poisoned.stats.row_errors, 1);
    assert_ne!(poisoned.verdict, Verdict::BoundedEvidence);
}

#[test]
fn zero_function_is_vacuous() {
    let r = run(&ExperimentConfig::preset("spanne-zero").unwrap()).unwrap();
    assert_eq!(r.verdict, Verdict::Vacuous);
    assert!(r.rows.iter().all(|row| row.degenerate));
    assert_eq!(r.verdict.exit_code(), 0);
}

#[test]
fn csv_has_header_and_one_line_per_row() {
    let r = run(&cfg(&format!(
        "preset = \"spanne-classical\"\n{INDICATORS}"
    )))
    .unwrap();
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + r.rows.len());
    assert!(lines[1].starts_with("indicator-1,"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let r = run(&ExperimentConfig::preset("conditions-classical").unwrap()).unwrap();
    let path = std::path::Path::new("/nonexistent-directory/report.json");
    match emit_report(&r, OutputFormat::Json, path) {
        Err(Error::Io { path: p, .. }) => assert!(p.contains("nonexistent-directory")),
        other => panic!("expected an i/o error, got {other:?}"),
    }
}

#[test]
fn tail_function_potential_is_finite_at_origin() {
    // σ_n ∫_1^∞ t^{-2n} t^{α-1} dt = σ_n / (2n - α)
    for (n, sigma) in [
        (1usize, 2.0),
        (2, 2.0 * std::f64::consts::PI),
        (3, 4.0 * std::f64::consts::PI),
    ] {
        let alpha = 0.5;
        let f = TestFunction::single(
            "tail",
            Point::origin(n),
            Shape::ComplementPower { radius: 1.0 },
        )
        .unwrap();
        let k = Kernel::power(n, alpha).unwrap();
        let v = riesz_apply(&f, &k, &Point::origin(n), &QuadratureSpec::default())
            .unwrap()
            .value;
        let exact = sigma / (2.0 * n as f64 - alpha);
        assert!((v - exact).abs() < 1e-8 * exact, "n = {n}: {v} vs {exact}");
    }
}

#[test]
fn every_preset_round_trips_to_identical_reports() {
    for name in ["conditions-classical", "hardy-classical", "spanne-zero"] {
        let a = ExperimentConfig::preset(name).unwrap();
        let b = ExperimentConfig::from_toml_str(&a.to_toml().unwrap()).unwrap();
        assert_eq!(
            run(&a).unwrap().to_json().unwrap(),
            run(&b).unwrap().to_json().unwrap(),
            "{name}"
        );
    }
    for name in presets::NAMES {
        ExperimentConfig::preset(name).unwrap();
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let e = ExperimentConfig::from_toml_str("preset = \"spanne-classical\"\nradius_grid = 3\n")
        .unwrap_err();
    assert!(matches!(e, Error::Config(_)));
}

#[test]
fn constant_weight_through_the_weighted_pipeline() {
    let plain = run(&cfg(&format!(
        "preset = \"spanne-classical\"\n{INDICATORS}"
    )))
    .unwrap();
    let weighted = run(&cfg(&format!(
        "preset = \"spanne-classical\"\nweight = {{ family = \"power\", beta = 0.0 }}\n{INDICATORS}"
    )))
    .unwrap();
    assert_eq!(plain.verdict, weighted.verdict);
    for (a, b) in plain.conditions.iter().zip(&weighted.conditions) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.holds, b.holds);
    }
    let (x, y) = (
        plain.sup_ratio.unwrap().value(),
        weighted.sup_ratio.unwrap().value(),
    );
    // target norms integrate a linearly interpolated potential profile; the two weight
    // paths place their quadrature breaks differently, which moves the result well
    // inside the interpolation error
    assert!((x - y).abs() < 1e-5 * x, "{x} vs {y}");
}

#[test]
fn bounded_spanne_implies_bounded_lemma() {
    let spanne = run(&cfg(&format!(
        "preset = \"spanne-classical\"\n{INDICATORS}"
    )))
    .unwrap();
    assert_eq!(spanne.verdict, Verdict::BoundedEvidence);
    let lemma = run(&cfg("preset = \"lemma-classical\"\n[[functions]]\nid = \"indicator-1\"\nterms = [{ shape = \"indicator\", radius = 1.0 }]\n"))
    .unwrap();
    assert!(matches!(lemma.sup_ratio, Some(Extended::Finite(_))));
    assert!(lemma.ratio_stable);
}

#[test]
fn bounded_evidence_means_conditions_hold_and_ratios_settle() {
    for name in ["spanne-classical", "spanne-weak", "hardy-classical"] {
        let r = run(&ExperimentConfig::preset(name).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::BoundedEvidence, "{name}");
        assert!(r.conditions.iter().all(|c| c.holds), "{name}");
        assert!(r.ratio_stable, "{name}");
    }
}

#[test]
fn endpoint_and_increasing_phi_fail_their_conditions() {
    for (name, id) in [
        ("spanne-endpoint", "spanne-integral"),
        ("adams-increasing-phi", "adams-phi-one-sided"),
    ] {
        let r = run(&ExperimentConfig::preset(name).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::ConditionsFail, "{name}");
        assert!(
            r.conditions.iter().any(|c| c.id == id && !c.holds),
            "{name}"
        );
    }
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_riesz-morrey"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn cli_exit_codes_and_formats() {
    let (code, stdout, stderr) = cli(&["experiment", "--preset", "spanne-zero"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"schema\": \"riesz-morrey/report/v1\""));
    assert!(stdout.contains("\"verdict\": \"vacuous\""));
    assert!(stderr.contains("elapsed"));
    assert!(!stdout.contains("elapsed"));

    let (code, stdout, _) = cli(&[
        "check-kernel",
        "--preset",
        "conditions-classical",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("id,holds,empirical_c,stable\n"));

    let (code, _, _) = cli(&["check-conditions", "--preset", "spanne-endpoint"]);
    assert_eq!(code, 1);

    let (code, _, stderr) = cli(&["experiment", "--preset", "no-such-preset"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown preset"));

    let (code, stdout, _) = cli(&[
        "potential",
        "--preset",
        "spanne-classical",
        "--function",
        "indicator-1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("x,value,est_error\n"));
}
