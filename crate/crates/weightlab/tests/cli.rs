//! End-to-end tests of the `weightlab` binary: exit codes, JSON shapes,
//! CSV interchange, config-file precedence, and output determinism.

use std::path::Path;
use std::process::{Command, Output};

use weightlab::grid::{from_csv_string, make_grid};
use weightlab::operators::{fractional_integral, probe_family};

fn weightlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weightlab"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"))
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (killed by signal?)")
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(exit_code(&weightlab(&["no-such-subcommand"])), 3);
    assert_eq!(exit_code(&weightlab(&["norm", "--kind", "bogus"])), 3);
    // Validation errors funnel through the same code.
    assert_eq!(exit_code(&weightlab(&["norm"])), 3, "norm with no input");
    assert_eq!(
        exit_code(&weightlab(&["verify", "--scenario", "no-such-scenario"])),
        3
    );
    let out = weightlab(&["verify", "--scenario", "no-such-scenario"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("offdiag-chain"), "error should list the catalog: {err}");
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(exit_code(&weightlab(&["--help"])), 0);
    assert_eq!(exit_code(&weightlab(&["--version"])), 0);
    assert_eq!(exit_code(&weightlab(&["exponents", "--help"])), 0);
}

#[test]
fn gate_exit_codes_follow_membership() {
    let member = weightlab(&["exponents", "gate", "--p", "2", "--q", "1", "--a", "1/2", "--b", "-1/4"]);
    assert_eq!(exit_code(&member), 0);
    let v = stdout_json(&member);
    assert_eq!(v["gate"]["status"], "member");
    assert_eq!(v["gate"]["lower"], "-1/2");
    assert_eq!(v["gate"]["upper"], "1/2");

    let non = weightlab(&["exponents", "gate", "--p", "2", "--q", "1", "--a", "1/2", "--b", "3/5"]);
    assert_eq!(exit_code(&non), 1);
    assert_eq!(stdout_json(&non)["gate"]["status"], "nonmember");

    let boundary = weightlab(&["exponents", "gate", "--p", "2", "--q", "1", "--a", "1/2", "--b", "1/2"]);
    assert_eq!(exit_code(&boundary), 2);
    assert_eq!(stdout_json(&boundary)["gate"]["status"], "boundary");
}

#[test]
fn exponents_json_uses_rational_strings_and_inf() {
    let out = weightlab(&[
        "exponents", "deltas", "--p", "2,2", "--q", "2", "--r", "3/2,3/2,7/6",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["derived"]["delta"], serde_json::json!(["6", "6", "14/5"]));
    assert_eq!(v["derived"]["kappa"], "29/42");
    assert_eq!(v["derived"]["rho"], "21/11");

    let dual = weightlab(&["exponents", "dual", "--p", "3/2,3", "--q", "2", "--slot", "0"]);
    let v = stdout_json(&dual);
    assert_eq!(v["dual_p"], serde_json::json!(["2", "3"]));
    assert_eq!(v["dual_q"], "3");

    // ∞ serializes as "inf" and parses back from "inf".
    let ext = weightlab(&[
        "exponents", "extrapolate", "--p0", "2", "--q0", "4", "--t0", "3", "--p", "10/3",
    ]);
    let v = stdout_json(&ext);
    assert_eq!(v["q"], "20");
    assert_eq!(v["t"], "15/2");
    let dual_inf = weightlab(&["exponents", "dual", "--p", "2", "--q", "1", "--slot", "0"]);
    assert_eq!(stdout_json(&dual_inf)["dual_q"], "2");
}

#[test]
fn chain_reports_exact_stopping_data() {
    let out = weightlab(&[
        "exponents", "chain", "--alpha", "9/10", "--beta", "1/5", "--p", "10/9", "--s", "1",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["chain"]["k0"], 5);
    assert_eq!(v["chain"]["beta_limit"], "17/20");
    assert_eq!(v["chain"]["entries"][1]["beta"], "21/40");
}

#[test]
fn operator_csv_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = weightlab(&[
        "operator", "--kind", "integral", "--probe", "0", "--alpha", "0.5",
        "--N", "64", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);

    // The file reproduces the in-process computation bit for bit.
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("1,1.0000000000000000e0,64\n"));
    let written = from_csv_string(&text).unwrap();
    let grid = make_grid(1, 1.0, 64).unwrap();
    let probe = probe_family(&grid, 0x00C0_FFEE).unwrap().swap_remove(0);
    let expected = fractional_integral(&probe, 0.5).unwrap();
    assert_eq!(written.values().len(), expected.values().len());
    for (a, b) in written.values().iter().zip(expected.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    // The norm subcommand accepts the file and cross-checks explicit flags.
    let norm = weightlab(&["norm", "--input", path.to_str().unwrap(), "--p", "2"]);
    assert_eq!(exit_code(&norm), 0);
    let v = stdout_json(&norm);
    assert_eq!(v["grid"]["N"], 64);
    assert!(v["value"].as_f64().unwrap() > 0.0);
    let mismatch = weightlab(&[
        "norm", "--input", path.to_str().unwrap(), "--p", "2", "--N", "128",
    ]);
    assert_eq!(exit_code(&mismatch), 3);
}

#[test]
fn operator_requires_out_and_inputs() {
    assert_eq!(
        exit_code(&weightlab(&["operator", "--kind", "integral", "--probe", "0"])),
        3,
        "missing --out"
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    assert_eq!(
        exit_code(&weightlab(&[
            "operator", "--kind", "integral", "--out", path.to_str().unwrap()
        ])),
        3,
        "missing input"
    );
}

#[test]
fn norm_kinds_cover_the_surface() {
    let lorentz = weightlab(&[
        "norm", "--probe", "4", "--kind", "lorentz", "--p", "2", "--secondary", "inf", "--N", "64",
    ]);
    assert_eq!(exit_code(&lorentz), 0);
    assert!(stdout_json(&lorentz)["value"].as_f64().unwrap() > 0.0);

    let luxemburg = weightlab(&[
        "norm", "--probe", "0", "--kind", "luxemburg", "--p", "2", "--log-power", "1.0", "--N", "64",
    ]);
    assert_eq!(exit_code(&luxemburg), 0);

    let bmo = weightlab(&["norm", "--probe", "5", "--kind", "bmo", "--N", "64"]);
    assert_eq!(exit_code(&bmo), 0);
    let v = stdout_json(&bmo);
    assert!(v["argmax"].is_object(), "bmo norm reports its argmax cube");
    assert!(v["per_level"].is_array());

    let morrey = weightlab(&[
        "norm", "--probe", "0", "--kind", "morrey", "--p", "2.5", "--secondary", "1.05", "--N", "64",
    ]);
    assert_eq!(exit_code(&morrey), 0);
}

#[test]
fn weight_constant_identity_weight_is_one() {
    let out = weightlab(&["weight-constant", "--power", "0", "--p", "2", "--N", "64"]);
    assert_eq!(exit_code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "classical");
    assert!((v["constant"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn weight_constant_dispatches_all_three_kinds() {
    let vector = weightlab(&[
        "weight-constant", "--power", "0.125", "--power", "-0.125", "--p", "2,2", "--q", "2", "--N", "64",
    ]);
    assert_eq!(exit_code(&vector), 0);
    assert_eq!(stdout_json(&vector)["kind"], "vector");

    let partial = weightlab(&[
        "weight-constant", "--power", "0.125", "--partial-power", "-0.5",
        "--p", "2", "--q", "2", "--N", "64",
    ]);
    assert_eq!(exit_code(&partial), 0);
    let v = stdout_json(&partial);
    assert_eq!(v["kind"], "partial");
    assert!(v["constant"].as_f64().unwrap() >= 1.0);

    // A partial weight without a target exponent is a usage error.
    let missing_q = weightlab(&[
        "weight-constant", "--power", "0.125", "--partial-power", "-0.5", "--p", "2", "--N", "64",
    ]);
    assert_eq!(exit_code(&missing_q), 3);
}

#[test]
fn verify_prints_verdict_lines_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = weightlab(&[
        "verify", "--scenario", "offdiag-chain", "--scenario", "extrapolation-spot",
        "--out", dir.path().to_str().unwrap(), "--emit-plot",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("offdiag-chain: pass ("), "{}", lines[0]);
    assert!(lines[1].starts_with("extrapolation-spot: pass ("), "{}", lines[1]);

    assert!(dir.path().join("offdiag-chain.json").exists());
    assert!(dir.path().join("offdiag-chain.csv").exists());
    assert!(dir.path().join("offdiag-chain-0.svg").exists());
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("offdiag-chain.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["verdict"], "pass");
}

#[test]
fn verify_list_names_every_scenario() {
    let out = weightlab(&["verify", "--list"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 28);
    assert!(text.contains("duality"));
    assert!(text.contains("power-gate"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{ "N": 64, "L": 2.0 }"#).unwrap();

    let from_config = weightlab(&[
        "weight-constant", "--power", "0", "--p", "2", "--config", config.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&from_config), 0);
    let v = stdout_json(&from_config);
    assert_eq!(v["grid"]["N"], 64);
    assert_eq!(v["grid"]["L"], 2.0);

    let overridden = weightlab(&[
        "weight-constant", "--power", "0", "--p", "2",
        "--config", config.to_str().unwrap(), "--N", "32",
    ]);
    let v = stdout_json(&overridden);
    assert_eq!(v["grid"]["N"], 32, "explicit flag beats config");
    assert_eq!(v["grid"]["L"], 2.0, "config still supplies the rest");

    // Unknown config keys are validation errors, not silent typos.
    std::fs::write(&config, r#"{ "cells": 64 }"#).unwrap();
    assert_eq!(
        exit_code(&weightlab(&[
            "weight-constant", "--power", "0", "--p", "2", "--config", config.to_str().unwrap()
        ])),
        3
    );
}

#[test]
fn scan_identity_is_exact_and_single_stage_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    std::fs::write(
        &config,
        r#"{
            "scan": {
                "title": "identity-check",
                "operator": {"kind": "identity"},
                "lhs": {"p": "2"},
                "rhs": {"p": "2"},
                "schedule": [{"L": 1.0, "N": 32}, {"L": 1.0, "N": 64}],
                "probes": 3
            }
        }"#,
    )
    .unwrap();
    let out = weightlab(&[
        "scan", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("identity-check.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["verdict"], "pass");
    for row in report["tables"][0]["rows"].as_array().unwrap() {
        for v in row["values"].as_array().unwrap() {
            assert_eq!(v.as_f64().unwrap(), 1.0, "identity scan must give unit ratios");
        }
    }

    std::fs::write(
        &config,
        r#"{
            "scan": {
                "title": "single-stage",
                "operator": {"kind": "identity"},
                "lhs": {"p": "2"},
                "rhs": {"p": "2"},
                "schedule": [{"L": 1.0, "N": 32}],
                "probes": 2
            }
        }"#,
    )
    .unwrap();
    let single = weightlab(&["scan", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&single), 2, "one stage cannot establish stability");

    // A scan without a config section is a usage error.
    assert_eq!(exit_code(&weightlab(&["scan"])), 3);
}

#[test]
fn structured_outputs_are_deterministic() {
    let args = [
        "weight-constant", "--power", "0.125", "--partial-power", "-0.5",
        "--p", "2", "--q", "2", "--N", "64",
    ];
    let first = weightlab(&args);
    let second = weightlab(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "same inputs must give identical bytes");

    let dir = tempfile::tempdir().unwrap();
    let json_path = |sub: &Path| sub.join("duality.json");
    let run = |out_dir: &Path| {
        let out = weightlab(&[
            "verify", "--scenario", "duality", "--out", out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0);
        let mut v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(json_path(out_dir)).unwrap(),
        )
        .unwrap();
        v["runtime_ms"] = serde_json::json!(0);
        v
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&a), run(&b), "scenario reports differ only in runtime");
}
