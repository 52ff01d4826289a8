//! Black-box tests of the binary: exit codes, diagnostics, formats, and
//! the environment-variable resource caps.

use std::process::{Command, Output};

fn wordmeas(args: &[&str], envs: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordmeas"))
        .args(args)
        .envs(envs.iter().copied())
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn parsed(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

#[test]
fn json_envelope_has_the_advertised_fields() {
    let out = wordmeas(&["trace", "--word", "xxyyyxxY", "--m", "2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = parsed(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "trace");
    assert_eq!(v["input"]["word"], "xxyyyxxY");
    assert_eq!(v["input"]["rank"], 2);
    assert_eq!(v["params"]["m"], "2");
    assert_eq!(v["result"]["numerator"], "3N - 4");
    assert_eq!(v["result"]["denominator"], "N^2 - N");
    assert_eq!(v["result"]["n_min"], 2);
    assert!(v["timing_ms"].is_u64());
    assert!(v["tool_version"].is_string());
}

#[test]
fn plain_format_renders_flat_paths() {
    let out = wordmeas(
        &["trace", "--word", "xxyy", "--m", "1", "--format", "plain"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("result.numerator = N"));
    assert!(text.contains("result.denominator = N - 1"));
    assert!(!text.contains('{'));
}

#[test]
fn malformed_words_exit_2_with_a_diagnostic() {
    for bad in ["x$y", "x0", "q1x2"] {
        let out = wordmeas(&["trace", "--word", bad, "--m", "2"], &[]);
        assert_eq!(out.status.code(), Some(2), "word {bad:?}");
        assert!(stdout(&out).is_empty());
        assert!(stderr(&out).starts_with("error:"), "word {bad:?}");
    }
}

#[test]
fn invalid_modulus_and_group_exit_2() {
    let out = wordmeas(&["trace", "--word", "xy", "--m", "0"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = wordmeas(&["trace", "--word", "xy", "--m", "two"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = wordmeas(
        &["sample", "--word", "xy", "--group", "su:5", "--samples", "10"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("su:5"));
}

#[test]
fn surface_test_requires_exactly_one_orientation() {
    let none = wordmeas(&["surface-test", "--word", "xyXY", "--genus", "1"], &[]);
    assert_eq!(none.status.code(), Some(2));
    let both = wordmeas(
        &[
            "surface-test",
            "--word",
            "xyXY",
            "--genus",
            "1",
            "--orientable",
            "--nonorientable",
        ],
        &[],
    );
    assert_eq!(both.status.code(), Some(2));
    assert!(stderr(&both).contains("--orientable"));
}

#[test]
fn fringe_cap_env_var_exits_3() {
    let out = wordmeas(
        &["trace", "--word", "xxyy", "--m", "2"],
        &[("WORDMEAS_FRINGE_CAP", "2")],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cap"));

    // An unparseable cap is an input error, not a resource failure.
    let out = wordmeas(
        &["trace", "--word", "xxyy", "--m", "2"],
        &[("WORDMEAS_FRINGE_CAP", "lots")],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_cap_env_var_exits_3() {
    let out = wordmeas(
        &["oracle", "--word", "xyXY", "--m", "2", "--dim", "4"],
        &[("WORDMEAS_ORACLE_CAP", "100")],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cap"));

    let out = wordmeas(&["oracle", "--word", "xyXY", "--m", "2", "--dim", "30"], &[]);
    assert_eq!(out.status.code(), Some(3), "default cap should refuse N = 30");
}

#[test]
fn oracle_matches_the_exact_formula_value() {
    let out = wordmeas(&["oracle", "--word", "xxyyyxxY", "--m", "2", "--dim", "4"], &[]);
    assert_eq!(out.status.code(), Some(0));
    // (3N - 4) / (N^2 - N) at N = 4.
    assert_eq!(parsed(&out)["result"]["value"], "2/3");
}

#[test]
fn fringe_lists_bases_and_filters_by_modulus() {
    let all = wordmeas(&["fringe", "--word", "xxyy", "--list"], &[]);
    assert_eq!(all.status.code(), Some(0));
    let v = parsed(&all);
    assert_eq!(v["result"]["size"], 7);
    let elements = v["result"]["elements"].as_array().unwrap();
    assert_eq!(elements.len(), 7);
    assert!(elements.iter().all(|el| el["basis"].is_array()));

    let filtered = wordmeas(&["fringe", "--word", "xxyy", "--m", "2"], &[]);
    let v = parsed(&filtered);
    assert_eq!(v["result"]["size"], 1);
    assert_eq!(v["result"]["elements"][0]["rank"], 2);
    assert!(v["result"]["elements"][0].get("basis").is_none());
}

#[test]
fn chi_reports_witnesses_and_infinite_values_as_strings() {
    let out = wordmeas(&["chi", "--word", "xyXY", "--m", "inf"], &[]);
    let v = parsed(&out);
    assert_eq!(v["result"]["chi"], -1);
    assert_eq!(v["result"]["chi2"], "-inf");
    assert_eq!(v["result"]["unique_ae"], true);
    assert_eq!(v["result"]["witnesses"][0]["rank"], 2);

    let out = wordmeas(&["chi", "--word", "x", "--m", "inf"], &[]);
    let v = parsed(&out);
    assert_eq!(v["result"]["chi"], "-inf");
    assert_eq!(v["result"]["leading_coefficient"], 0);
}

#[test]
fn chi_at_modulus_one_points_at_the_primitivity_rank() {
    let out = wordmeas(&["chi", "--word", "xxyy", "--m", "1"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("primitivity rank"));
}

#[test]
fn pi_of_a_primitive_word_is_the_string_inf() {
    let out = wordmeas(&["pi", "--word", "x"], &[]);
    let v = parsed(&out);
    assert_eq!(v["result"]["pi"], "inf");
    assert_eq!(v["result"]["witness_count"], 0);
}

#[test]
fn rank_flag_widens_the_ambient_group() {
    let out = wordmeas(&["trace", "--word", "xx", "--m", "2", "--rank", "3"], &[]);
    let v = parsed(&out);
    assert_eq!(v["input"]["rank"], 3);
    // The trace itself only depends on the letters used.
    let narrow = wordmeas(&["trace", "--word", "xx", "--m", "2"], &[]);
    assert_eq!(parsed(&narrow)["result"]["numerator"], v["result"]["numerator"]);
}

#[test]
fn subgroup_fix_accepts_spaced_generator_lists() {
    let out = wordmeas(&["subgroup-fix", "--gens", "xx, y"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = parsed(&out);
    assert_eq!(v["result"]["numerator"], "2");
    assert_eq!(v["result"]["denominator"], "N");
    let empty = wordmeas(&["subgroup-fix", "--gens", " , "], &[]);
    assert_eq!(empty.status.code(), Some(2));
}

#[test]
fn surface_test_flags_a_non_surface_word() {
    let out = wordmeas(
        &["surface-test", "--word", "xxy", "--genus", "1", "--orientable"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = parsed(&out);
    assert_eq!(v["result"]["consistent"], false);
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["passed"] == false));
}

#[test]
fn sample_reports_moments_and_rejects_zero_samples() {
    let out = wordmeas(
        &[
            "sample", "--word", "xyXY", "--group", "sym:6", "--samples", "200", "--seed", "5",
        ],
        &[],
    );
    let v = parsed(&out);
    assert_eq!(v["result"]["samples"], 200);
    assert_eq!(v["result"]["seed"], 5);
    assert!(v["result"]["mean_re"].is_f64() || v["result"]["mean_re"].is_u64());

    let out = wordmeas(
        &["sample", "--word", "xyXY", "--group", "sym:6", "--samples", "0"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}
