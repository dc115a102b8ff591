//! Contract tests for the `sqw` binary: exit codes, error stream format,
//! JSON envelopes, and the parser round-trip property.

use std::process::{Command, Output};

use proptest::prelude::*;
use sqw_cli::parser::{parse_expr, ParseError};

fn sqw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn normalize_reorders_heisenberg_pair() {
    let out = sqw(&["normalize", "q*p"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "p*q - z");
}

#[test]
fn normalize_output_is_a_normal_form_fixpoint() {
    for expr in ["q*p", "p^2*f - q^2*e - h*p*q", "f*e*h - 2/3*q*p*z"] {
        let first = stdout(&sqw(&["normalize", expr]));
        let second = stdout(&sqw(&["normalize", first.trim()]));
        assert_eq!(first, second, "not a fixpoint for {expr}");
    }
}

#[test]
fn syntax_errors_exit_2_with_machine_parsable_record() {
    let out = sqw(&["normalize", "e^"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.starts_with("ERROR SyntaxError: "),
        "unexpected error stream: {err}"
    );
    assert!(err.contains("byte 2"));
}

#[test]
fn zero_denominator_exits_2() {
    let out = sqw(&["normalize", "1/0*e"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("ERROR ZeroDenominator: "));
}

#[test]
fn mathematical_errors_exit_1() {
    let out = sqw(&["qwvectors", "--phi-p", "0", "--phi-q", "0", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("ERROR ZeroPhi: "));
}

#[test]
fn usage_errors_exit_2() {
    let out = sqw(&["qwvectors", "--phi-p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sqw(&["qwvectors", "--phi-p", "x", "--phi-q", "0", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn act_defaults_to_the_cyclic_vector() {
    let out = sqw(&["act", "p", "--phi-p", "2", "--phi-q", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2*w");
}

#[test]
fn act_accepts_module_element_json() {
    let out = sqw(&[
        "act",
        "p",
        "--phi-p",
        "2",
        "--phi-q",
        "3",
        "--on",
        r#"[{"monomial":[0,0,1],"coeff":"1/1"}]"#,
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2*f*w - 3*w");

    let out = sqw(&[
        "act",
        "p",
        "--phi-p",
        "2",
        "--phi-q",
        "3",
        "--on",
        r#"[{"monomial":[0,0],"coeff":"1/1"}]"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("ERROR BadElement: "));
}

#[test]
fn reduce_emits_a_witness() {
    let out = sqw(&[
        "reduce",
        r#"[{"monomial":[1,0],"coeff":"1/1"}]"#,
        "--phi-p",
        "1",
        "--phi-q",
        "0",
        "--xi",
        "0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["result"]["scalar"], "-1/1");
    assert_eq!(v["command"], "reduce");
}

#[test]
fn qwvectors_json_lists_the_expected_basis() {
    let out = sqw(&[
        "qwvectors", "--phi-p", "1", "--phi-q", "0", "--degree", "2", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let basis = v["result"].as_array().unwrap();
    assert_eq!(basis.len(), 3);
    // Degree 0 solution is the cyclic vector itself.
    assert_eq!(basis[0].as_array().unwrap().len(), 1);
    assert_eq!(basis[0][0]["monomial"], serde_json::json!([0, 0, 0]));
}

#[test]
fn json_envelope_has_the_declared_fields() {
    let out = sqw(&["normalize", "q*p", "--format", "json", "--seed", "7"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["command"], "normalize");
    assert_eq!(v["inputs"]["expr"], "q*p");
    assert_eq!(v["trunc"], 6);
    assert_eq!(v["seed"], 7);
    assert!(v["result"].is_array());
}

#[test]
fn out_flag_writes_the_envelope() {
    let dir = std::env::temp_dir().join("sqw-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("envelope.json");
    let _ = std::fs::remove_file(&path);
    let out = sqw(&["normalize", "q*p", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["command"], "normalize");
}

#[test]
fn verify_subcommand_selects_suites() {
    let out = sqw(&["verify", "--suite", "jacobi"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("suite jacobi: 252/252"));
    assert!(!text.contains("suite pbw"));
}

#[test]
fn series_and_annihilates_round_trip() {
    let out = sqw(&["series", "--phi-p", "1", "--phi-q", "0", "--d", "1:1,-2:1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("layers (top to bottom): 1, -2"));

    let out = sqw(&[
        "annihilates", "q", "--phi-p", "1", "--phi-q", "0", "--d", "1:1",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "true");

    let out = sqw(&[
        "annihilates", "h", "--phi-p", "1", "--phi-q", "0", "--d", "1:1",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "false");

    let out = sqw(&["series", "--phi-p", "1", "--phi-q", "0", "--d", "1:0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("ERROR BadFactorList: "));
}

fn arb_expr() -> impl Strategy<Value = String> {
    let factor = prop_oneof![
        (-30i64..=30, 1u64..=9).prop_map(|(n, d)| if d == 1 {
            format!("{n}")
        } else {
            format!("{n}/{d}")
        }),
        ("[ehfpqz]", 1u32..=4).prop_map(|(g, e)| if e == 1 {
            g
        } else {
            format!("{g}^{e}")
        }),
    ];
    let term = prop::collection::vec(factor, 1..4).prop_map(|fs| fs.join("*"));
    prop::collection::vec((term, prop::bool::ANY), 1..4).prop_map(|terms| {
        let mut out = String::new();
        for (i, (t, minus)) in terms.into_iter().enumerate() {
            if i == 0 {
                out.push_str(&t);
            } else {
                out.push_str(if minus { " - " } else { " + " });
                out.push_str(&t);
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parse_format_parse_is_a_fixpoint(src in arb_expr()) {
        let first = parse_expr(&src).unwrap();
        let rendered = first.format();
        let second = parse_expr(&rendered)
            .unwrap_or_else(|e| panic!("rendering {rendered:?} failed to reparse: {e}"));
        prop_assert_eq!(first, second);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // The parser must never panic, whatever bytes arrive.
    #[test]
    fn parser_total_on_arbitrary_strings(src in "\\PC{0,40}") {
        let _ = parse_expr(&src);
    }
}

#[test]
fn parser_reports_expected_tokens() {
    match parse_expr("3*") {
        Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
        other => panic!("unexpected {other:?}"),
    }
    match parse_expr("") {
        Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 0),
        other => panic!("unexpected {other:?}"),
    }
}
