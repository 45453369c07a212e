use std::path::{Path, PathBuf};
use std::process::Command;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

/// Runs the binary and returns (stdout, stderr without the timing line, exit code).
fn hp(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_hyperprove")).args(args).output().unwrap();
    let stderr: String = String::from_utf8(out.stderr)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("time: "))
        .map(|l| format!("{l}\n"))
        .collect();
    (String::from_utf8(out.stdout).unwrap(), stderr, out.status.code().unwrap())
}

fn spec(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

fn scratch(name: &str, contents: &str) -> String {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_verdicts_and_exit_codes() {
    for (name, verdict, code) in [
        ("simulation.spec", "PROVED", 0),
        ("swap.spec", "PROVED", 0),
        ("align.spec", "PROVED", 0),
        ("weak_until.spec", "PROVED", 0),
        ("echo.spec", "PROVED", 0),
        ("incr.spec", "PROVED", 0),
        ("simulation_reversed.spec", "UNKNOWN", 1),
    ] {
        let (out, err, c) = hp(&["check", "--oracle", &spec(name)]);
        assert_eq!(c, code, "{name}: {out}{err}");
        assert!(out.starts_with(verdict), "{name}: {out}");
        assert!(out.contains("oracle: agrees"), "{name}: {out}");
    }
}

#[test]
fn check_reports_region_and_rounds() {
    let (out, _, _) = hp(&["check", &spec("simulation.spec")]);
    assert_eq!(out, "PROVED\narena nodes: 3\nregion size: 3\nrounds: 0\n");
}

#[test]
fn strategy_dump_lists_replies() {
    let (out, _, code) = hp(&["check", "--strategy-dump", &spec("simulation.spec")]);
    assert_eq!(code, 0);
    assert!(out.contains("strategy:"), "{out}");
    assert!(out.contains("play"), "{out}");
}

#[test]
fn prove_closes_every_example_script() {
    for name in ["simulation.spec", "swap.spec", "align.spec", "weak_until.spec", "echo.spec", "incr.spec"] {
        let (out, err, code) = hp(&["prove", &spec(name)]);
        assert_eq!(code, 0, "{name}: {out}{err}");
        assert!(out.contains("QED"), "{name}: {out}");
    }
}

#[test]
fn prove_reports_failed_tactic() {
    let src = "imp L { loop { input x; output x } }\n\
               imp R { loop { input x; output x } }\n\
               atom double(e1, e2) := (e1 is out(x)) implies (e2 == out(2*x));\n\
               modulus 4;\n\
               query forall L exists R : always double;\n\
               proof init. sync. step (2 * v1). cycle. qed\n";
    let (out, _, code) = hp(&["prove", &scratch("early_cycle.spec", src)]);
    assert_eq!(code, 1);
    assert!(out.contains("FAILED at tactic 4 `cycle`"), "{out}");
    assert!(out.contains("guarded hypothesis"), "{out}");
}

#[test]
fn prove_without_script_is_a_usage_error() {
    let src = "lts A { states s; init s; s -a-> s; }\nquery forall A exists A : always eq;\n";
    let (_, err, code) = hp(&["prove", &scratch("no_proof.spec", src)]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn witness_examples() {
    let (out, _, code) = hp(&["witness", &spec("align.spec"), "a^w"]);
    assert_eq!(code, 0);
    assert_eq!(out, "PROVED\nforall TS1: a^w\nexists TS2: b^w\n");
    let (out, _, code) = hp(&["witness", &spec("swap.spec"), "a^w"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("exists TS: b^w\n"), "{out}");
    let (out, _, code) = hp(&["witness", &spec("align.spec"), "c^w"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("NOT A TRACE"), "{out}");
    let (out, _, code) = hp(&["witness", &spec("simulation_reversed.spec"), "a b^w"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("UNKNOWN"), "{out}");
}

#[test]
fn witness_for_echo_doubles_outputs() {
    let (out, _, code) = hp(&["witness", &spec("echo.spec"), "(in(1) out(1))^w"]);
    assert_eq!(code, 0, "{out}");
    let exists = out.lines().find(|l| l.starts_with("exists")).unwrap();
    assert!(exists.contains("out(2)"), "{out}");
    // With inputs restricted to {0, 1} on both sides, out(2) is unreachable.
    let (out, _, code) = hp(&["witness", "--input-domain", "0..1", &spec("echo.spec"), "(in(1) out(1))^w"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("UNKNOWN"), "{out}");
}

#[test]
fn monitor_examples() {
    let (out, _, code) = hp(&["monitor", &spec("echo.spec"), &spec("double_left.log"), &spec("double_right.log")]);
    assert_eq!((out.lines().next(), code), (Some("OK"), 0), "{out}");
    let (out, _, code) = hp(&["monitor", &spec("echo.spec"), &spec("double_left.log"), &spec("double_bad.log")]);
    assert_eq!(code, 1);
    assert!(out.starts_with("VIOLATION at 0\n"), "{out}");
    let (out, _, code) = hp(&["monitor", &spec("weak_until.spec"), &spec("wu_left.log"), &spec("wu_right.log")]);
    assert_eq!(code, 0);
    assert_eq!(out, "OK\nresidual: true\n");
}

#[test]
fn monitor_rejects_length_mismatch() {
    let (_, err, code) = hp(&["monitor", &spec("weak_until.spec"), &spec("wu_left.log"), &spec("double_left.log")]);
    assert_eq!(code, 2);
    assert!(err.contains("error:"), "{err}");
}

#[test]
fn malformed_formula_reports_location() {
    let src = "lts A { states s; init s; s -a-> s; }\nquery forall A exists A : always (eq and);\n";
    let (out, err, code) = hp(&["check", &scratch("bad_formula.spec", src)]);
    assert_eq!(code, 2, "{out}");
    assert!(err.contains("2:"), "no line number in {err}");
}

#[test]
fn bad_flags_are_usage_errors() {
    let (_, _, code) = hp(&["check", "--no-such-flag", &spec("simulation.spec")]);
    assert_eq!(code, 2);
    let (_, _, code) = hp(&["check", "--input-domain", "3..1", &spec("echo.spec")]);
    assert_eq!(code, 2);
    let (_, _, code) = hp(&["check", &spec("missing.spec")]);
    assert_eq!(code, 2);
}

#[test]
fn resource_caps_exit_two() {
    let (_, err, code) = hp(&["check", "--max-nodes", "2", &spec("echo.spec")]);
    assert_eq!(code, 2);
    assert!(err.contains("error:"), "{err}");
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["check", "--strategy-dump", "--oracle"],
        vec!["prove"],
    ] {
        for name in ["echo.spec", "incr.spec", "swap.spec"] {
            let mut a = args.clone();
            let s = spec(name);
            a.push(&s);
            assert_eq!(hp(&a), hp(&a), "{a:?}");
        }
    }
}
