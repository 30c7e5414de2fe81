mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::fixture_path;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_convexity"));
    c.env_remove("CONVEXITY_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A scratch file that removes itself.
struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str, contents: &[u8]) -> Self {
        let p = std::env::temp_dir().join(format!("convexity-cli-{}-{tag}.json", std::process::id()));
        std::fs::write(&p, contents).unwrap();
        Scratch(p)
    }

    fn path(&self) -> &str {
        self.0.to_str().unwrap()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

#[test]
fn passing_check_exits_zero() {
    let out = run(&["check-axioms", &fx("triangle-l1")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["command"], "check-axioms");
    assert_eq!(r["seed"], 7);
    assert!(r["spec_digest"].as_str().unwrap().starts_with("sha256:"));
    for s in ["convex_space_axioms", "gamma_axioms", "metric_axiom"] {
        assert_eq!(r["sections"][s]["failures"].as_array().unwrap().len(), 0, "{s}");
    }
}

#[test]
fn metric_sections_skipped_without_metric() {
    let out = run(&["check-axioms", &fx("twochain-semilattice")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["sections"].get("metric_axiom").is_none());
    assert!(r["notes"][0].as_str().unwrap().contains("metric"));
}

#[test]
fn failing_check_exits_one() {
    let out = run(&["check-axioms", &fx("corrupted-table")]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    let f = &r["sections"]["convex_space_axioms"]["failures"][0];
    assert_eq!(f["instance"]["axiom"], "commutativity");
    assert_eq!(f["instance"]["lambda"], "1/2");
}

#[test]
fn bad_field_is_named_on_stderr() {
    let text = std::fs::read_to_string(fixture_path("triangle-l1")).unwrap();
    let bad = Scratch::new("badfield", text.replacen("\"1/1\", \"0/1\"", "\"1/1\", \"nope\"", 1).as_bytes());
    let out = run(&["check-axioms", bad.path()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).contains("generators[1][1]"), "{}", stderr(&out));

    let unknown = Scratch::new("unknown", br#"{"kind": "hull", "dimension": 1, "generators": [["0"]], "metirc": "l1"}"#);
    let out = run(&["check-axioms", unknown.path()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("metirc"), "{}", stderr(&out));

    let asym = Scratch::new("asym", br#"{"kind": "semilattice", "elements": ["a", "b"], "meet": [["a", "a"], ["b", "b"]]}"#);
    let out = run(&["check-axioms", asym.path()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("meet"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", &fx("triangle-l1")]).status.code(), Some(2));
    assert_eq!(run(&["embed", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(run(&["recover-norm", &fx("triangle-l1")]).status.code(), Some(2));
    assert_eq!(run(&["recover-norm", &fx("triangle-l1"), "--direction", "1/2,x"]).status.code(), Some(2));
    assert_eq!(run(&["bounded", &fx("triangle-l1"), "--constant", "one"]).status.code(), Some(2));
    assert_eq!(run(&["--seed", "-3", "embed", &fx("triangle-l1")]).status.code(), Some(2));
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify-isometry"));
}

#[test]
fn seed_precedence() {
    let spec = fx("unit-segment-l1");
    let seed = |out: &Output| json(out)["seed"].as_u64().unwrap();
    assert_eq!(seed(&run(&["embed", &spec])), 1);
    let env = bin().args(["embed", &spec]).env("CONVEXITY_SEED", "5").output().unwrap();
    assert_eq!(seed(&env), 5);
    let both = bin().args(["--seed", "6", "embed", &spec]).env("CONVEXITY_SEED", "5").output().unwrap();
    assert_eq!(seed(&both), 6);
    let bad = bin().args(["embed", &spec]).env("CONVEXITY_SEED", "five").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("CONVEXITY_SEED"));
}

#[test]
fn seed_changes_samples_not_digest() {
    // Gamma instances are sampled, so the recorded failures move with the seed.
    let spec = fx("corrupted-table");
    let a = json(&run(&["--seed", "1", "check-axioms", &spec]));
    let b = json(&run(&["--seed", "2", "check-axioms", &spec]));
    assert_eq!(a["spec_digest"], b["spec_digest"]);
    assert_ne!(a["sections"]["gamma_axioms"]["failures"], b["sections"]["gamma_axioms"]["failures"]);
}

#[test]
fn cancel_search_exit_codes() {
    let out = run(&["cancel-search", &fx("triangle-l1")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sections"]["cancellation"]["found"], false);

    let out = run(&["cancel-search", &fx("twochain-semilattice")]);
    assert_eq!(out.status.code(), Some(1));
    let c = &json(&out)["sections"]["cancellation"];
    assert_eq!(c["found"], true);
    assert_eq!(c["propagation"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn impossible_operations_report_an_error() {
    let out = run(&["verify-isometry", &fx("twochain-semilattice")]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert!(r["error"].as_str().unwrap().contains("injective"), "{r}");

    let out = run(&["bounded", &fx("antichain-bottom-semilattice")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].is_string());

    let out = run(&["recover-norm", &fx("triangle-l1"), "--direction", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].is_string());
}

#[test]
fn recover_norm_reads_the_metric() {
    let out = run(&["recover-norm", &fx("square-linf"), "--direction", "1/2,-1/4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sections"]["norm_probe"]["value"], "1/2");
    let out = run(&["recover-norm", &fx("square-l1"), "--direction", "1/2,-1/4"]);
    assert_eq!(json(&out)["sections"]["norm_probe"]["value"], "3/4");
    // Too long to fit in the square at scale 1; rescaled and multiplied back.
    let out = run(&["recover-norm", &fx("square-l1"), "--direction", "3,-2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sections"]["norm_probe"]["value"], "5/1");
}

#[test]
fn bounded_with_claimed_constant() {
    let out = run(&["bounded", &fx("segment-5")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sections"]["boundedness"]["c0"], "5/1");

    let out = run(&["bounded", &fx("segment-5"), "--constant", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let f = &json(&out)["sections"]["boundedness"]["first_metric_condition"]["failures"][0];
    assert_eq!(f["lhs"], "5/1");
    assert_eq!(f["rhs"], "2/1");
}

fn write_report(tag: &str, args: &[&str]) -> Scratch {
    Scratch::new(tag, &run(args).stdout)
}

#[test]
fn replay_reproduces_recorded_failures() {
    let report = write_report("replay", &["check-axioms", &fx("corrupted-table")]);
    let out = run(&["replay", &fx("corrupted-table"), report.path()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let s = &json(&out)["sections"]["replay"];
    assert!(s["failures"].as_u64().unwrap() > 0);
    assert_eq!(s["failures"], s["reproduced"]);

    // The same failures against the repaired table no longer reproduce.
    let text = std::fs::read_to_string(fixture_path("corrupted-table")).unwrap();
    let repaired = Scratch::new("repaired", text.replace(r#"[["a", "b", "a"]"#, r#"[["a", "a", "a"]"#).as_bytes());
    let out = run(&["replay", repaired.path(), report.path()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["sections"]["replay"]["reproduced"], 0);

    assert_eq!(run(&["replay", &fx("corrupted-table"), "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["embed", "TRI"],
        vec!["verify-isometry", "TRI"],
        vec!["bounded", "TRI"],
        vec!["--seed", "123", "check-axioms", "TRI"],
    ] {
        let tri = fx("triangle-linf");
        let args: Vec<&str> = args.iter().map(|a| if *a == "TRI" { tri.as_str() } else { a }).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn fixtures_all_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        convexity::spec::parse(&text).unwrap();
        n += 1;
    }
    assert_eq!(n, 9);
}
