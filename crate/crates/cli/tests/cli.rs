//! End-to-end tests of the command-line interface: exit codes, stream
//! discipline, JSON report shape, round-tripping, and determinism.

use std::process::{Command, Output};

use liftlab_core::catalog::{self, parse_instance};
use liftlab_core::parse_vector_field;

fn liftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftlab"))
        .args(args)
        .env_remove("LIFTLAB_GRID")
        .output()
        .expect("binary runs")
}

fn liftlab_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftlab"))
        .args(args)
        .env_remove("LIFTLAB_GRID")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is one JSON document")
}

// ---------------------------------------------------------------------------
// exit codes and stream discipline

#[test]
fn passing_verification_exits_zero() {
    let out = liftlab(&["verify", "g6.a"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("verify g6.a: ok"));
}

#[test]
fn usage_errors_go_to_stderr_with_exit_two() {
    for args in [
        vec!["verify", "nope"],
        vec!["verify", "g8[r=2,alpha=1]"],
        vec!["show", "g8[oops]"],
        vec!["solve", "g6.a", "--cap", "affine"],
        vec!["solve", "g6", "--cap", "euclidean"],
        vec!["verify-all", "--grid", "bogus"],
        vec!["frobnicate"],
    ] {
        let out = liftlab(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!stderr(&out).is_empty(), "args {args:?} wrote no stderr");
        assert!(
            stdout(&out).is_empty(),
            "args {args:?} wrote a report to stdout"
        );
    }
}

#[test]
fn computation_failures_exit_one_with_diagnostics() {
    let out = liftlab(&["--json", "cohomology", "g1", "--degree", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["outcome"]["ok"], serde_json::Value::Bool(false));
    let diag = doc["outcome"]["diagnostics"][0].as_str().unwrap();
    assert!(diag.contains("truncation degree 0"), "diag: {diag}");
}

// ---------------------------------------------------------------------------
// report contents

#[test]
fn report_envelope_has_the_documented_fields() {
    let out = liftlab(&["--json", "verify", "g8.m[r=4,alpha=1]"]);
    let doc = json(&out);
    assert_eq!(doc["command"], "--json verify g8.m[r=4,alpha=1]");
    assert_eq!(doc["id"], "g8.m[r=4,alpha=1]");
    assert_eq!(doc["params"]["r"], "4");
    assert_eq!(doc["params"]["alpha"], "1");
    assert_eq!(doc["outcome"]["ok"], serde_json::Value::Bool(true));
    assert!(doc["versions"]["liftlab-cli"].is_string());
    assert!(doc["versions"]["liftlab-core"].is_string());
    assert!(doc["timing"].is_null(), "timing must be absent by default");
    let names: Vec<&str> = doc["payload"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "closure",
            "projection",
            "kernel",
            "structure constants",
            "type",
            "transitivity"
        ]
    );
}

#[test]
fn cohomology_report_embeds_its_truncation_window() {
    let out = liftlab(&["--json", "cohomology", "g16"]);
    let doc = json(&out);
    assert_eq!(doc["payload"]["dim_h1"], 1);
    let trunc = &doc["payload"]["truncation"];
    assert!(trunc["degree"].is_u64());
    assert!(trunc["freq_budget"].is_u64());
    assert!(trunc["monomials"].is_u64());
    assert!(trunc["frequencies"].is_array());

    // explicit window flags are honored and echoed
    let out = liftlab(&["--json", "cohomology", "g16", "--degree", "7", "--freq", "3"]);
    let doc = json(&out);
    assert_eq!(doc["payload"]["truncation"]["degree"], 7);
    assert_eq!(doc["payload"]["truncation"]["freq_budget"], 3);
    assert_eq!(doc["payload"]["dim_h1"], 1);
}

#[test]
fn solve_report_lists_branches_and_notes() {
    let out = liftlab(&["--json", "solve", "g6", "--cap", "projective"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["payload"]["branches"].as_array().unwrap().len(), 0);
    let notes = doc["payload"]["notes"].as_array().unwrap();
    assert!(
        notes
            .iter()
            .any(|n| n.as_str().unwrap().contains("stabilizer is solvable")),
        "notes: {notes:?}"
    );
}

// ---------------------------------------------------------------------------
// round-tripping

#[test]
fn generator_strings_reparse_to_equal_fields() {
    for id in ["g3", "g6.a", "g8[r=5,alpha=i]", "g4[alphas=0;1,ms=1;1]", "g1.p"] {
        let out = liftlab(&["--json", "show", id]);
        assert_eq!(out.status.code(), Some(0), "show {id}");
        let doc = json(&out);
        let inst = parse_instance(id).unwrap();
        let expected = catalog::instantiate(&inst).unwrap();
        let space = catalog::space_of(&inst.family).unwrap();
        let strings = doc["payload"]["generators"].as_array().unwrap();
        assert_eq!(strings.len(), expected.len());
        for (s, want) in strings.iter().zip(&expected) {
            let parsed = parse_vector_field(s.as_str().unwrap(), space)
                .unwrap_or_else(|e| panic!("{id}: `{s}` fails to re-parse: {e}"));
            assert_eq!(&parsed, want, "{id}: `{s}` re-parses to a different field");
        }
    }
}

#[test]
fn solved_branch_generators_reparse_on_the_total_space() {
    let out = liftlab(&["--json", "solve", "g6", "--cap", "affine"]);
    let doc = json(&out);
    let branches = doc["payload"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 1);
    for b in branches {
        for s in b["generators"].as_array().unwrap() {
            parse_vector_field(s.as_str().unwrap(), liftlab_core::Space::Total)
                .unwrap_or_else(|e| panic!("`{s}` fails to re-parse: {e}"));
        }
    }
}

// ---------------------------------------------------------------------------
// determinism

#[test]
fn identical_invocations_produce_byte_identical_reports() {
    for args in [
        vec!["--json", "verify", "g6.a"],
        vec!["--json", "cohomology", "g16t"],
        vec!["--json", "solve", "g6", "--cap", "affine"],
        vec!["--json", "verify-all", "--grid", "rmax=3;alphas=0,1;freqs=0,1"],
        vec!["list"],
    ] {
        let a = liftlab(&args);
        let b = liftlab(&args);
        assert_eq!(a.stdout, b.stdout, "args {args:?} differ between runs");
        assert_eq!(a.status.code(), b.status.code());
    }
}

// ---------------------------------------------------------------------------
// grid selection

#[test]
fn grid_flag_overrides_environment_which_overrides_default() {
    let tiny = "rmax=3;alphas=0,1;freqs=0,1";
    let out = liftlab(&["--json", "verify-all", "--grid", tiny]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["payload"]["grid"], tiny);
    assert_eq!(doc["payload"]["failures"], 0);
    let n_tiny = doc["payload"]["instances"].as_u64().unwrap();
    assert!(n_tiny > 30, "tiny grid is implausibly small: {n_tiny}");

    let via_env = liftlab_with_env(&["--json", "verify-all"], "LIFTLAB_GRID", tiny);
    assert_eq!(json(&via_env)["payload"]["grid"], tiny);

    let flag_wins = liftlab_with_env(
        &["--json", "verify-all", "--grid", tiny],
        "LIFTLAB_GRID",
        "rmax=4",
    );
    assert_eq!(json(&flag_wins)["payload"]["grid"], tiny);
}

// ---------------------------------------------------------------------------
// catalog listing

#[test]
fn list_covers_every_family_with_schema() {
    let out = liftlab(&["--json", "list"]);
    let doc = json(&out);
    let fams = doc["payload"]["families"].as_array().unwrap();
    assert_eq!(fams.len(), catalog::families().len());
    let g8a = fams
        .iter()
        .find(|f| f["id"] == "g8.a")
        .expect("g8.a listed");
    assert_eq!(g8a["kind"], "lift");
    assert_eq!(g8a["base"], "g8");
    assert_eq!(g8a["type"], "affine");
    assert_eq!(
        g8a["params"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p.as_str().unwrap())
            .collect::<Vec<_>>(),
        ["r", "alpha", "s"]
    );
}
