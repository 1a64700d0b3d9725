use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_teamsem"));
    cmd.args(args).env_remove("TEAMSEM_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares JSON output with the golden file. `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str], expected_code: i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let first = run(&full);
    assert_eq!(code(&first), expected_code, "{name}: {}", stderr(&first));
    let out = stdout(&first);
    serde_json::from_str::<serde_json::Value>(&out).expect("valid json");
    assert_eq!(out, stdout(&run(&full)), "{name}: output differs between runs");
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &out).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(out, want, "{name}: differs from {}", path.display());
}

#[test]
fn eval_functional_team_is_true() {
    let o = run(&["eval", "-s", &data("m.json"), "-t", &data("functional.json"), "-f", "dep(x;y)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn eval_non_functional_team_is_false() {
    let o = run(&["eval", "-s", &data("m.json"), "-t", &data("non_functional.json"), "-f", "dep(x;y)"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn eval_strategies_agree() {
    for strategy in ["naive", "memoized", "optimized"] {
        let o = run(&[
            "eval",
            "-s",
            &data("m.json"),
            "-t",
            &data("functional.json"),
            "-f",
            "exists z. (E(z,y) | z=x)",
            "--strategy",
            strategy,
        ]);
        assert_eq!(code(&o), 0, "{strategy}");
    }
}

#[test]
fn eval_with_registered_dependency() {
    let (m, t, d) = (data("m.json"), data("functional.json"), data("antisym.json"));
    let args = ["eval", "-s", &m, "-t", &t, "-d", &d];
    let o = run(&[&args[..], &["-f", "D:antisym(x,y)"]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&[&args[..], &["-f", "D:antisym(y,x) & x=y"]].concat());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn translate_prints_compiled_formula() {
    let o = run(&["translate", "-f", "exists x. (R(x) & forall y. (R(y) -> y=x))"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "exists x. (const(x) & (x=x | (ne(x) & x=y)) & y=x)\n");
}

#[test]
fn parity_three_is_false() {
    let o = run(&["parity", "--ell", "3", "--mode", "optimized"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn parity_two_naive_is_true() {
    let o = run(&["parity", "--ell", "2", "--mode", "naive"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn tarski_with_and_without_assignment() {
    let o = run(&["tarski", "-s", &data("m.json"), "-a", &data("assignment.json"), "-f", "E(x,y)"]);
    assert_eq!(code(&o), 0);
    let o = run(&["tarski", "-s", &data("m.json"), "-f", "exists x. E(one,x)"]);
    assert_eq!(code(&o), 0);
    let o = run(&["tarski", "-s", &data("m.json"), "-f", "exists x. E(x,one)"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn equiv_reports_bound_or_counterexample() {
    let o = run(&["equiv", "x=y | x!=y", "x=x"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "equivalent (bound 2)");
    let o = run(&["equiv", "dep(x;y)", "D:antisym(x,y)", "-d", &data("antisym.json")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("counterexample:"));
}

#[test]
fn equiv_sample_depends_on_seed_only_through_the_sample() {
    let a = run(&["--seed", "1", "equiv", "x=y | x!=y", "x=x", "--sample", "30"]);
    let b = run(&["--seed", "2", "equiv", "x=y | x!=y", "x=x", "--sample", "30"]);
    assert_eq!((code(&a), code(&b)), (0, 0));
    assert_eq!(stdout(&a).trim(), "equivalent on 30 sampled instances (bound 2, seed 1)");
    // The exhaustive mode ignores the seed.
    let c = run(&["--seed", "1", "equiv", "x=y | x!=y", "x=x"]);
    let d = run(&["--seed", "2", "equiv", "x=y | x!=y", "x=x"]);
    assert_eq!(stdout(&c), stdout(&d));
}

#[test]
fn validate_kinds() {
    assert_eq!(code(&run(&["validate", "ded", "forall x,y. ((R(x,y) & R(y,x)) -> x=y)"])), 0);
    assert_eq!(code(&run(&["validate", "usentence", "exists x. (R(x) & forall y. (R(y) -> y=x))"])), 0);
    assert_eq!(code(&run(&["validate", "ded", "exists x. R(x)"])), 2);
    let o = run(&["validate", "usentence", "forall x. R(x)"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error: "));
}

#[test]
fn chain_matches_oracle() {
    // S1 = ∅, S2 = {(a)} with NE: true exactly when index 2 lies below d.
    for (d, expected) in [(1, 1), (2, 1), (3, 0)] {
        let o = run(&["chain", "-c", &data("chain.json"), "-d", &d.to_string(), "--dependency", &data("ne.json")]);
        assert_eq!(code(&o), expected, "d = {d}: {}", stderr(&o));
    }
}

#[test]
fn exit_code_matrix() {
    let m = data("m.json");
    let t = data("functional.json");
    let fd = data("fd.json");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["eval", "-s", &m, "-t", &t, "-f", "x=x"], 0),
        (vec!["eval", "-s", &m, "-t", &t, "-f", "x!=x"], 1),
        (vec!["eval", "-s", &m, "-t", &t, "-f", "x=("], 2),
        (vec!["eval", "-s", &m, "-t", &t, "-f", "E(x,z)"], 2),
        (vec!["eval", "-s", "/nonexistent/m.json", "-t", &t, "-f", "x=x"], 2),
        (vec!["eval", "-s", &m, "-t", &t], 2),
        (vec!["frobnicate"], 2),
        (vec!["parity", "--ell", "1"], 2),
        (vec!["parity", "--ell", "2", "--mode", "fast"], 2),
        (vec!["classify", "-d", &fd, "--max-domain", "4"], 3),
        (vec!["equiv", "x=x", "x=x", "--max-domain", "6", "--arity", "3"], 3),
    ];
    for (args, expected) in cases {
        let o = run(&args);
        assert_eq!(code(&o), expected, "{args:?}: {}", stderr(&o));
        if expected >= 2 {
            assert!(stderr(&o).starts_with("error:"), "{args:?}: {}", stderr(&o));
        }
    }
}

#[test]
fn bad_structure_file_is_a_usage_error() {
    let o = run(&["eval", "-s", &data("bad_structure.json"), "-t", &data("functional.json"), "-f", "x=x"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown element `c`"));
}

#[test]
fn budget_from_environment() {
    let o = run_env(&["parity", "--ell", "4"], &[("TEAMSEM_BUDGET", "5")]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).starts_with("error:"));
    let o = run_env(&["parity", "--ell", "4"], &[("TEAMSEM_BUDGET", "100000000")]);
    assert_eq!(code(&o), 0);
}

#[test]
fn golden_eval() {
    golden("eval", &["eval", "-s", &data("m.json"), "-t", &data("functional.json"), "-f", "dep(x;y)"], 0);
}

#[test]
fn golden_translate() {
    golden("translate", &["translate", "-f", "exists x. (R(x) & forall y. (R(y) -> y=x))"], 0);
}

#[test]
fn golden_translate_disjunction() {
    golden(
        "translate_disjunction",
        &["translate", "-f", "exists x. (R(x) & forall y. (R(y) -> y=x))", "-f", "forall y. (R(y) -> y=y)"],
        0,
    );
}

#[test]
fn golden_parity() {
    golden("parity", &["parity", "--ell", "3"], 1);
}

#[test]
fn golden_classify() {
    golden("classify_antisym", &["classify", "-d", &data("antisym.json")], 0);
    golden("classify_fd", &["classify", "-d", &data("fd.json")], 0);
}

#[test]
fn golden_equiv_counterexample() {
    golden("equiv_counterexample", &["equiv", "dep(x;y)", "D:antisym(x,y)", "-d", &data("antisym.json")], 1);
}

#[test]
fn golden_chain() {
    golden("chain", &["chain", "-c", &data("chain.json"), "-d", "3", "--dependency", &data("ne.json")], 0);
}

#[test]
fn golden_validate() {
    golden("validate", &["validate", "usentence", "exists x. (R(x) & forall y. (R(y) -> y=x))"], 0);
}
