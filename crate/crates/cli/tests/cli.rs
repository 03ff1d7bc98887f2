use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_morrap"));
    c.env_remove("MORRAP_GRID").env_remove("MORRAP_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn bundled_text() -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/pharma_plant.toml");
    fs::read_to_string(p).unwrap()
}

fn write_variant(dir: &Path, name: &str, from: &str, to: &str) -> PathBuf {
    let text = bundled_text();
    assert!(text.contains(from), "bundled file lacks `{from}`");
    let p = dir.join(name);
    fs::write(&p, text.replacen(from, to, 1)).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_succeeds_on_bundled_instance() {
    let o = run(&["solve"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for section in ["# run", "# payoff", "# solutions", "# reference_checks"] {
        assert!(text.contains(section), "missing {section}");
    }
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let a = bin().args(["solve", "--profile", "reproduce"]).env("MORRAP_WORKERS", "1").output().unwrap();
    let b = bin().args(["solve", "--profile", "reproduce"]).env("MORRAP_WORKERS", "4").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_variant(dir.path(), "a.toml", "alpha_scaled_1e5 = 0.611360\n", "");
    let o = run(&["solve", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("load stage"), "{err}");
    assert!(err.contains("alpha_scaled_1e5"), "{err}");
}

#[test]
fn unknown_option_values_are_input_errors() {
    for args in [
        &["solve", "--reduction", "median"][..],
        &["solve", "--method", "lexicographic"],
        &["solve", "--weights", "0.5"],
        &["solve", "--p", "0.5"],
        &["solve", "--format", "xml"],
        &["solve", "--profile", "loose"],
        &["solve", "--nimbus-cost", "aspiration"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn empty_feasible_region_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_variant(dir.path(), "v.toml", "V = 289", "V = 10");
    let o = run(&["solve", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("payoff stage"));
}

#[test]
fn single_design_region_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_variant(dir.path(), "r.toml", "strict = 3", "strict = 1");
    let o = run(&["solve", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn budget_is_enforced() {
    let o = run(&["solve", "--profile", "reproduce", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let toml_run = stdout(&o);
    assert!(toml_run.trim_start().starts_with('{'));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"V\": 1}").unwrap();
    let o = run(&["solve", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn defuzzify_lists_every_subsystem() {
    let o = run(&["defuzzify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let table: Vec<_> = text
        .lines()
        .skip_while(|l| *l != "# defuzzification")
        .skip(2)
        .take_while(|l| !l.is_empty())
        .collect();
    assert_eq!(table.len(), 10);
}

#[test]
fn grid_comes_from_the_environment() {
    let a = bin().args(["defuzzify"]).env("MORRAP_GRID", "101").output().unwrap();
    let b = run(&["defuzzify", "--grid", "101"]);
    let c = run(&["defuzzify"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let bad = run(&["defuzzify", "--grid", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn pareto_export_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("front.csv");
    let o = run(&["pareto", "--verify", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("verified "));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("kind,w_reliability,cost,reliability,design,on_front\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("sweep,")).count(), 21);
}

#[test]
fn gen_is_seeded() {
    let a = run(&["gen", "--seed", "11", "--r", "0.7,0.9"]);
    let b = run(&["gen", "--seed", "11", "--r", "0.7,0.9"]);
    let c = run(&["gen", "--seed", "12", "--r", "0.7,0.9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);

    let o = run(&["gen", "--r", "0.2"]);
    assert_eq!(o.status.code(), Some(2), "r below the support is rejected");
}

#[test]
fn compare_reports_both_sets() {
    let o = run(&["compare", "--method", "fuzzy"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("generated (seed 2024)"));
    assert!(text.contains(",it2\n") && text.contains(",t1\n"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("payoff.csv");
    let a = run(&["payoff", "--out", out.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout.is_empty());
    let b = run(&["payoff"]);
    assert_eq!(fs::read(out).unwrap(), b.stdout);
}

#[test]
fn seed_changes_generated_type1_inputs_only() {
    let a = run(&["compare", "--method", "weighted", "--seed", "5"]);
    let b = run(&["compare", "--method", "weighted"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let (a, b) = (stdout(&a), stdout(&b));
    assert!(a.contains("generated (seed 5)"));
    let it2 = |s: &str| s.lines().filter(|l| l.ends_with(",it2")).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(it2(&a), it2(&b));
    assert_ne!(a, b);
}
