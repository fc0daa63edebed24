use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotaposet")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn counts_example() {
    assert_eq!(stdout(&["count", "--instance", &fixture("example.sm")]), "4\n");
}

#[test]
fn counts_empty_dag() {
    assert_eq!(stdout(&["count", "--dag", &fixture("empty.dag"), "--decomp", &fixture("empty.pd")]), "1\n");
}

#[test]
fn counts_dag_with_any_decomposition() {
    let dag = fixture("diamond.dag");
    assert_eq!(stdout(&["count", "--dag", &dag]), "6\n");
    assert_eq!(stdout(&["count", "--dag", &dag, "--decomp", &fixture("diamond_wide.pd")]), "6\n");
    assert_eq!(code(&["count", "--dag", &dag, "--decomp", &fixture("empty.pd")]), 2);
    assert_eq!(code(&["count", "--dag", &dag, "--width-cap", "1"]), 3);
}

#[test]
fn counts_several_files_in_order() {
    let ex = fixture("example.sm");
    let out = stdout(&["count", "--jobs", "3", "--instance", &ex, &ex, &ex]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.ends_with(": 4")));
}

#[test]
fn every_model_round_trips() {
    for poset in ["chain3.dag", "diamond.dag", "empty.dag"] {
        for model in ["generic", "complete", "bounded3", "attr6", "list2inf", "range"] {
            let out = scratch(&format!("{model}-{poset}.sm"));
            let out_s = out.to_string_lossy();
            stdout(&["realize", "--model", model, "--poset", &fixture(poset), "-o", &out_s]);
            assert_eq!(stdout(&["verify", "--poset", &fixture(poset), "--instance", &out_s]), "ok\n");
        }
    }
}

#[test]
fn realize_writes_sidecars() {
    let out = scratch("sidecar-attr6.sm");
    stdout(&["realize", "--model", "attr6", "--poset", &fixture("diamond.dag"), "-o", &out.to_string_lossy()]);
    let profiles = fs::read_to_string(format!("{}.profiles", out.display())).unwrap();
    assert!(profiles.lines().any(|l| l.starts_with("point m[")));
    assert!(profiles.lines().any(|l| l.starts_with("weights w[")));

    let out = scratch("sidecar-list.sm");
    stdout(&["realize", "--model", "list2inf", "--poset", &fixture("diamond.dag"), "-o", &out.to_string_lossy()]);
    let lists = fs::read_to_string(format!("{}.lists", out.display())).unwrap();
    assert!(lists.starts_with("LM1: "));
    assert!(lists.lines().nth(1).unwrap().starts_with("LM2: "));
    assert!(lists.lines().filter(|l| l.starts_with("group m[")).count() > 0);
}

#[test]
fn realize_to_stdout_with_coloring() {
    let coloring = scratch("diamond.colors");
    fs::write(&coloring, "1 2 1\n1 3 2\n2 4 1\n3 4 2\n").unwrap();
    let text = stdout(&[
        "realize",
        "--model",
        "generic",
        "--poset",
        &fixture("diamond.dag"),
        "--coloring",
        &coloring.to_string_lossy(),
    ]);
    assert!(text.starts_with("SM "));
    let inst = scratch("colored.sm");
    fs::write(&inst, &text).unwrap();
    assert_eq!(stdout(&["verify", "--poset", &fixture("diamond.dag"), "--instance", &inst.to_string_lossy()]), "ok\n");

    fs::write(&coloring, "1 2 1\n").unwrap();
    let args = ["realize", "--model", "generic", "--poset", &fixture("diamond.dag"), "--coloring"];
    assert_eq!(code(&[&args[..], &[&coloring.to_string_lossy()]].concat()), 2);
}

#[test]
fn verify_mismatch_exits_two() {
    let out = scratch("chain-for-mismatch.sm");
    stdout(&["realize", "--model", "bounded3", "--poset", &fixture("chain3.dag"), "-o", &out.to_string_lossy()]);
    let result = run(&["verify", "--poset", &fixture("diamond.dag"), "--instance", &out.to_string_lossy()]);
    assert_eq!(result.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&result.stdout), "mismatch\n");
}

#[test]
fn median_and_fair_on_example() {
    let ex = fixture("example.sm");
    let lower = "m1 w2\nm2 w1\nm3 w3\nm4 w4\n# N=4 sM=7 sW=10 delta=3 beta=10\n";
    assert_eq!(stdout(&["median", "--instance", &ex]), lower);
    assert_eq!(
        stdout(&["median", "--instance", &ex, "--upper"]),
        "m1 w2\nm2 w1\nm3 w4\nm4 w3\n# N=4 sM=10 sW=6 delta=4 beta=10\n"
    );
    assert_eq!(stdout(&["fair", "--instance", &ex, "--objective", "sexequal"]), lower);
    assert_eq!(stdout(&["fair", "--instance", &ex, "--objective", "balanced"]), lower);
}

#[test]
fn sampling_is_reproducible() {
    let ex = fixture("example.sm");
    let a = stdout(&["sample", "--instance", &ex, "--seed", "5", "--draws", "20"]);
    let b = stdout(&["sample", "--instance", &ex, "--seed", "5", "--draws", "20"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().filter(|l| l.starts_with("# draw")).count(), 20);
    assert_eq!(code(&["sample", "--instance", &ex]), 1);
}

#[test]
fn analyze_example() {
    let dot = scratch("example.dot");
    let out = stdout(&["analyze", "--instance", &fixture("example.sm"), "--dot", &dot.to_string_lossy()]);
    assert!(out.starts_with("rotations 3\nr1 (m1,w1),(m2,w2)\n"));
    assert!(out.contains("r1 -> r2 rule=2\n"));
    assert!(out.contains("\nrange "));
    assert!(out.contains("\nextent width "));
    assert!(fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn oracles() {
    let ex = fixture("example.sm");
    assert_eq!(stdout(&["oracle", "count", "--instance", &ex]), "4\n");
    assert_eq!(code(&["oracle", "count", "--instance", &ex, "--cap", "2"]), 3);
    assert_eq!(stdout(&["oracle", "downsets", "--dag", &fixture("diamond.dag")]), "6\n");
    assert_eq!(stdout(&["oracle", "pathwidth", "--dag", &fixture("diamond.dag")]), "2\n");
    let all = stdout(&["oracle", "matchings", "--instance", &ex]);
    assert!(all.ends_with("# N=4\n"));
}

#[test]
fn error_codes() {
    assert_eq!(code(&["count", "--instance", &fixture("duplicate.sm")]), 2);
    assert_eq!(code(&["count", "--instance", "/nonexistent/file.sm"]), 2);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["realize", "--model", "nope", "--poset", "x"]), 1);
    assert_eq!(code(&["--help"]), 0);
}
