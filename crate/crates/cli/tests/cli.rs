use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approval_gsp::axioms::Witness;
use approval_gsp::rules::RuleSpec;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn agsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agsp"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn record<'a>(recs: &'a [(String, String)], key: &str) -> &'a str {
    &recs.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no record {key}")).1
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("fixtures/golden").join(name)).unwrap()
}

#[test]
fn eval_on_fixtures() {
    for rule in ["minisum", "minimax"] {
        let o = agsp(&["--format", "records", "eval", "--rule", rule, "--profile", "fixtures/unanimous.txt"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(record(&records(&stdout(&o)), "outcome"), "0110");
    }
    // The dictator approves {x} plus the dummy.
    let o = agsp(&["--format", "records", "eval", "--rule", "kcompletion:0", "--profile", "fixtures/final_step_px.txt"]);
    assert_eq!(record(&records(&stdout(&o)), "outcome"), "1001");
}

#[test]
fn reduce_matches_golden() {
    let o = agsp(&["--format", "records", "reduce", "--ranking", "fixtures/example_ranking.txt", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("reduce_example.records"));
}

#[test]
fn reduce_emits_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("approval.txt");
    let o = agsp(&[
        "reduce",
        "--ranking",
        "fixtures/example_ranking.txt",
        "--k",
        "2",
        "--emit-approval",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(out).unwrap(), "4 2 4\n1001\n1101\n0101\n0111\n");
}

#[test]
fn counterexample_matches_golden() {
    let args = ["counterexample", "--rule", "kcompletion:0", "--m", "4", "--k", "2"];
    let o = agsp(&[&["--format", "records"][..], &args].concat());
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(stdout(&o), golden("counterexample_kcompletion.records"));
    let human = stdout(&agsp(&args));
    assert!(human.contains(&golden("final_step_table.txt")), "{human}");
}

#[test]
fn final_step_fixtures_match_constructed_profiles() {
    let human = stdout(&agsp(&["counterexample", "--rule", "kcompletion:0", "--m", "4", "--k", "2"]));
    for (label, file) in [("P_x", "final_step_px.txt"), ("P_y", "final_step_py.txt"), ("P_xy", "final_step_pxy.txt")] {
        let fixture = std::fs::read_to_string(root().join("fixtures").join(file)).unwrap();
        let body: String = fixture.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert!(human.contains(&format!("{label}\n{body}")), "{label}");
    }
}

#[test]
fn ranking_search_is_unsat() {
    let o = agsp(&[
        "--format", "records", "search", "--side", "ranking", "--axioms", "sp-ranking,onto,non-dictatorship", "--m", "3",
        "--n", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(record(&records(&stdout(&o)), "status"), "unsat");
}

#[test]
fn unanimity_failure_is_a_finding() {
    let o = agsp(&["--format", "records", "check", "--axiom", "unanimity", "--rule", "constant:110", "--m", "3", "--k", "2"]);
    assert_eq!(o.status.code(), Some(10));
    let recs = records(&stdout(&o));
    assert_eq!(record(&recs, "holds"), "false");
    assert_eq!(record(&recs, "witness.kind"), "unanimity");
}

#[test]
fn witness_records_round_trip() {
    for (rule, args) in [
        ("kcompletion:0", vec!["check", "--axiom", "strong-gsp", "--m", "3", "--k", "1"]),
        ("minimax", vec!["check", "--axiom", "sp", "--m", "3", "--k", "1"]),
        ("constant:011", vec!["check", "--axiom", "unanimity", "--m", "3", "--k", "2"]),
        ("constant:110", vec!["check", "--axiom", "pareto", "--m", "3", "--k", "2"]),
        ("kcompletion:0", vec!["counterexample", "--m", "4", "--k", "2"]),
    ] {
        let mut full = vec!["--format", "records"];
        full.extend(&args);
        full.extend(["--rule", rule]);
        let o = agsp(&full);
        assert_eq!(o.status.code(), Some(10), "{full:?}");
        let w = Witness::from_records(&records(&stdout(&o))).unwrap();
        w.replay(&RuleSpec::parse(rule).unwrap()).unwrap();
    }
}

#[test]
fn ranking_witness_round_trip() {
    use approval_gsp::ranking::RankingRule;
    let o = agsp(&["--format", "records", "check", "--axiom", "sp-ranking", "--rule", "borda", "--m", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(10));
    let w = Witness::from_records(&records(&stdout(&o))).unwrap();
    w.replay_ranking(&RankingRule::Borda).unwrap();
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 1 2\n100\n10x\n").unwrap();
    let o = agsp(&["eval", "--rule", "minisum", "--profile", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    std::fs::write(&bad, "3 1 2\n100\n1000\n").unwrap();
    let o = agsp(&["eval", "--rule", "minisum", "--profile", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = agsp(&["check", "--axiom", "sp", "--rule", "minisum", "--m", "3", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = agsp(&["check", "--axiom", "unanimity", "--rule", "constant:1x0", "--m", "3", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));

    let o = agsp(&[
        "check", "--axiom", "strong-gsp", "--rule", "minisum", "--m", "6", "--k", "3", "--n", "4", "--mode", "exhaustive",
        "--eval-cap", "1000",
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = agsp(&[
        "search", "--side", "approval", "--axioms", "unanimity,strong-gsp", "--m", "3", "--k", "1", "--n", "3",
        "--budget-nodes", "0",
    ]);
    assert_eq!(o.status.code(), Some(4));

    let o = agsp(&["check", "--axiom", "sp", "--rule", "minisum", "--m", "3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let args = ["--format", "records", "--seed", "7", "check", "--axiom", "sp", "--rule", "minisum", "--m", "4", "--k", "2", "--n", "2", "--mode", "sample:200"];
    let a = agsp(&args);
    let b = agsp(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("coverage=sampled:200:7"));
    let c = agsp(&["--format", "records", "--seed", "8", "check", "--axiom", "sp", "--rule", "minisum", "--m", "4", "--k", "2", "--n", "2", "--mode", "sample:200"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn cnf_export_solve_and_decode() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("u.cnf");
    let o = agsp(&[
        "search", "--side", "approval", "--axioms", "unanimity,sp", "--m", "3", "--k", "1", "--n", "2", "--emit-cnf",
        cnf.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dimacs = std::fs::read(&cnf).unwrap();
    let mut solver = varisat::Solver::new();
    solver.add_dimacs_cnf(&dimacs[..]).unwrap();
    assert!(solver.solve().unwrap());
    let model: Vec<String> = solver.model().unwrap().iter().map(|l| l.to_dimacs().to_string()).collect();
    let model_path = dir.path().join("model.txt");
    std::fs::write(&model_path, format!("v {} 0\n", model.join(" "))).unwrap();
    let map = dir.path().join("u.cnf.map");
    let table = dir.path().join("table.txt");
    let o = agsp(&[
        "--format", "records", "decode", "--map", map.to_str().unwrap(), "--model", model_path.to_str().unwrap(),
        "--table-out", table.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(record(&records(&stdout(&o)), "status"), "verified");

    // The decoded table is itself a rule the checker accepts.
    let rule = format!("table:{}", table.display());
    let o = agsp(&["check", "--axiom", "sp", "--rule", &rule, "--m", "3", "--k", "1", "--mode", "exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let o = agsp(&["check", "--axiom", "unanimity", "--rule", &rule, "--m", "3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn application_commands() {
    let o = agsp(&["--format", "records", "apps", "pb", "--rule", "minisum", "--profile", "fixtures/unanimous.txt", "--feasible-ballots"]);
    assert_eq!(record(&records(&stdout(&o)), "funded"), "0110");

    let o = agsp(&["--format", "records", "apps", "classify", "--rule", "minisum", "--instance", "fixtures/classification.txt"]);
    let recs = records(&stdout(&o));
    assert_eq!(record(&recs, "erm"), "010");
    assert_eq!(record(&recs, "erm_risk"), "4/3");

    let o = agsp(&["--format", "records", "apps", "facility", "--rule", "minimax", "--instance", "fixtures/facility.txt"]);
    let recs = records(&stdout(&o));
    assert_eq!(record(&recs, "max_cost"), record(&recs, "optimal_max_cost"));

    for app in ["minimax", "classify", "facility"] {
        let o = agsp(&["--format", "records", "apps", app, "--rule", "constant:011", "--m", "3", "--k", "2"]);
        assert_eq!(o.status.code(), Some(10), "{app}");
        assert_eq!(record(&records(&stdout(&o)), "ratio"), "inf");
        let o = agsp(&["--format", "records", "apps", app, "--rule", "minisum", "--m", "3", "--k", "2"]);
        assert_eq!(o.status.code(), Some(0), "{app}");
        assert_eq!(record(&records(&stdout(&o)), "ratio"), "not-applicable");
    }
}
