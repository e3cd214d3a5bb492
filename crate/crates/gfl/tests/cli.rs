use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_gfl");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    dir: tempfile::TempDir,
}

impl Run {
    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.dir.path().join(name)).unwrap()).unwrap()
    }

    fn text(&self, name: &str) -> String {
        fs::read_to_string(self.dir.path().join(name)).unwrap()
    }
}

fn gfl(args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        dir,
    }
}

#[test]
fn validate_ising_passes() {
    let r = gfl(&["validate", "--model", "ising:beta=0.4,window=11", "--samples", "2000"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let doc = r.json("validate.json");
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["mode"], "float");
    let axioms: Vec<&str> = doc["axioms"].as_array().unwrap().iter().map(|a| a["axiom"].as_str().unwrap()).collect();
    assert_eq!(axioms, ["marginal", "1spec", "tef", "spec", "reconstruction", "potential-tef", "gibbs"]);
    assert!(r.text("validate.csv").starts_with("# model=ising:beta=0.4,window=11\n"));
}

#[test]
fn validate_corrupt_table_exits_one() {
    let model = format!("table:{}", fixture("corrupt.tbl").display());
    let r = gfl(&["validate", "--model", &model]);
    assert_eq!(r.code, 1, "{}{}", r.stdout, r.stderr);
    let doc = r.json("validate.json");
    assert_eq!(doc["passed"], false);
    let table = &doc["axioms"][0];
    assert_eq!(table["axiom"], "table");
    assert_eq!(table["violation_count"], 4);
    let details: Vec<&str> = table["violations"].as_array().unwrap().iter().map(|v| v["detail"].as_str().unwrap()).collect();
    assert!(details.iter().any(|d| d.contains("duplicate")), "{details:?}");
    assert!(details.iter().any(|d| d.contains("negative")), "{details:?}");
    assert!(details.iter().any(|d| d.contains("sum to 9/8")), "{details:?}");
}

#[test]
fn validate_positive_table_exhaustively() {
    let model = format!("table:{}", fixture("chain.tbl").display());
    let r = gfl(&["validate", "--model", &model]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let doc = r.json("validate.json");
    for a in doc["axioms"].as_array().unwrap() {
        assert_eq!(a["exhaustive"], true, "{a}");
        assert_eq!(a["max_residual"], "0", "{a}");
    }
}

#[test]
fn validate_example1_in_rational_mode() {
    let r = gfl(&["validate", "--model", "example1:N=6", "--axioms", "marginal,1spec,spec,reconstruction"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert_eq!(r.json("validate.json")["mode"], "rational");
}

#[test]
fn validate_potential_file() {
    let model = format!("potential:path={},window=7", fixture("ising.pot").display());
    let r = gfl(&["validate", "--model", &model, "--samples", "1000"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
}

#[test]
fn diagnose_example2_finds_divergence() {
    let r = gfl(&["diagnose", "--model", "example2:tau=1,window=485", "--family", "oscillating+adversarial"]);
    assert_eq!(r.code, 2, "{}{}", r.stdout, r.stderr);
    let doc = r.json("diagnose.json");
    assert_eq!(doc["convergence"]["verdict"], "divergence-witness");
    assert_eq!(doc["convergence"]["witness"]["generator"], "oscillating 1/4-3/4");
    assert_eq!(doc["convergence"]["witness"]["persistent_gap"], "25/54");
    assert_eq!(doc["quasilocality"]["verdict"], "violation-witness");
    assert_eq!(doc["energy_criterion"]["verdict"], "violation-witness");
    let stages = r.text("diagnose_generators.csv");
    assert!(stages.contains("oscillating 1/4-3/4,5,485,182/243,61/243,241/486"), "{stages}");
}

#[test]
fn diagnose_markov_fields_are_uniform() {
    for model in ["ising:beta=0.4,window=11", "product:p=1/3,window=11", "ising:beta=1.0,window=9"] {
        let r = gfl(&["diagnose", "--model", model]);
        assert_eq!(r.code, 0, "{model}: {}{}", r.stdout, r.stderr);
        let doc = r.json("diagnose.json");
        assert_eq!(doc["convergence"]["verdict"], "uniform-evidence", "{model}");
        assert_eq!(doc["independence"]["report"]["agree"], true, "{model}");
        assert_eq!(doc["independence"]["report"]["filtrations"].as_array().unwrap().len(), 3);
        assert_eq!(doc["quasilocality"]["verdict"], "quasilocal-evidence", "{model}");
        for s in doc["witness_searches"].as_array().unwrap() {
            assert!(s["witness"].is_null(), "{model}: {s}");
        }
    }
}

#[test]
fn short_filtrations_are_inconclusive() {
    let r = gfl(&["diagnose", "--model", "product:p=1/3,window=9", "--filtration", "box:1,2,4"]);
    assert_eq!(r.code, 3, "{}{}", r.stdout, r.stderr);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ising.cfg");
    fs::write(&cfg, "# demo\nmodel = ising:beta=0.4,window=9\nfamily = standard\nrandom = 3\n").unwrap();
    let a = gfl(&["diagnose", "--config", cfg.to_str().unwrap()]);
    let b = gfl(&["diagnose", "--model", "ising:beta=0.4,window=9", "--family", "standard", "--set", "random=3"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.text("diagnose.json"), b.text("diagnose.json"));
}

#[test]
fn reproductions_match_goldens() {
    let r = gfl(&["reproduce", "example1", "--check"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("2 files match the goldens"));
    let r = gfl(&["reproduce", "example2", "--check"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("12 files match the goldens"));
}

#[test]
fn reproduce_writes_fresh_reports() {
    let r = gfl(&["reproduce", "example2", "--tau", "4"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let doc = r.json("example2_tau4.json");
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["conditionals"]["match_formula"], 91);
    // No golden exists for tau = 4.
    let r = gfl(&["reproduce", "example2", "--tau", "4", "--check"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("no golden"));
}

#[test]
fn energy_and_reconstruct_on_a_table() {
    let model = format!("table:{}", fixture("chain.tbl").display());
    let r = gfl(&["energy", "--model", &model, "--volume", "(1);(2)", "--condition", "(3)=1"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    // g(00 | 1) = 1/12 / (1/3), g(11 | 1) = 1/3 / (7/12)
    assert!(r.text("energy.tbl").contains("(1)=0;(2)=0\t(1)=1;(2)=1\t1/4\n"));
    assert!(r.text("hamiltonian.tbl").contains("(1)=1;(2)=1\t4/1\n"));
    let r = gfl(&["reconstruct", "--model", &model, "--order", "(3);(1);(2)", "--reference", "(1)=1;(2)=0;(3)=1"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert_eq!(r.json("reconstruct.json")["sup_distance"], "0/1");
    assert_eq!(r.text("reconstructed.tbl"), fs::read_to_string(fixture("chain.tbl")).unwrap().lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
}

#[test]
fn float_energies_are_logs() {
    let r = gfl(&["energy", "--model", "ising:beta=0.5,window=5", "--site", "(3)", "--condition", "(2)=+1;(4)=+1"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    // Δ(-1, +1) = ln g(-1)/g(+1) = -4β with two aligned neighbours.
    let line = r.text("energy.tbl").lines().find(|l| l.starts_with("(3)=-1\t(3)=+1\t")).unwrap().to_string();
    let value: f64 = line.rsplit('\t').next().unwrap().parse().unwrap();
    assert!((value + 2.0).abs() < 1e-12, "{line}");
}

#[test]
fn errors_exit_four() {
    for args in [
        &["validate", "--model", "nothing"][..],
        &["validate", "--model", "ising:beta=0.4", "--mode", "rational"][..],
        &["diagnose", "--site", "(99)"][..],
        &["diagnose", "--set", "colour=red"][..],
        &["validate", "--frobnicate"][..],
    ] {
        let r = gfl(args);
        assert_eq!(r.code, 4, "{args:?}: {}{}", r.stdout, r.stderr);
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn enumeration_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["energy", "--model", "example2:tau=1,window=12", "--volume", "(1);(2);(3);(4);(5)", "--out"])
        .arg(dir.path())
        .env("GFL_ENUM_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap is 16"));
}
