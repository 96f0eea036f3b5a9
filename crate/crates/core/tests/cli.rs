use std::path::Path;
use std::process::{Command, Output};

use ctc_sim::circuit::catalog;
use ctc_sim::cli::RunReport;
use ctc_sim::qstate::{frobenius_distance, CMatrix, PureState};
use ctc_sim::tctc::tctc_evolve;
use serde_json::Value;

fn ctc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctc-sim")).args(args).output().expect("binary runs")
}

fn ctc_threads(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctc-sim"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn report(out: &Output) -> RunReport {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matrix(v: &Value) -> CMatrix {
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_value(v.clone()).unwrap();
    ctc_sim::encoding::matrix_from_raw(&raw).unwrap()
}

fn diag(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&entries.iter().map(|&x| ctc_sim::qstate::c(x, 0.0)).collect::<Vec<_>>().into())
}

#[test]
fn evolve_dctc_unproven_theorem() {
    let r = report(&ctc(&[
        "evolve", "--theory", "dctc", "--catalog", "unproven_theorem", "--input", "|00⟩", "--rule", "max-entropy",
    ]));
    let rho = r.state().unwrap();
    assert!(frobenius_distance(rho.matrix(), &diag(&[0.5, 0.0, 0.0, 0.5])) < 1e-9);
    assert_eq!(r.theory, "dctc");
    assert_eq!(r.circuit, catalog("unproven_theorem").unwrap().to_json());
    assert!((r.diagnostics["entropy"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
    assert_eq!(r.diagnostics["paradox"], false);
    assert!(r.tau.is_some());
}

#[test]
fn evolve_pctc_paradox_exits_two_with_report() {
    let out = ctc(&["evolve", "--theory", "pctc", "--catalog", "traceless_paradox", "--input", "|0⟩"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["paradox"], true);
    assert_eq!(v["theory"], "pctc");
    assert!(v["postselection_trace"].as_f64().unwrap() < 1e-12);
}

#[test]
fn evolve_tctc_matches_closed_form() {
    let r = report(&ctc(&["evolve", "--theory", "tctc", "--catalog", "unproven_theorem", "--input", "|00⟩"]));
    let expect = tctc_evolve(&catalog("unproven_theorem").unwrap(), &PureState::from_ket("|00⟩").unwrap()).unwrap();
    assert!(frobenius_distance(r.state().unwrap().matrix(), expect.rho_f.matrix()) < 1e-12);
    assert!(r.diagnostics.contains_key("lambda"));
}

#[test]
fn evolve_every_theory_round_trips() {
    for theory in ["dctc", "pctc", "tctc", "tctc-mc", "weighted-dctc", "ptrace-tctc"] {
        let r = report(&ctc(&[
            "evolve", "--theory", theory, "--catalog", "distinguishing", "--input", "|+⟩", "--samples", "2000",
        ]));
        let text = serde_json::to_string(&r).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.state().unwrap(), r.state().unwrap(), "{theory}");
        assert_eq!(back.theory, theory);
    }
}

#[test]
fn evolve_accepts_vectors_and_density_matrices() {
    let s = 0.5f64.sqrt();
    let vector = format!("[[{s},0],[0,0],[0,0],[{s},0]]");
    let r = report(&ctc(&["evolve", "--theory", "pctc", "--catalog", "unproven_theorem", "--input", &vector]));
    assert!((r.state().unwrap().purity() - 1.0).abs() < 1e-9);
    let mixed = "[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]";
    let r = report(&ctc(&["evolve", "--theory", "tctc", "--catalog", "distinguishing", "--input", mixed]));
    assert!(r.diagnostics.contains_key("ancilla_dim"));
    let r = report(&ctc(&["evolve", "--theory", "dctc", "--catalog", "swap", "--input", "mixed", "--rule", "noise=0.5"]));
    assert!(frobenius_distance(r.state().unwrap().matrix(), &diag(&[0.5, 0.5])) < 1e-9);
}

#[test]
fn evolve_writes_out_file_and_reads_circuit_file() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.json");
    std::fs::write(&circuit, catalog("unproven_theorem").unwrap().to_json().to_string()).unwrap();
    let out_path = dir.path().join("report.json");
    let out = ctc(&[
        "evolve",
        "--theory",
        "pctc",
        "--circuit",
        circuit.to_str().unwrap(),
        "--input",
        "|00⟩",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: RunReport = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let rho = r.state().unwrap();
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        assert!((rho.matrix()[(i, j)].re - 0.5).abs() < 1e-10);
    }
}

#[test]
fn shipped_example_circuits_parse() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    for entry in std::fs::read_dir(data).unwrap() {
        let path = entry.unwrap().path();
        let out = ctc(&["evolve", "--theory", "tctc", "--circuit", path.to_str().unwrap(), "--input", "mixed"]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validation_errors_exit_one() {
    let cases: &[&[&str]] = &[
        &["evolve", "--theory", "dctc", "--catalog", "nope", "--input", "|0⟩"],
        &["evolve", "--theory", "dctc", "--catalog", "swap", "--input", "|00⟩"],
        &["evolve", "--theory", "dctc", "--catalog", "swap", "--input", "|2⟩"],
        &["evolve", "--theory", "dctc", "--catalog", "swap", "--input", "|0⟩", "--rule", "noise=1.5"],
        &["evolve", "--theory", "tctc-mc", "--catalog", "swap", "--input", "mixed"],
        &["evolve", "--theory", "tctc-mc", "--catalog", "swap", "--input", "|0⟩", "--samples", "0"],
        &["evolve", "--theory", "quantum", "--catalog", "swap", "--input", "|0⟩"],
        &["evolve", "--theory", "dctc", "--circuit", "/nonexistent.json", "--input", "|0⟩"],
        &["frobnicate"],
        &["moments"],
    ];
    for args in cases {
        let out = ctc(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_circuit_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n": 1, "m": 1, "gates": [{"name": "CNOT", "targets": [0, 0]}]}"#).unwrap();
    let out = ctc(&["evolve", "--theory", "dctc", "--circuit", path.to_str().unwrap(), "--input", "|0⟩"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fixed_points_examples() {
    let v = json(&ctc(&["fixed-points", "--catalog", "unproven_theorem", "--input", "|00⟩"]));
    assert_eq!(v["subspace_dim"], 2);
    assert!(frobenius_distance(&matrix(&v["max_entropy"]), &diag(&[0.5, 0.5])) < 1e-9);
    assert_eq!(v["directions"].as_array().unwrap().len(), 1);

    let v = json(&ctc(&["fixed-points", "--catalog", "distinguishing", "--input", "|0⟩"]));
    assert_eq!(v["subspace_dim"], 1);
    assert!(frobenius_distance(&matrix(&v["max_entropy"]), &diag(&[1.0, 0.0])) < 1e-9);

    let v = json(&ctc(&["fixed-points", "--catalog", "unproven_theorem", "--input", "|00⟩", "--noise", "0.1"]));
    assert!(frobenius_distance(&matrix(&v["noisy"]["tau"]), &diag(&[0.5, 0.5])) < 1e-9);
}

#[test]
fn iterate_examples() {
    let v = json(&ctc(&["iterate", "--catalog", "ecm_counterexample", "--input", "|0⟩", "--sigma0", "|0⟩"]));
    assert_eq!(v["verdict"]["kind"], "cycle");
    assert_eq!(v["verdict"]["period"], 2);

    let v = json(&ctc(&["iterate", "--catalog", "unproven_theorem", "--sigma0", "mixed"]));
    assert_eq!(v["verdict"]["kind"], "converged");
    assert!(frobenius_distance(&matrix(&v["verdict"]["state"]), &diag(&[0.5, 0.5])) < 1e-12);

    let v = json(&ctc(&["iterate", "--catalog", "swap", "--input", "|0⟩", "--sigma0", "|1⟩"]));
    assert_eq!(v["verdict"]["kind"], "converged");
    assert_eq!(v["verdict"]["at"], 1);
    assert!(frobenius_distance(&matrix(&v["verdict"]["state"]), &diag(&[1.0, 0.0])) < 1e-12);
}

#[test]
fn moments_examples() {
    for dim in ["2", "4"] {
        let v = json(&ctc(&["moments", "--dim", dim, "--samples", "100000"]));
        let ratio = &v["integrals"]["ratio"];
        let (mean, se) = (ratio["mean"].as_f64().unwrap(), ratio["std_error"].as_f64().unwrap());
        assert!((mean - 2.0).abs() < 5.0 * se, "d={dim}: {mean} ± {se}");
        assert_eq!(v["ratio_consistent_with_2"], true);
    }
    let v = json(&ctc(&["moments", "--dim", "2", "--samples", "100000"]));
    assert!((v["integrals"]["second"]["mean"].as_f64().unwrap() - 0.5).abs() < 0.01);
}

#[test]
fn monte_carlo_reports_are_thread_count_independent() {
    let args = [
        "evolve", "--theory", "tctc-mc", "--catalog", "unproven_theorem", "--input", "|0+⟩", "--samples", "20000",
        "--seed", "7",
    ];
    let one = ctc_threads(&args, 1);
    let four = ctc_threads(&args, 4);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v = json(&one);
    assert_eq!(v["diagnostics"]["seed"], 7);
    assert_eq!(v["diagnostics"]["samples"], 20000);
    let m1 = ctc_threads(&["moments", "--dim", "3", "--samples", "5000", "--seed", "3"], 1);
    let m4 = ctc_threads(&["moments", "--dim", "3", "--samples", "5000", "--seed", "3"], 4);
    assert_eq!(m1.stdout, m4.stdout);
}

#[test]
fn help_exits_zero() {
    let out = ctc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fixed-points"));
}
