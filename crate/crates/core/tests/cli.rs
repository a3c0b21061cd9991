use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loan-qcbo"))
}

fn run(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        assert_eq!(
            run(&[
                "generate",
                "--n-loanees",
                "600",
                "--gen-seed",
                "1",
                "--out",
                path(out)
            ]),
            0
        );
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&text).unwrap();
    let degree = v["provenance"]["realized_mean_degree"].as_f64().unwrap();
    assert!((degree - 2.0).abs() <= 0.3, "{degree}");
    assert!(loan_qcbo::ProblemInstance::load(&a).is_ok());
}

#[test]
fn solve_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    assert_eq!(
        run(&[
            "generate",
            "--n-loanees",
            "12",
            "--n-actions",
            "3",
            "--out",
            path(&inst)
        ]),
        0
    );
    let out = dir.path().join("run");
    let code = run(&[
        "solve",
        "--instance",
        path(&inst),
        "--nu",
        "4",
        "--opt-iters",
        "20",
        "--restarts",
        "1",
        "--epsilon",
        "0.3",
        "--out",
        path(&out),
    ]);
    assert_eq!(code, 0);
    for f in ["manifest.json", "trace.csv", "partition.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let manifest: loan_qcbo::pipeline::RunManifest =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.epsilon, 0.3);
    let instance = loan_qcbo::ProblemInstance::load(&inst).unwrap();
    assert!(manifest.verify(&instance).unwrap());
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,i,j,j_prime,Y,provision\n0,,,,"));
    assert_eq!(trace.lines().count(), manifest.gpr_steps + 2);
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&[
        "sweep",
        "--n-loanees",
        "10",
        "--n-actions",
        "3",
        "--nu",
        "4",
        "--opt-iters",
        "20",
        "--restarts",
        "1",
        "--epsilon-grid",
        "0.5,0,0.25",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "epsilon,mode,Y,provision,dpo_count,bank_profit");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,hybrid,"));
    assert!(lines[2].starts_with("0,standalone-gpr,"));
    assert!(lines[6].starts_with("0.5,standalone-gpr,"));
}

#[test]
fn oracle_outputs_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&[
            "oracle",
            "--n-loanees",
            "5",
            "--n-actions",
            "3",
            "--out",
            path(dir.path())
        ]),
        0
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap())
            .unwrap();
    assert_eq!(v["evaluated"], 243);
    // 5^11 configurations exceed the enumeration limit.
    assert_eq!(
        run(&[
            "oracle",
            "--n-loanees",
            "11",
            "--n-actions",
            "5",
            "--out",
            path(dir.path())
        ]),
        2
    );
    // No assignment has negative provision.
    let code = run(&[
        "oracle",
        "--n-loanees",
        "4",
        "--provision-cap",
        "0",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["solve"]), 1);
    assert_eq!(run(&["frobnicate"]), 1);
    assert_eq!(
        run(&[
            "solve",
            "--instance",
            "/nonexistent.json",
            "--out",
            "/tmp/x"
        ]),
        1
    );
    assert_eq!(
        run(&[
            "solve",
            "--nu",
            "1",
            "--n-loanees",
            "5",
            "--out",
            "/tmp/loan-qcbo-nu"
        ]),
        1
    );
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["--version"]), 0);
}
