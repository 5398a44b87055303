use std::path::Path;
use std::process::{Command, Output};

use logdet::{generators, read_report, save_matrix_market, OutputFormat, SpdMatrix};

fn logdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logdet"))
        .args(args)
        .env_remove("LOGDET_THREADS")
        .output()
        .unwrap()
}

fn logdet_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logdet"))
        .args(args)
        .env("LOGDET_THREADS", threads)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_generated_sweep_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = logdet(&[
        "run",
        "--gen",
        "dense_dd",
        "--n",
        "200",
        "--m",
        "2",
        "--sweep-m",
        "1,2,3",
        "--eps",
        "0.5",
        "--p",
        "20",
        "--seed",
        "4",
        "--repeats",
        "3",
        "--threads",
        "2",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let records = read_report(OutputFormat::Csv, std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(
        records.iter().map(|r| r.m).collect::<Vec<_>>(),
        vec![1, 2, 3]
    );
    assert!(records.iter().all(|r| r.exact_value.is_some() && r.p == 20));
}

#[test]
fn json_to_stdout_and_thread_env_fallback() {
    let args = [
        "run",
        "--gen",
        "sparse_dd",
        "--n",
        "500",
        "--nnz",
        "4000",
        "--m",
        "4",
        "--eps",
        "0.5",
        "--p",
        "16",
        "--seed",
        "1",
        "--repeats",
        "2",
        "--exact",
        "none",
        "--format",
        "json",
    ];
    let a = logdet_env(&args, "1");
    let b = logdet_env(&args, "4");
    assert_eq!(a.status.code(), Some(0));
    let ra = read_report(OutputFormat::Json, a.stdout.as_slice()).unwrap();
    let rb = read_report(OutputFormat::Json, b.stdout.as_slice()).unwrap();
    assert_eq!(ra[0].estimate_mean.to_bits(), rb[0].estimate_mean.to_bits());
    assert_eq!(ra[0].exact_value, None);
    assert!(stdout(&a).contains("\"speedup\": null"));
}

#[test]
fn run_from_matrix_market_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eye.mtx");
    save_matrix_market(&SpdMatrix::identity(50).unwrap(), &path).unwrap();
    let o = logdet(&[
        "run",
        "--input",
        path.to_str().unwrap(),
        "--m",
        "10",
        "--eps",
        "0.5",
        "--repeats",
        "1",
        "--exact",
        "eig",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = read_report(OutputFormat::Csv, o.stdout.as_slice()).unwrap();
    assert_eq!(r[0].name, "eye");
    assert_eq!(r[0].exact_value, Some(0.0));
}

#[test]
fn validate_reports_gershgorin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dd.mtx");
    save_matrix_market(&generators::rand_spd_sparse(100, 800, 2).unwrap(), &path).unwrap();
    let o = logdet(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("n: 100"));
    assert!(text.contains("gershgorin: definite"));
}

#[test]
fn params_prints_selection() {
    let o = logdet(&["params", "--kappa", "1", "--target-eps", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("m: 16"), "{text}");
    assert!(text.contains("epsilon: 0.0310"), "{text}");
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Usage errors.
    assert_eq!(
        logdet(&["run", "--m", "2", "--eps", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        logdet(&["params", "--kappa", "0.5", "--target-eps", "0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(logdet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        logdet(&["run", "--gen", "dense", "--n", "10", "--m", "0", "--eps", "0.5"])
            .status
            .code(),
        Some(2)
    );
    // Input and format errors.
    let bad = write(
        dir.path(),
        "bad.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n3 1 0.5\n",
    );
    let o = logdet(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":4:"));
    assert_eq!(
        logdet(&["validate", "/nonexistent/file.mtx"]).status.code(),
        Some(3)
    );
    // Numerical failure: 101 I - 100 J has a dominant negative eigenvalue.
    let indefinite = write(
        dir.path(),
        "indef.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 6\n1 1 1\n2 1 -100\n2 2 1\n3 1 -100\n3 2 -100\n3 3 1\n",
    );
    let o = logdet(&[
        "run",
        "--input",
        &indefinite,
        "--m",
        "40",
        "--eps",
        "0.5",
        "--p",
        "4",
        "--repeats",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
