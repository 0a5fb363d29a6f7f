use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sparsefhe_cli::files::load_matrix;
use sparsefhe_cli::record::read_csv;
use sparsefhe_cli::Report;
use sparsefhe_core::MatmulMethod;

fn sparsefhe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsefhe"))
        .args(args)
        .env_remove("SPARSEFHE_PARAMS")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn gen_is_deterministic_with_exact_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("one"), dir.path().join("two"));
    for d in [&d1, &d2] {
        let out = sparsefhe(&[
            "gen",
            "--size",
            "8",
            "--sparsity",
            "0.5",
            "--seed",
            "42",
            "--out",
            path(d),
        ]);
        assert!(out.status.success());
    }
    for name in ["a.mtx", "b.mtx"] {
        let first = fs::read(d1.join(name)).unwrap();
        assert_eq!(first, fs::read(d2.join(name)).unwrap());
        assert_eq!(load_matrix(&d1.join(name)).unwrap().nnz(), 32);
    }
    assert_ne!(
        fs::read(d1.join("a.mtx")).unwrap(),
        fs::read(d1.join("b.mtx")).unwrap()
    );

    let empty = dir.path().join("empty");
    assert!(sparsefhe(&[
        "gen",
        "--size",
        "8",
        "--sparsity",
        "1.0",
        "--out",
        path(&empty)
    ])
    .status
    .success());
    let text = fs::read_to_string(empty.join("a.mtx")).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n8 8 0\n"));
    assert_eq!(load_matrix(&empty.join("b.mtx")).unwrap().nnz(), 0);
}

#[test]
fn verify_passes_on_generated_and_loaded_pairs() {
    let out = sparsefhe(&["verify", "--size", "4", "--sparsity", "0.5", "--seed", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    for m in MatmulMethod::ALL {
        assert!(
            stdout
                .lines()
                .any(|l| l.starts_with(m.name()) && l.contains("PASS")),
            "{stdout}"
        );
    }
    assert!(!stdout.contains("FAIL"));

    let out = sparsefhe(&["verify", "--size", "8", "--sparsity", "1.0"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("csr_c        PASS error 0.000e0  ct_ct_mults 0"));

    let dir = tempfile::tempdir().unwrap();
    assert!(sparsefhe(&[
        "gen",
        "--size",
        "4",
        "--sparsity",
        "0.25",
        "--out",
        path(dir.path())
    ])
    .status
    .success());
    let csv = dir.path().join("b.csv");
    fs::write(&csv, "1,0,0,2\n0,0,0,0\n0.5,0,1,0\n0,0,0,-1\n").unwrap();
    let a = dir.path().join("a.mtx");
    let out = sparsefhe(&[
        "verify",
        "--a",
        path(&a),
        "--b",
        path(&csv),
        "--methods",
        "csr_c,vcsr_c",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn oversized_and_malformed_inputs_fail() {
    let out = sparsefhe(&["verify", "--size", "80"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("exceeds slot capacity"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "method,N\ncsr_c,4\n").unwrap();
    assert_eq!(sparsefhe(&["report", path(&bad)]).status.code(), Some(2));
    assert_eq!(
        sparsefhe(&["report", path(&dir.path().join("missing.csv"))])
            .status
            .code(),
        Some(2)
    );
    assert!(!sparsefhe(&["sweep", "--methods", "dense"]).status.success());
}

#[test]
fn params_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("small.params");
    fs::write(
        &params,
        "# 32 slots\nring_degree = 64\nscale_bits = 40\nlevels = 2\nseed = 9\n",
    )
    .unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_sparsefhe"))
            .args(args)
            .env("SPARSEFHE_PARAMS", &params)
            .output()
            .unwrap()
    };
    let out = run(&["verify", "--size", "4", "--sparsity", "0.25"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = run(&["verify", "--size", "5"]);
    assert_eq!(out.status.code(), Some(2));

    fs::write(&params, "ring_degree = banana\n").unwrap();
    let out = run(&["verify", "--size", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("ring_degree"));
}

#[test]
fn sweep_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nested.csv");
    let out = sparsefhe(&[
        "sweep",
        "--sizes",
        "4",
        "--sparsities",
        "0,0.25,0.5,0.75,1",
        "--reps",
        "2",
        "--nested",
        "--seed",
        "5",
        "--out",
        path(&csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("40 rows written"));

    let records = read_csv(fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(records.len(), 4 * 5 * 2);
    assert!(records
        .iter()
        .all(|r| (1..=2).contains(&r.rep) && r.frobenius_error < 1e-6));
    for r in records
        .iter()
        .filter(|r| r.sparsity == 1.0 && r.method != "naive_dense")
    {
        assert_eq!((r.frobenius_error, r.ct_ct_mults), (0.0, 0));
    }
    let dense: Vec<u64> = records
        .iter()
        .filter(|r| r.method == "naive_dense")
        .map(|r| r.ct_ct_mults)
        .collect();
    assert!(dense.iter().all(|&c| c == 64));

    let report = Report::from_records(&records).unwrap();
    let mut last = f64::INFINITY;
    for c in &report.cells {
        assert_eq!(c.normalized(MatmulMethod::NaiveDense), Some(1.0));
        for m in MatmulMethod::ALL {
            assert_eq!(c.speedup(m, m), Some(1.0));
        }
        let mults = c.methods[&MatmulMethod::CsrC].ct_ct_mults;
        assert!(mults <= last);
        last = mults;
    }

    let out = sparsefhe(&["report", path(&csv)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("normalised to naive_dense") && text.contains("vcsr_c/csr_c"));
}
