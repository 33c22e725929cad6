use std::path::Path;
use std::process::{Command, Output};

fn sslsq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sslsq"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sslsq(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

fn summary_value(summary: &str, key: &str) -> String {
    summary
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from {summary}"))
        .to_string()
}

#[test]
fn generate_two_cluster_default_size_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-cluster-1d",
            "--seed",
            "7",
            "--out",
            "a.csv",
        ],
    );
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-cluster-1d",
            "--seed",
            "7",
            "--out",
            "b.csv",
        ],
    );
    let a = lines(&dir.path().join("a.csv"));
    assert_eq!(a[0], "x1,label,true_label");
    assert_eq!(a.len(), 401);
    assert_eq!(a, lines(&dir.path().join("b.csv")));
    let manifest = lines(&dir.path().join("a.csv.manifest"));
    assert!(manifest.contains(&"subcommand=generate".to_string()));
    assert!(manifest.contains(&"seed=7".to_string()));
    assert!(manifest.contains(&"param.kind=two-cluster-1d".to_string()));
}

#[test]
fn generate_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(
        dir.path(),
        &["generate", "--kind", "two-gaussian-2d", "--seed", "3"],
    );
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-gaussian-2d",
            "--seed",
            "3",
            "--out",
            "g.csv",
        ],
    );
    assert_eq!(
        text,
        std::fs::read_to_string(dir.path().join("g.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        sslsq(dir.path(), &["generate", "--kind", "bogus", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sslsq(dir.path(), &["generate", "--kind", "two-cluster-1d"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sslsq(dir.path(), &["basin", "--method", "hard", "--out", "b.csv"])
            .status
            .code(),
        Some(2),
        "seed is mandatory"
    );
}

#[test]
fn supervised_fit_reports_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x1,label\n-1,0\n1,1\n0,\n").unwrap();
    let s = ok(
        dir.path(),
        &["fit", "--data", "d.csv", "--method", "supervised"],
    );
    assert_eq!(summary_value(&s, "iterations"), "1");
    // Exact fit through both labeled points: w = (0.5, 0.5), zero residual.
    for key in ["w_0", "w_1"] {
        let w: f64 = summary_value(&s, key).parse().unwrap();
        assert!((w - 0.5).abs() < 1e-12, "{key}={w}");
    }
    let j: f64 = summary_value(&s, "final_objective").parse().unwrap();
    assert!(j < 1e-24);
}

#[test]
fn soft_without_unlabeled_matches_supervised() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("d.csv"),
        "x1,label\n-2,0\n-1,0\n1,1\n3,1\n0.5,0\n",
    )
    .unwrap();
    let sup = ok(
        dir.path(),
        &["fit", "--data", "d.csv", "--method", "supervised"],
    );
    let soft = ok(dir.path(), &["fit", "--data", "d.csv", "--method", "soft"]);
    for key in ["w_0", "w_1", "final_objective"] {
        assert_eq!(summary_value(&sup, key), summary_value(&soft, key));
    }
}

#[test]
fn fit_trace_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-cluster-1d",
            "--seed",
            "5",
            "--out",
            "d.csv",
        ],
    );
    for method in ["soft", "hard"] {
        ok(
            dir.path(),
            &[
                "fit", "--data", "d.csv", "--method", method, "--trace", "t.csv",
            ],
        );
        let rows = lines(&dir.path().join("t.csv"));
        assert_eq!(rows[0], "iteration,objective,w_0,w_1");
        let js: Vec<f64> = rows[1..]
            .iter()
            .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(js.len() >= 2);
        assert!(
            js.windows(2)
                .all(|p| p[1] <= p[0] + 1e-10 * (1.0 + p[0].abs())),
            "{method}"
        );
        assert!(dir.path().join("t.csv.manifest").exists());
    }
}

#[test]
fn oracle_needs_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x1,label\n-1,0\n1,1\n0,\n").unwrap();
    let out = sslsq(
        dir.path(),
        &["fit", "--data", "d.csv", "--method", "oracle"],
    );
    assert_eq!(out.status.code(), Some(7));
    assert!(String::from_utf8_lossy(&out.stderr).contains("true_label"));

    std::fs::write(
        dir.path().join("t.csv"),
        "x1,label,true_label\n-1,0,0\n1,1,1\n0.2,,1\n",
    )
    .unwrap();
    let s = ok(
        dir.path(),
        &["fit", "--data", "t.csv", "--method", "oracle"],
    );
    assert_eq!(summary_value(&s, "stop_reason"), "closed_form");
}

#[test]
fn parse_error_reports_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x1,x2,label\n1,2,0\n3,oops,1\n").unwrap();
    let out = sslsq(dir.path(), &["fit", "--data", "d.csv", "--method", "soft"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 2") && err.contains("column 2"), "{err}");
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sslsq(
        dir.path(),
        &["fit", "--data", "nope.csv", "--method", "soft"],
    );
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn diagnose_small_dataset() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-cluster-1d",
            "--seed",
            "2",
            "--unlabeled",
            "8",
            "--out",
            "s.csv",
        ],
    );
    let s = ok(
        dir.path(),
        &["diagnose", "--data", "s.csv", "--out", "diag.txt"],
    );
    assert_eq!(summary_value(&s, "responsibility_based.verdict"), "not PSD");
    assert!(
        summary_value(&s, "responsibility_based.witness_value")
            .parse::<f64>()
            .unwrap()
            < 0.0
    );
    assert_eq!(summary_value(&s, "label_based.verdict"), "PSD");
    let gap: f64 = summary_value(&s, "hard.gap").parse().unwrap();
    assert!(gap >= 0.0);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("diag.txt")).unwrap(),
        s
    );
}

#[test]
fn diagnose_reports_capacity_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-cluster-1d",
            "--seed",
            "2",
            "--out",
            "d.csv",
        ],
    );
    let s = ok(dir.path(), &["diagnose", "--data", "d.csv"]);
    assert!(summary_value(&s, "hard.global").starts_with("skipped"));
}

#[test]
fn basin_has_one_row_per_start_plus_supervised() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-cluster-1d",
            "--seed",
            "1",
            "--out",
            "d.csv",
        ],
    );
    let s = ok(
        dir.path(),
        &[
            "basin", "--data", "d.csv", "--method", "hard", "--starts", "100", "--seed", "1",
            "--out", "b.csv",
        ],
    );
    let rows = lines(&dir.path().join("b.csv"));
    assert_eq!(rows.len(), 1 + 101);
    assert!(rows[101].split(',').nth(1) == Some("supervised"));
    let agg = lines(&dir.path().join("b_aggregate.csv"));
    let count: usize = summary_value(&s, "unique_optima_count").parse().unwrap();
    assert_eq!(agg.len(), 1 + count);
    let runs: usize = agg[1..]
        .iter()
        .map(|r| r.split(',').nth(2).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(runs, 101);
    assert!(dir.path().join("b.csv.manifest").exists());
}

#[test]
fn learning_curve_aggregate_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "learning-curve",
            "--u-values",
            "1,2,4",
            "--repeats",
            "5",
            "--seed",
            "1",
            "--out",
            "lc.csv",
        ],
    );
    assert_eq!(lines(&dir.path().join("lc_aggregate.csv")).len(), 1 + 12);
    assert_eq!(lines(&dir.path().join("lc.csv")).len(), 1 + 5 * 3 * 4);
}

#[test]
fn learning_curve_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x1,label\n-1,0\n1,1\n-2,0\n2,1\n").unwrap();
    let out = sslsq(
        dir.path(),
        &[
            "learning-curve",
            "--data",
            "d.csv",
            "--labeled",
            "3",
            "--u-values",
            "5",
            "--seed",
            "1",
            "--out",
            "lc.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn local_optima_skips_unusable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "--kind",
            "two-gaussian-2d",
            "--seed",
            "4",
            "--unlabeled",
            "90",
            "--out",
            "g.csv",
        ],
    );
    std::fs::write(dir.path().join("tiny.csv"), "x1,label\n0,0\n1,1\n2,1\n").unwrap();
    let out = sslsq(
        dir.path(),
        &[
            "local-optima",
            "--data",
            "g.csv",
            "--data",
            "tiny.csv",
            "--restarts",
            "4",
            "--seed",
            "2",
            "--out",
            "lo.csv",
        ],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: skipping tiny"));
    let agg = lines(&dir.path().join("lo_aggregate.csv"));
    assert_eq!(agg.len(), 1 + 2 + 1);
    assert!(agg[3].starts_with("tiny,skipped"));
    // 4 random + 1 supervised start per method, plus the skipped row.
    assert_eq!(lines(&dir.path().join("lo.csv")).len(), 1 + 2 * 5 + 1);
}
