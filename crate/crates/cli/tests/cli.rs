use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lowertail"));
    c.env_remove("LOWERTAIL_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_lists_table() {
    let o = run(&["constants"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("r_3 0.686"), "{text}");
    let json: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert!((json["r_upper"].as_f64().unwrap() - 0.466).abs() < 1e-3);
    assert!(json["r_m"]["100"].is_number());
}

#[test]
fn sparse_triangle_certificate_at_half() {
    let o = run(&["check", "--problem", "lt-h-k3", "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["verdict"], "certified");
}

#[test]
fn inconclusive_certificate_exits_two() {
    let o = run(&["check", "--problem", "lt-k3", "--p", "0.1", "--q", "0.03"]);
    assert_eq!(o.status.code(), Some(2));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["verdict"], "inconclusive");
}

#[test]
fn general_graph_certificates() {
    let o = run(&[
        "check",
        "--problem",
        "lt-h",
        "--family",
        "K4",
        "--r",
        "0.95",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["check", "--problem", "lt-h", "--edges", "3", "--r", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn no_sparse_witness_at_point_three() {
    let o = run(&["break", "--sparse", "--r", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "none");
}

#[test]
fn witness_found_deep_in_breaking_region() {
    let o = run(&["break", "--p", "0.1", "--q", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(json["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["frobnicate"][..],
        &["check", "--problem", "nope", "--r", "0.5"],
        &["check", "--problem", "lt-k3", "--p", "0.1"],
        &["check", "--problem", "lt-k3", "--p", "1.5", "--q", "0.1"],
        &["solve", "--mode", "p=0.5", "--target", "0.4"],
        &[
            "solve", "--family", "K3", "--mode", "dense", "--target", "0.4",
        ],
        &[
            "simulate", "--family", "Z9", "--n", "10", "--p", "0.5", "--q", "0.4",
        ],
        &["--threads", "0", "constants"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(64), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn numeric_failures_exit_65() {
    let o = run(&[
        "solve", "--family", "K3", "--mode", "sparse", "--target", "0.5", "--k", "20000",
    ]);
    assert_eq!(o.status.code(), Some(65));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let o = run(&[
        "solve",
        "--graph",
        missing.to_str().unwrap(),
        "--mode",
        "sparse",
        "--target",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(65));
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["curve", "--kind", "lower-q", "--points", "40"],
        &[
            "gap",
            "--kind",
            "bip-sparse",
            "--r",
            "0.2",
            "--points",
            "300",
        ],
        &["gap", "--kind", "lt-k3", "--p", "0.1", "--q", "0.045"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = dir.path().join(format!("a{i}.dat"));
        let b = dir.path().join(format!("b{i}.dat"));
        for path in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", path.to_str().unwrap()]);
            assert_eq!(run(&full).status.code(), Some(0));
        }
        assert_eq!(read(&a), read(&b));
        let text = String::from_utf8(read(&a)).unwrap();
        let xs: Vec<f64> = text
            .lines()
            .map(|l| l.split(' ').next().unwrap().parse().unwrap())
            .collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("LOWERTAIL_OUT_DIR", dir.path())
        .args(["curve", "--kind", "ut-boundary", "--points", "10"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("ut_boundary.dat")).unwrap();
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate", "--family", "K3", "--n", "30", "--p", "0.5", "--q", "0.48", "--trials", "500",
        "--seed", "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,p,q,trials,hits,p_hat,ci_lo,ci_hi,predicted_rate"
    );
    assert_eq!(lines.next().unwrap().split(',').count(), 9);
    let c = run(&[&args[..12], &["13"]].concat());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn solve_from_edge_list_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("triangle.txt");
    std::fs::write(&g, "# triangle\n0 1\n1 2\n0 2\n").unwrap();
    let args = [
        "solve",
        "--graph",
        g.to_str().unwrap(),
        "--mode",
        "sparse",
        "--target",
        "0.6",
        "--k",
        "2",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let h = 0.6 * 0.6f64.ln() - 0.6 + 1.0;
    assert!((json["objective"].as_f64().unwrap() - h).abs() < 1e-9);
}
