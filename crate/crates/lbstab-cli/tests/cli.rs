//! End-to-end tests of the `lbstab` binary: exit-code contract, artifact
//! layout, flag/config merging, and byte-level determinism of the outputs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lbstab"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["construct", "--preset", "preset-1", "--out", "c"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("symmetrization residual"), "{text}");
    assert!(dir.path().join("c/operator.txt").is_file());
    assert!(dir.path().join("c/certificate.txt").is_file());

    let verify = run_in(
        dir.path(),
        &["verify", "--operator", "c/operator.txt", "--out", "v"],
    );
    assert_eq!(code(&verify), 0, "stderr: {}", stderr(&verify));
    assert!(dir.path().join("v/verification.txt").is_file());
    let report = std::fs::read_to_string(dir.path().join("v/verification.txt")).unwrap();
    assert!(report.contains("certified true"), "{report}");
}

#[test]
fn infeasible_background_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["construct", "--preset", "preset-4", "--out", "c"],
    );
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("no positive diagonal weights"),
        "{}",
        stderr(&out)
    );
    assert!(!dir.path().join("c/operator.txt").exists());
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown flag.
    let out = run_in(dir.path(), &["scan", "--bogus"]);
    assert_eq!(code(&out), 1);
    // Unknown preset.
    let out = run_in(dir.path(), &["construct", "--preset", "preset-9"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("preset"), "{}", stderr(&out));
    // Missing required pieces.
    let out = run_in(dir.path(), &["scan"]);
    assert_eq!(code(&out), 1);
    let out = run_in(dir.path(), &["converge", "--preset", "preset-1"]);
    assert_eq!(code(&out), 1);
    // Help exits zero.
    let out = run_in(dir.path(), &["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn tau_below_half_needs_explicit_override() {
    let dir = tempfile::tempdir().unwrap();
    let refused = run_in(
        dir.path(),
        &["construct", "--preset", "preset-1", "--tau", "0.4"],
    );
    assert_eq!(code(&refused), 1);
    assert!(stderr(&refused).contains("1/2"), "{}", stderr(&refused));

    let allowed = run_in(
        dir.path(),
        &[
            "construct",
            "--preset",
            "preset-1",
            "--tau",
            "0.4",
            "--allow-unstable",
            "--out",
            "c",
        ],
    );
    assert_eq!(code(&allowed), 0, "stderr: {}", stderr(&allowed));
    assert!(stdout(&allowed).contains("outside the certified range"));
    assert!(dir.path().join("c/operator.txt").is_file());
}

#[test]
fn config_file_merges_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"command": "construct", "preset": "preset-2", "out": "from-file"}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["construct", "--config", "run.json", "--out", "from-flag"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(dir.path().join("from-flag/operator.txt").is_file());
    assert!(!dir.path().join("from-file").exists());

    // The file's command must match the subcommand.
    let mismatch = run_in(dir.path(), &["scan", "--config", "run.json"]);
    assert_eq!(code(&mismatch), 1);
    assert!(
        stderr(&mismatch).contains("subcommand"),
        "{}",
        stderr(&mismatch)
    );

    // Unknown keys are listed by name.
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"command": "construct", "preset": "preset-1", "wibble": 3}"#,
    )
    .unwrap();
    let bad = run_in(dir.path(), &["construct", "--config", "bad.json"]);
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("wibble"), "{}", stderr(&bad));
}

#[test]
fn simulate_writes_deterministic_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--preset",
        "preset-1",
        "--grid",
        "8",
        "--steps",
        "10",
        "--test-case",
        "1",
    ];
    let first = run_in(dir.path(), &[&args[..], &["--out", "a"][..]].concat());
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    let second = run_in(dir.path(), &[&args[..], &["--out", "b"][..]].concat());
    assert_eq!(code(&second), 0);
    for name in ["monitors.csv", "snapshot.csv", "snapshot.bin"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty());
    }
    let monitors = std::fs::read_to_string(dir.path().join("a/monitors.csv")).unwrap();
    // Header plus the initial record plus one per step.
    assert_eq!(monitors.lines().count(), 1 + 11);
    assert!(monitors.starts_with("step,energy,rho_sum,j1_sum,j2_sum,j3_sum\n"));
}

#[test]
fn converge_reports_decreasing_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "converge",
            "--preset",
            "preset-1",
            "--test-case",
            "1",
            "--grid",
            "16,32",
            "--out",
            "g",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("g/convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("grid_n,error,order"));
    let parse_row = |line: &str| -> (u32, f64) {
        let cells: Vec<&str> = line.split(',').collect();
        (cells[0].parse().unwrap(), cells[1].parse().unwrap())
    };
    let (n1, e1) = parse_row(lines.next().unwrap());
    let (n2, e2) = parse_row(lines.next().unwrap());
    assert_eq!((n1, n2), (16, 32));
    assert!(e2 < e1, "error did not decrease: {e1} -> {e2}");
}

#[test]
fn shipped_example_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0usize;
    for entry in std::fs::read_dir(&dir).expect("configs directory") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).unwrap();
        lbstab::config::RunConfig::from_json_str(&text)
            .unwrap_or_else(|e| panic!("{} does not validate: {e}", path.display()));
    }
    assert!(seen >= 9, "expected the shipped examples, found {seen}");
}

#[test]
fn scan_writes_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "scan", "--u01", "0.0962", "--min", "-0.3", "--max", "0.3", "--cells", "3",
            "--out", "d",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("d/domain.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 9);
    assert!(csv.starts_with("u02,u03,feasible\n"));
    // Identical scans are byte-identical.
    let again = run_in(
        dir.path(),
        &[
            "scan", "--u01", "0.0962", "--min", "-0.3", "--max", "0.3", "--cells", "3",
            "--out", "d2",
        ],
    );
    assert_eq!(code(&again), 0);
    let csv2 = std::fs::read_to_string(dir.path().join("d2/domain.csv")).unwrap();
    assert_eq!(csv, csv2);
}
