use std::fs;
use std::process::Command;

fn goalcomm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_goalcomm"))
}

#[test]
fn oracle_check_succeeds() {
    let out = goalcomm().arg("oracle-check").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("goals: 18"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn run_grid_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, "rounds = 50\neval_interval = 25\nseeds = 1\n").unwrap();

    let run_dir = dir.path().join("run");
    let out = goalcomm()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&run_dir)
        .arg("--verbose")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(run_dir.join("curve_naive-literal_demo-only_1.csv").exists());
    let log = fs::read_to_string(run_dir.join("events_naive-literal_demo-only_1.log")).unwrap();
    assert_eq!(log.lines().filter(|l| l.starts_with("round=")).count(), 50);

    let grid_dir = dir.path().join("grid");
    let out = goalcomm()
        .args(["grid", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&grid_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let curves = fs::read_dir(&grid_dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("curve_")
        })
        .count();
    assert_eq!(curves, 8);

    let before = fs::read(grid_dir.join("summary.md")).unwrap();
    fs::remove_file(grid_dir.join("summary.md")).unwrap();
    let out = goalcomm()
        .arg("report")
        .arg("--in")
        .arg(&grid_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(before, fs::read(grid_dir.join("summary.md")).unwrap());
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "rounds = 10\nmystery = 3\n").unwrap();
    let out = goalcomm()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mystery"));

    let out = goalcomm()
        .arg("report")
        .arg("--in")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());

    let out = goalcomm()
        .args(["grid", "--config"])
        .arg(dir.path().join("missing.cfg"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
}
