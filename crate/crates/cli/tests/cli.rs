use std::path::Path;
use std::process::{Command, Output};

fn naghdi(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naghdi"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn run_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case = \"patch\"\n[report]\ntiming = false\n");
    let out = dir.path().join("out");
    let o = naghdi(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("study.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "chart,n,h_max,epsilon,dofs_H,dofs_V,err_Hh,rate,korn_lambda_min,stability_const,residual,seconds"
    );
    assert!(lines.next().unwrap().starts_with("flat-plate,2,"));
    assert!(out.join("study.txt").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("# study"));
}

#[test]
fn identical_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case = \"smooth-hypar\"\nepsilons = [0.1, 0.01]\n[report]\ntiming = false\n");
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = naghdi(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], dir.path());
        assert!(o.status.success());
        csvs.push(std::fs::read(out.join("study.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = naghdi(&["run", "--degree", "3", "--kappa", "0.8333333333333334", "--penalty", "80"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // Degree 3 on the default n = 2 mesh has more H unknowns than degree 2 (276).
    let stdout = String::from_utf8_lossy(&o.stdout);
    let row = stdout.lines().find(|l| l.starts_with("cylinder")).unwrap();
    let dofs: usize = row.split_whitespace().nth(4).unwrap().parse().unwrap();
    assert!(dofs > 276, "{row}");
}

#[test]
fn failed_probe_sets_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = naghdi(&["run", "--penalty", "1e-6"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("penalty"));
}

#[test]
fn configuration_errors_exit_with_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[boundary]\nleft = \"Q\"\n");
    let o = naghdi(&["run", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected one of `D`, `S`, `F`"));
    let o = naghdi(&["converge", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn locking_and_diagnostics_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write_config(dir.path(), "epsilons = [1e-2, 1e-4]\n[mesh]\nn = 2\nrefinements = 1\n[report]\ntiming = false\n");
    let out = dir.path().join("out");
    let o = naghdi(&["locking", "--config", &cfg, "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("locking_mixed.csv").exists() && out.join("locking_primal.csv").exists());
    let o = naghdi(&["diagnostics", "--config", &cfg, "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("study.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert!(!fields[8].is_empty() && !fields[9].is_empty(), "{line}");
    }
}
