use std::path::Path;
use std::process::Command;

fn lkreg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lkreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const SMALL_CT: &str = "preset = ct-desk\nct.size = 16\nct.angles = 8\nn_max = 30\n";

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    write(&cfg, SMALL_CT);
    let out = dir.path().join("out");
    let o = lkreg(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["metrics.csv", "trace.csv", "reconstruction.pgm", "truth.pgm", "summary.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["n_final"].as_u64().unwrap() <= 30);
    assert!(summary["final_rel_error"].as_f64().unwrap() < 1.0);
}

#[test]
fn same_seed_gives_identical_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    write(&cfg, SMALL_CT);
    let mut texts = Vec::new();
    for (name, seed) in [("a", "7"), ("b", "7"), ("c", "8")] {
        let out = dir.path().join(name);
        let o = lkreg(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        texts.push(std::fs::read(out.join("metrics.csv")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_ne!(texts[0], texts[2]);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.cfg");
    write(&bad_key, "preset = ct-desk\nwarp_factor = 9\n");
    let o = lkreg(&["run", "--config", bad_key.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warp_factor"));

    let bad_range = dir.path().join("range.cfg");
    write(&bad_range, "tau = 0.9\n");
    assert_eq!(lkreg(&["validate", "--config", bad_range.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(lkreg(&["validate", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(lkreg(&["validate"]).status.code(), Some(2));
    let missing = dir.path().join("missing.cfg");
    assert_eq!(lkreg(&["validate", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn inner_failure_exits_with_3_and_keeps_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.cfg");
    write(&cfg, &format!("{SMALL_CT}inner_max_iter = 1\n"));
    let out = dir.path().join("out");
    let o = lkreg(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let summary = std::fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"inner-failure\""));
    assert!(std::fs::read_to_string(out.join("metrics.csv")).unwrap().lines().count() >= 2);
}

#[test]
fn validate_reports_pde_warning() {
    let o = lkreg(&["validate", "--preset", "pde-paper"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["kappa"].as_f64(), Some(1.0));
    assert!((report["kappa_beta1_sigma"].as_f64().unwrap() - 20.0).abs() < 1e-9);
    assert_eq!(report["kappa_ok"].as_bool(), Some(false));
    let o = lkreg(&["validate", "--preset", "ct-paper"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["kappa_ok"].as_bool(), Some(true));
}

#[test]
fn export_matrix_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m.cfg");
    write(&cfg, "ct.size = 8\nct.angles = 3\n");
    let path = dir.path().join("a.txt");
    let o = lkreg(&["export-matrix", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<usize> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    let rays = (8.0 * std::f64::consts::SQRT_2).round() as usize + 1;
    assert_eq!(header[..2], [3 * rays, 64]);
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), header[2]);
    for line in body {
        let parts: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(parts.len(), 3);
        assert!(parts[0].parse::<usize>().unwrap() < header[0]);
        assert!(parts[1].parse::<usize>().unwrap() < 64);
        let mantissa = parts[2].split(['e', 'E']).next().unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17, "{line}");
    }

    let pde = dir.path().join("pde.cfg");
    write(&pde, "problem = pde\n");
    let o = lkreg(&["export-matrix", "--config", pde.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
