use lkreg::engine::Termination;
use lkreg::harness::{metrics_csv, pgm_bytes, preset, run_experiment, ProblemSpec, RawConfig, METRICS_HEADER};
use lkreg::sparse::SparseMatrix;
use lkreg::Grid;

#[test]
fn zero_iteration_run_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("ct-desk").unwrap();
    cfg.problem = ProblemSpec::Ct(lkreg::harness::CtSpec {
        size: 16,
        angles: 6,
        angle_start: 0.0,
        angle_span: 180.0,
        rays: None,
        spacing: 1.0,
    });
    cfg.solver.n_max = 0;
    let out = run_experiment(&cfg, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], METRICS_HEADER);
    assert!(lines[1].starts_with("0,0,"));
    assert_eq!(out.summary.terminated_by, Termination::Cap);
    // x₀ = 0 is a constant image.
    let pgm = std::fs::read(dir.path().join("reconstruction.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
    assert!(pgm[pgm.len() - 256..].iter().all(|&b| b == 0));
}

#[test]
fn exact_ct_error_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let text = "preset = ct-desk\nct.size = 24\nct.angles = 12\nnoise_level = 0\nn_max = 60\n";
    let cfg = RawConfig::parse(text, std::path::Path::new("inline.cfg")).unwrap().resolve(None).unwrap();
    let out = run_experiment(&cfg, dir.path()).unwrap();
    let recs = &out.run.trace.records;
    assert_eq!(recs.len(), 61);
    assert!(recs[60].rel_error.unwrap() < recs[0].rel_error.unwrap());
    assert_eq!(metrics_csv(&out.run.trace, 1).lines().count(), 62);
}

#[test]
fn custom_linear_problem_from_files() {
    let dir = tempfile::tempdir().unwrap();
    // A well-conditioned 6x4 system with known solution.
    let truth = [1.0, -2.0, 0.5, 3.0];
    let mut trip = Vec::new();
    for r in 0..6 {
        for c in 0..4 {
            let v = if r % 4 == c { 2.0 } else { 0.1 * (r + c) as f64 };
            trip.push((r, c, v));
        }
    }
    let a = SparseMatrix::from_triplets(6, 4, &trip).unwrap();
    a.save_coordinate(&dir.path().join("a.txt")).unwrap();
    let y = a.apply(&truth).unwrap();
    let data: String = y.iter().map(|v| format!("{v:.17e}\n")).collect();
    std::fs::write(dir.path().join("y.txt"), data).unwrap();
    std::fs::write(dir.path().join("truth.txt"), "1 -2\n0.5 3\n").unwrap();
    let cfg_path = dir.path().join("lin.cfg");
    std::fs::write(
        &cfg_path,
        "problem = custom-linear\nlinear.matrix = a.txt\nlinear.data = y.txt\nlinear.truth = truth.txt\n\
         linear.rows = 2\nlinear.cols = 2\nbeta0 = 0.5\nbeta1 = 100\nn_max = 300\nblocks = 2\n",
    )
    .unwrap();
    let cfg = RawConfig::load(&cfg_path).unwrap().resolve(None).unwrap();
    let out = run_experiment(&cfg, &dir.path().join("out")).unwrap();
    assert_eq!(out.run.result.x.shape(), (2, 2));
    assert!(out.summary.final_rel_error.unwrap() < 1e-3, "{:?}", out.summary.final_rel_error);
}

#[test]
fn pde_desk_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("pde-desk").unwrap();
    cfg.problem = ProblemSpec::Pde { m: 12 };
    cfg.solver.n_max = 5;
    cfg.metric_every = 2;
    let out = run_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(out.run.trace.records.len(), 6);
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    // Rows 0, 2, 4 and the final row 5.
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(out.summary.warnings.iter().any(|w| w.contains("kappa")));
}

#[test]
fn pgm_min_max_scaling() {
    let g = Grid::from_vec(1, 3, vec![-1.0, 0.0, 1.0]).unwrap();
    let bytes = pgm_bytes(&g);
    assert_eq!(&bytes[bytes.len() - 3..], &[0, 128, 255]);
}
