//! End-to-end runs through the harness.

use naghdi_core::analysis::{error_norm, NormKind};
use naghdi_core::assembly::{assemble_system, Discretization};
use naghdi_core::geometry::Chart;
use naghdi_core::harness::{
    convergence_study, exact_fields, locking_study, run_case, run_study, CaseName, LockingStudy, RunConfig, StudyMode,
    StudyOutput, StudyReport,
};
use naghdi_core::mesh::{BoundaryKind, Mesh, Rect, SideLabels};
use naghdi_core::solver::solve;
use naghdi_core::Error;

fn config(case: CaseName) -> RunConfig {
    RunConfig { case, ..RunConfig::default() }
}

#[test]
fn patch_case_is_reproduced() {
    let (run, probe) = run_case(&config(CaseName::Patch)).unwrap();
    assert!(probe.passed);
    assert!(run.row.err_hh <= 1e-9, "{}", run.row.err_hh);
    assert!(run.row.residual <= 1e-10);
}

#[test]
fn zero_case_gives_zero_solution() {
    let (run, _) = run_case(&config(CaseName::Zero)).unwrap();
    assert_eq!(run.row.err_hh, 0.0);
    assert!(run.solution.h.iter().chain(&run.solution.v).all(|&x| x == 0.0));
}

#[test]
fn smooth_cylinder_baseline_is_finite() {
    let mut c = config(CaseName::SmoothCylinder);
    c.mesh.n = 4;
    let (run, _) = run_case(&c).unwrap();
    assert!(run.row.err_hh.is_finite() && run.row.err_hh > 0.0);
    assert_eq!(run.row.chart, "cylinder");
    assert_eq!(run.row.n, 4);
}

#[test]
fn exact_in_space_ladder_stays_at_round_off() {
    let mut c = config(CaseName::Patch);
    c.mode = StudyMode::Convergence;
    c.mesh.n = 1;
    c.mesh.refinements = 2;
    c.boundary.bottom = BoundaryKind::SoftSupport;
    let s = convergence_study(&c).unwrap();
    assert_eq!(s.report.rows.len(), 3);
    assert!(s.report.rows.iter().all(|r| r.err_hh < 1e-9));
    assert_eq!(s.probes.len(), 3);
}

#[test]
fn solution_is_invariant_under_element_renumbering() {
    let mesh = Mesh::structured(Rect::default(), 3, SideLabels::default()).unwrap();
    let n = mesh.triangles.len();
    let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    let permuted = mesh.permuted(&perm).unwrap();
    let chart = Chart::Cylinder { radius: 1.0 };
    let moduli = Default::default();
    let exact = exact_fields(CaseName::SmoothCylinder, &chart, 1e-2, moduli, None).unwrap();
    let solve_on = |m: Mesh| {
        let d = Discretization::new(m, chart.clone(), moduli, 2).unwrap();
        let s = assemble_system(&d, &exact, moduli.default_penalty()).unwrap();
        let sol = solve(&s).unwrap();
        (d, sol)
    };
    let (d0, s0) = solve_on(mesh);
    let (d1, s1) = solve_on(permuted);
    let bary = [[1.0 / 3.0; 3], [0.6, 0.3, 0.1], [0.05, 0.15, 0.8]];
    for (t_new, &t_old) in perm.iter().enumerate() {
        for b in bary {
            let p0 = d0.h_field(&s0.h, t_old, b);
            let p1 = d1.h_field(&s1.h, t_new, b);
            for (x, y) in p0.values().iter().zip(p1.values()) {
                assert!((x - y).abs() < 1e-9, "{x} vs {y}");
            }
            let v0 = d0.v_field(&s0.v, t_old, b);
            let v1 = d1.v_field(&s1.v, t_new, b);
            for (x, y) in v0.iter().zip(v1) {
                assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
            }
        }
    }
    let e0 = error_norm(&d0, &exact, &s0.h, &s0.v, NormKind::Broken);
    let e1 = error_norm(&d1, &exact, &s1.h, &s1.v, NormKind::Broken);
    assert!((e0 - e1).abs() < 1e-9 * e0);
}

#[test]
fn locking_study_on_coarse_cylinder() {
    let mut c = config(CaseName::SmoothCylinder);
    c.mode = StudyMode::Locking;
    c.mesh.n = 4;
    c.epsilons = vec![1e-2, 1e-3, 1e-4];
    let l = locking_study(&c).unwrap();
    assert!(LockingStudy::spread(&l.mixed) < 2.0);
    let primal: Vec<f64> = l.primal.rows.iter().map(|r| r.err_hh).collect();
    assert!(primal[2] / primal[0] >= 5.0, "{primal:?}");
    assert!(l.primal.rows.iter().all(|r| r.dofs_v == 0));
}

#[test]
fn thick_shell_mixed_and_primal_agree() {
    let mut c = config(CaseName::SmoothCylinder);
    c.mode = StudyMode::Locking;
    c.mesh.n = 4;
    c.epsilons = vec![1.0];
    let l = locking_study(&c).unwrap();
    let (m, p) = (l.mixed.rows[0].err_hh, l.primal.rows[0].err_hh);
    assert!(m / p < 3.0 && p / m < 3.0, "{m} {p}");
}

#[test]
fn locking_needs_a_free_side() {
    let mut c = config(CaseName::SmoothCylinder);
    c.boundary = SideLabels::all(BoundaryKind::Clamped);
    assert!(matches!(locking_study(&c), Err(Error::Config(_))));
}

#[test]
fn tiny_penalty_aborts_the_study() {
    let mut c = config(CaseName::SmoothPlate);
    c.penalty = Some(1e-6);
    match run_study(&c) {
        Err(Error::Coercivity(msg)) => assert!(msg.contains("penalty")),
        other => panic!("expected a coercivity failure, got {other:?}"),
    }
}

#[test]
fn single_mode_writes_reports() {
    let mut c = config(CaseName::SmoothHypar);
    c.epsilons = vec![0.5, 0.1];
    c.report.timing = false;
    let out = run_study(&c).unwrap();
    let StudyOutput::Study(study) = &out else { panic!("single mode yields a study") };
    assert_eq!(study.report.rows.len(), 2);
    assert!(study.report.rows.iter().all(|r| r.seconds == 0.0 && r.rate.is_none()));
    let dir = tempfile::tempdir().unwrap();
    let files = study.report.write(dir.path(), "study").unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(StudyReport::from_csv(&text).unwrap(), study.report);
}

#[test]
fn config_file_drives_a_study() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "case = \"custom\"\nepsilons = [0.2]\n[chart]\nkind = \"flat-plate\"\n[custom]\nw = [{ i = 2, j = 0, coef = 1.0 }]\ntheta1 = [{ i = 1, j = 0, coef = -2.0 }]\n",
    )
    .unwrap();
    let c = RunConfig::load(&path).unwrap();
    // θ = −∇w for w = x², inside the space: reproduced exactly.
    let (run, _) = run_case(&c).unwrap();
    assert!(run.row.err_hh < 1e-9, "{}", run.row.err_hh);
}
