//! Single runs, refinement ladders, thickness sweeps and the primal comparison.

use std::time::Instant;

use rayon::prelude::*;

use super::cases::exact_fields;
use super::config::{RunConfig, StudyMode};
use super::report::{StudyReport, StudyRow};
use crate::analysis::diagnostics::{korn_from_grams, probe_matrices};
use crate::analysis::{error_norm, CoercivityProbe, ExactFields, NormKind};
use crate::assembly::{
    assemble_a, assemble_b, assemble_c, assemble_membrane_shear, assemble_norm_grams, combine, functional_load,
    primal_load, AssembledSystem, Discretization, NormGrams,
};
use crate::error::{Error, Result};
use crate::mesh::BoundaryKind;
use crate::solver::{solve_spd, solve_with, stability_constant, SaddleSolution};
use crate::sparse::CsrMatrix;

/// Everything at one mesh level that does not depend on ε.
pub struct MeshLevel {
    pub n: usize,
    pub disc: Discretization,
    pub a: CsrMatrix,
    pub b: CsrMatrix,
    pub c: CsrMatrix,
    pub grams: NormGrams,
    pub probe: CoercivityProbe,
    pub korn: Option<f64>,
    pub assembly_seconds: f64,
}

impl MeshLevel {
    pub fn build(config: &RunConfig, level: usize, with_korn: bool) -> Result<MeshLevel> {
        let start = Instant::now();
        let (n, mesh) = config.mesh_at(level)?;
        let disc = Discretization::new(mesh, config.chart(), config.moduli, config.degree)
            .map_err(|e| e.context(format!("setting up level n={n}")))?;
        let penalty = config.penalty();
        let a = assemble_a(&disc, penalty)?;
        let b = assemble_b(&disc);
        let c = assemble_c(&disc);
        let grams = assemble_norm_grams(&disc);
        let probe = probe_matrices(&a, &grams.h, penalty)?;
        if !probe.passed {
            return Err(Error::Coercivity(format!(
                "the a-form is not positive for penalty {penalty:e} on level n={n}{}; raise the penalty \
                 constant (default 10(3λ+2μ) = {:e})",
                probe.min_eigenvalue.map_or(String::new(), |l| format!(" (λ_min = {l:.3e})")),
                config.moduli.default_penalty()
            )));
        }
        let korn = if with_korn { Some(korn_from_grams(&grams)?) } else { None };
        let assembly_seconds = start.elapsed().as_secs_f64();
        Ok(MeshLevel { n, disc, a, b, c, grams, probe, korn, assembly_seconds })
    }

    pub fn system(&self, exact: &ExactFields, penalty: f64) -> AssembledSystem {
        let (f, g) = functional_load(&self.disc, exact, penalty);
        AssembledSystem {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            f,
            g,
            epsilon: exact.epsilon,
            penalty,
        }
    }

    fn row(&self, config: &RunConfig, epsilon: f64, err: f64, residual: f64, seconds: f64) -> StudyRow {
        StudyRow {
            chart: config.chart().name().to_string(),
            n: self.n,
            h_max: self.disc.mesh.h_max(),
            epsilon,
            dofs_h: self.disc.n_h(),
            dofs_v: self.disc.n_v(),
            err_hh: err,
            rate: None,
            korn_lambda_min: self.korn,
            stability_const: None,
            residual,
            seconds: if config.report.timing { seconds } else { 0.0 },
        }
    }
}

/// Result of one mixed solve with its report row.
pub struct CaseRun {
    pub solution: SaddleSolution,
    pub exact: ExactFields,
    pub row: StudyRow,
}

fn exact_for(config: &RunConfig, epsilon: f64) -> Result<ExactFields> {
    exact_fields(config.case, &config.chart(), epsilon, config.moduli, config.custom.as_ref())
}

fn solve_mixed(config: &RunConfig, level: &MeshLevel, epsilon: f64, with_stability: bool) -> Result<CaseRun> {
    let start = Instant::now();
    let exact = exact_for(config, epsilon)?;
    let penalty = config.penalty();
    let system = level.system(&exact, penalty);
    let context = || format!("case {} at n={}, epsilon={epsilon:e}", config.case.as_str(), level.n);
    let solution = solve_with(&system, &config.solver).map_err(|e| e.context(context()))?;
    let err = error_norm(&level.disc, &exact, &solution.h, &solution.v, NormKind::Broken);
    let stability = if with_stability {
        match stability_constant(&system, &level.grams.h, &level.grams.v) {
            Ok(s) => Some(s),
            Err(Error::SizeGuard { dofs, limit }) => {
                log::warn!("skipping the stability constant at n={}: {dofs} unknowns exceed {limit}", level.n);
                None
            }
            Err(e) => return Err(e.context(context())),
        }
    } else {
        None
    };
    let seconds = level.assembly_seconds + start.elapsed().as_secs_f64();
    let mut row = level.row(config, epsilon, err, solution.residual(), seconds);
    row.stability_const = stability;
    Ok(CaseRun { solution, exact, row })
}

/// Solves the configured case on the coarsest mesh at the first ε.
pub fn run_case(config: &RunConfig) -> Result<(CaseRun, CoercivityProbe)> {
    config.validate()?;
    let level = MeshLevel::build(config, 0, config.report.korn)?;
    let run = solve_mixed(config, &level, config.epsilons[0], config.report.stability)?;
    Ok((run, level.probe))
}

/// A finished study with the probe outcome of every mesh level.
#[derive(Clone, Debug, PartialEq)]
pub struct Study {
    pub report: StudyReport,
    pub probes: Vec<CoercivityProbe>,
}

fn ladder(config: &RunConfig, levels: usize, korn: bool, stability: bool) -> Result<Study> {
    config.validate()?;
    let mut per_level = Vec::with_capacity(levels);
    let mut probes = Vec::with_capacity(levels);
    for l in 0..levels {
        let level = MeshLevel::build(config, l, korn)?;
        // The ε runs share the level's matrices; each solve is sequential so
        // the ordered collect keeps the output independent of scheduling.
        let rows = config
            .epsilons
            .par_iter()
            .map(|&eps| solve_mixed(config, &level, eps, stability).map(|r| r.row))
            .collect::<Result<Vec<_>>>()?;
        probes.push(level.probe.clone());
        per_level.push(rows);
    }
    // Group rows by ε, each group ordered coarse to fine.
    let mut report = StudyReport::default();
    for e in 0..config.epsilons.len() {
        report.rows.extend(per_level.iter().map(|rows| rows[e].clone()));
    }
    report.compute_rates();
    Ok(Study { report, probes })
}

/// Every ε on the coarsest mesh.
pub fn single_study(config: &RunConfig) -> Result<Study> {
    ladder(config, 1, config.report.korn, config.report.stability)
}

pub fn convergence_study(config: &RunConfig) -> Result<Study> {
    if config.mesh.refinements < 2 {
        return Err(Error::Config("a convergence study needs at least 3 mesh levels".into()));
    }
    ladder(config, config.mesh.refinements + 1, config.report.korn, config.report.stability)
}

/// Refinement ladder with the Korn eigenvalue and the stability constant on every row.
pub fn diagnostics_study(config: &RunConfig) -> Result<Study> {
    ladder(config, config.mesh.refinements + 1, true, true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LockingStudy {
    pub mixed: StudyReport,
    pub primal: StudyReport,
    pub probe: CoercivityProbe,
}

impl LockingStudy {
    /// Largest over smallest error across the ε ladder.
    pub fn spread(report: &StudyReport) -> f64 {
        let (lo, hi) =
            report.rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.err_hh), hi.max(r.err_hh)));
        hi / lo
    }
}

/// Mixed method against the penalized primal form on one mesh across the ε ladder.
pub fn locking_study(config: &RunConfig) -> Result<LockingStudy> {
    config.validate()?;
    let b = config.boundary;
    if config.mesh.file.is_none() && ![b.bottom, b.right, b.top, b.left].contains(&BoundaryKind::Free) {
        return Err(Error::Config("the locking study needs a free side (bending-dominated setup)".into()));
    }
    let level = MeshLevel::build(config, 0, config.report.korn)?;
    let penalty = config.penalty();
    let membrane = assemble_membrane_shear(&level.disc, penalty)?;
    let runs = config
        .epsilons
        .par_iter()
        .map(|&eps| -> Result<(StudyRow, StudyRow)> {
            let mixed = solve_mixed(config, &level, eps, config.report.stability)?.row;
            let start = Instant::now();
            let exact = exact_for(config, eps)?;
            let k = combine(&level.a, &membrane, 1.0 / (eps * eps));
            let f = primal_load(&level.disc, &exact, penalty);
            let x = solve_spd(&k, &f).map_err(|e| e.context(format!("primal baseline at epsilon={eps:e}")))?;
            let kx = k.matvec(&x);
            let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let r: Vec<f64> = f.iter().zip(&kx).map(|(a, b)| a - b).collect();
            let residual = norm(&r) / (norm(&f) + norm(&kx)).max(f64::MIN_POSITIVE);
            let zero_v = vec![0.0; level.disc.n_v()];
            let err = error_norm(&level.disc, &exact, &x, &zero_v, NormKind::Broken);
            let seconds = level.assembly_seconds + start.elapsed().as_secs_f64();
            let mut primal = level.row(config, eps, err, residual, seconds);
            primal.dofs_v = 0;
            Ok((mixed, primal))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mixed, primal): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(LockingStudy { mixed: StudyReport { rows: mixed }, primal: StudyReport { rows: primal }, probe: level.probe })
}

/// Output of the study selected by `config.mode`.
#[derive(Clone, Debug, PartialEq)]
pub enum StudyOutput {
    Study(Study),
    Locking(LockingStudy),
}

impl StudyOutput {
    pub fn probes(&self) -> Vec<&CoercivityProbe> {
        match self {
            StudyOutput::Study(s) => s.probes.iter().collect(),
            StudyOutput::Locking(l) => vec![&l.probe],
        }
    }

    /// Named reports in output order.
    pub fn reports(&self) -> Vec<(&'static str, &StudyReport)> {
        match self {
            StudyOutput::Study(s) => vec![("study", &s.report)],
            StudyOutput::Locking(l) => vec![("locking_mixed", &l.mixed), ("locking_primal", &l.primal)],
        }
    }
}

pub fn run_study(config: &RunConfig) -> Result<StudyOutput> {
    Ok(match config.mode {
        StudyMode::Single => StudyOutput::Study(single_study(config)?),
        StudyMode::Convergence => StudyOutput::Study(convergence_study(config)?),
        StudyMode::Diagnostics => StudyOutput::Study(diagnostics_study(config)?),
        StudyMode::Locking => StudyOutput::Locking(locking_study(config)?),
    })
}
