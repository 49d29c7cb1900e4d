//! Run configuration, read from TOML. Every key is optional:
//!
//! ```toml
//! case = "smooth-cylinder"      # patch | smooth-plate | smooth-cylinder | smooth-hypar | custom | zero
//! mode = "single"               # single | convergence | locking | diagnostics
//! degree = 2
//! epsilons = [1e-3]
//! # penalty = 50.0              # default 10 (3λ + 2μ)
//!
//! [chart]                       # default depends on the case
//! kind = "cylinder"             # flat-plate | cylinder | hyperbolic-paraboloid | polynomial-graph
//! radius = 1.0
//!
//! [mesh]
//! n = 2                         # subdivisions per side of the coarsest structured mesh
//! refinements = 3               # extra levels for convergence and diagnostics studies
//! domain = { x = [0.0, 1.0], y = [0.0, 1.0] }
//! # file = "plate.mesh"         # replaces the structured mesh
//!
//! [boundary]
//! left = "D"
//! bottom = "F"
//! right = "F"
//! top = "F"
//!
//! [moduli]
//! lambda = 1.0
//! mu = 1.0
//! kappa = 1.0
//!
//! [solver]
//! tolerance = 1e-10
//! dense_limit = 2000
//! max_refinements = 6
//!
//! [report]
//! korn = false                  # Korn eigenvalue per mesh
//! stability = false             # stability constant per mesh and ε (small systems only)
//! timing = true                 # false writes 0 in the seconds column
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cases::{CaseName, CustomFields};
use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::material::ElasticModuli;
use crate::mesh::{BoundaryKind, Mesh, Rect, SideLabels};
use crate::solver::SolverOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyMode {
    Single,
    Convergence,
    Locking,
    Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub n: usize,
    pub refinements: usize,
    pub domain: Rect,
    pub file: Option<PathBuf>,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { n: 2, refinements: 3, domain: Rect::default(), file: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    pub korn: bool,
    pub stability: bool,
    pub timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { korn: false, stability: false, timing: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseName,
    pub mode: StudyMode,
    pub degree: usize,
    pub epsilons: Vec<f64>,
    pub penalty: Option<f64>,
    pub chart: Option<Chart>,
    pub mesh: MeshConfig,
    pub boundary: SideLabels,
    pub moduli: ElasticModuli,
    pub solver: SolverOptions,
    pub report: ReportOptions,
    pub custom: Option<CustomFields>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: CaseName::SmoothCylinder,
            mode: StudyMode::Single,
            degree: 2,
            epsilons: vec![1e-3],
            penalty: None,
            chart: None,
            mesh: MeshConfig::default(),
            boundary: SideLabels::default(),
            moduli: ElasticModuli::default(),
            solver: SolverOptions::default(),
            report: ReportOptions::default(),
            custom: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        RunConfig::from_toml(&text).map_err(|e| e.context(format!("reading {}", path.as_ref().display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn chart(&self) -> Chart {
        self.chart.clone().unwrap_or_else(|| self.case.default_chart())
    }

    pub fn penalty(&self) -> f64 {
        self.penalty.unwrap_or_else(|| self.moduli.default_penalty())
    }

    pub fn validate(&self) -> Result<()> {
        self.moduli.validate()?;
        self.chart().validate()?;
        if self.degree < 2 {
            return Err(Error::Config(format!("degree must be at least 2, got {}", self.degree)));
        }
        if self.epsilons.is_empty() {
            return Err(Error::Config("at least one thickness epsilon is required".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::Config(format!("epsilon must be positive, got {e}")));
        }
        if let Some(p) = self.penalty {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::Config(format!("penalty must be positive, got {p}")));
            }
        }
        if self.mesh.n == 0 {
            return Err(Error::Config("mesh.n must be at least 1".into()));
        }
        let b = self.boundary;
        let sides = [b.bottom, b.right, b.top, b.left];
        if self.mesh.file.is_none() && !sides.iter().any(|k| *k != BoundaryKind::Free) {
            log::warn!("no side is clamped or supported; the discrete problem is singular");
        }
        if self.mode == StudyMode::Convergence && self.mesh.refinements < 2 {
            return Err(Error::Config("a convergence study needs at least 3 mesh levels (refinements >= 2)".into()));
        }
        Ok(())
    }

    /// Number of mesh levels a study of this mode visits.
    pub fn levels(&self) -> usize {
        match self.mode {
            StudyMode::Single | StudyMode::Locking => 1,
            StudyMode::Convergence | StudyMode::Diagnostics => self.mesh.refinements + 1,
        }
    }

    /// Mesh of a level with its nominal subdivision count.
    pub fn mesh_at(&self, level: usize) -> Result<(usize, Mesh)> {
        let scale = 1usize << level;
        match &self.mesh.file {
            Some(path) => {
                let mut m = Mesh::load(path)?;
                for _ in 0..level {
                    m = m.refine(crate::mesh::Refinement::Uniform)?;
                }
                Ok((scale, m))
            }
            None => {
                let n = self.mesh.n * scale;
                Ok((n, Mesh::structured(self.mesh.domain, n, self.boundary)?))
            }
        }
    }
}
