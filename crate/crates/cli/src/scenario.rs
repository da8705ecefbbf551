//! Scenario files: TOML with the unit of every dimensional quantity in the
//! key name. Relative paths resolve against the scenario file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use maxwell_newmark::fem::{BoundaryCondition, BoxGrid, Face, FemModel, Traction};
use maxwell_newmark::{InitialConditions, LoadSignal, MaxwellChain, SdofProblem};
use serde::Deserialize;

use crate::error::CliError;

/// Density used when a FEM scenario does not set one.
pub const DEFAULT_DENSITY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    #[default]
    Newmark,
    Exact,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Newmark => "newmark",
            Solver::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioKind {
    Sdof(SdofScenario),
    Fem(FemScenario),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    /// The file the scenario was read from.
    pub path: PathBuf,
    pub kind: ScenarioKind,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdofScenario {
    pub chain_file: PathBuf,
    /// Multiplies every stiffness in the chain file (1e3 for kN/m tables).
    #[serde(default = "unit_scale")]
    pub modulus_scale: f64,
    pub mass_kg: f64,
    pub dt_s: f64,
    pub t_max_s: f64,
    /// Step sizes for `converge` and `energy-report`.
    #[serde(default)]
    pub dt_list_s: Vec<f64>,
    #[serde(default)]
    pub solver: Solver,
    pub load: SdofLoad,
    #[serde(default)]
    pub initial: Option<SdofInitial>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SdofLoad {
    Step { amplitude_n: f64 },
    Harmonic { amplitude_n: f64, omega_rad_s: f64 },
    /// Rows of `[t_s, force_n]`, linearly interpolated.
    Tabulated { samples_s_n: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdofInitial {
    #[serde(default)]
    pub displacement_m: f64,
    #[serde(default)]
    pub velocity_m_s: f64,
    /// One force per cell; omitted means all zero.
    #[serde(default)]
    pub cell_forces_n: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FemScenario {
    pub chain_file: PathBuf,
    /// Multiplies every modulus in the chain file to obtain Pa.
    #[serde(default = "unit_scale")]
    pub modulus_scale: f64,
    pub cells: [usize; 3],
    pub size_m: [f64; 3],
    #[serde(default)]
    pub density_kg_m3: Option<f64>,
    pub poisson_ratio: f64,
    pub boundary: Boundary,
    pub dt_s: f64,
    pub t_max_s: f64,
    #[serde(default)]
    pub traction: Option<TractionSpec>,
    #[serde(default)]
    pub probe_nodes: Vec<usize>,
    /// Probes at the nodes nearest to these points.
    #[serde(default)]
    pub probe_points_m: Vec<[f64; 3]>,
    /// Write a VTK snapshot every this many steps.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    FixBottom,
    PatchRollers,
    Free,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractionSpec {
    pub face: FaceName,
    pub vector_n_m2: [f64; 3],
    pub profile: Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceName {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

/// Dimensionless time profile multiplying the traction vector.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    Step { scale: f64 },
    Harmonic { scale: f64, omega_rad_s: f64 },
    /// Rows of `[t_s, scale]`.
    Tabulated { samples_s: Vec<[f64; 2]> },
}

fn unit_scale() -> f64 {
    1.0
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let kind: ScenarioKind = toml::from_str(text).map_err(|e| CliError::Scenario {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let scenario = Scenario {
            path: path.to_path_buf(),
            kind,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Directory that relative paths in the file are resolved against.
    pub fn base_dir(&self) -> &Path {
        self.path.parent().unwrap_or_else(|| Path::new("."))
    }

    pub fn resolve(&self, relative: &Path) -> PathBuf {
        if relative.is_absolute() {
            relative.to_path_buf()
        } else {
            self.base_dir().join(relative)
        }
    }

    pub fn name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_owned())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |message: String| {
            Err(CliError::Scenario {
                path: self.path.clone(),
                message,
            })
        };
        match &self.kind {
            ScenarioKind::Sdof(s) => {
                if s.solver == Solver::Exact && matches!(s.load, SdofLoad::Tabulated { .. }) {
                    return bad("the exact solver needs a step or harmonic load".to_owned());
                }
                if s.dt_list_s.iter().any(|&dt| !(dt > 0.0 && dt.is_finite())) {
                    return bad("dt_list_s entries must be positive".to_owned());
                }
            }
            ScenarioKind::Fem(f) => {
                if f.snapshot_every == Some(0) {
                    return bad("snapshot_every must be at least 1".to_owned());
                }
            }
        }
        Ok(())
    }
}

/// Reads a Prony file and applies the modulus scale.
pub fn read_chain(path: &Path, scale: f64) -> Result<MaxwellChain, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let chain = MaxwellChain::parse(&text).map_err(|source| CliError::Chain {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(chain.scaled(scale)?)
}

impl SdofLoad {
    pub fn signal(&self) -> Result<LoadSignal, CliError> {
        Ok(match self {
            SdofLoad::Step { amplitude_n } => LoadSignal::Step { amplitude: *amplitude_n },
            SdofLoad::Harmonic { amplitude_n, omega_rad_s } => LoadSignal::Harmonic {
                amplitude: *amplitude_n,
                omega: *omega_rad_s,
            },
            SdofLoad::Tabulated { samples_s_n } => LoadSignal::tabulated(pairs(samples_s_n))?,
        })
    }
}

impl Profile {
    pub fn signal(&self) -> Result<LoadSignal, CliError> {
        Ok(match self {
            Profile::Step { scale } => LoadSignal::Step { amplitude: *scale },
            Profile::Harmonic { scale, omega_rad_s } => LoadSignal::Harmonic {
                amplitude: *scale,
                omega: *omega_rad_s,
            },
            Profile::Tabulated { samples_s } => LoadSignal::tabulated(pairs(samples_s))?,
        })
    }
}

fn pairs(rows: &[[f64; 2]]) -> Vec<(f64, f64)> {
    rows.iter().map(|r| (r[0], r[1])).collect()
}

impl SdofScenario {
    pub fn problem(&self, chain: MaxwellChain) -> Result<SdofProblem, CliError> {
        let load = self.load.signal()?;
        let init = match &self.initial {
            None => InitialConditions::at_rest(chain.len()),
            Some(i) => InitialConditions {
                displacement: i.displacement_m,
                velocity: i.velocity_m_s,
                cell_forces: i.cell_forces_n.clone().unwrap_or_else(|| vec![0.0; chain.len()]),
            },
        };
        Ok(SdofProblem::new(self.mass_kg, chain, load, init)?)
    }
}

impl FemScenario {
    pub fn density(&self) -> f64 {
        self.density_kg_m3.unwrap_or(DEFAULT_DENSITY)
    }

    pub fn model(&self, chain: MaxwellChain) -> Result<FemModel, CliError> {
        let grid = BoxGrid::new(self.cells, self.size_m)?;
        let traction = match &self.traction {
            None => None,
            Some(t) => Some(Traction {
                face: t.face.into(),
                vector: t.vector_n_m2,
                profile: t.profile.signal()?,
            }),
        };
        Ok(FemModel::new(
            grid,
            self.density(),
            self.poisson_ratio,
            chain,
            self.boundary.into(),
            traction,
        )?)
    }

    /// Probe nodes in file order: explicit indices, then nearest nodes to points.
    pub fn probes(&self, grid: &BoxGrid) -> Vec<usize> {
        let mut probes = self.probe_nodes.clone();
        probes.extend(self.probe_points_m.iter().map(|&p| grid.nearest_node(p)));
        probes
    }
}

impl From<Boundary> for BoundaryCondition {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::FixBottom => BoundaryCondition::FixBottom,
            Boundary::PatchRollers => BoundaryCondition::PatchRollers,
            Boundary::Free => BoundaryCondition::Free,
        }
    }
}

impl From<FaceName> for Face {
    fn from(f: FaceName) -> Self {
        match f {
            FaceName::XMin => Face::XMin,
            FaceName::XMax => Face::XMax,
            FaceName::YMin => Face::YMin,
            FaceName::YMax => Face::YMax,
            FaceName::ZMin => Face::ZMin,
            FaceName::ZMax => Face::ZMax,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario, CliError> {
        Scenario::parse(text, Path::new("/tmp/s/test.toml"))
    }

    #[test]
    fn sdof_round_trip() {
        let s = parse(
            r#"
kind = "sdof"
chain_file = "../data/c.prony"
modulus_scale = 1e3
mass_kg = 1e6
dt_s = 0.5
t_max_s = 300.0
[load]
type = "harmonic"
amplitude_n = 1e6
omega_rad_s = 1.0
"#,
        )
        .unwrap();
        let ScenarioKind::Sdof(sdof) = &s.kind else { panic!() };
        assert_eq!(sdof.solver, Solver::Newmark);
        assert_eq!(s.resolve(&sdof.chain_file), Path::new("/tmp/s/../data/c.prony"));
        assert_eq!(
            sdof.load.signal().unwrap(),
            LoadSignal::Harmonic { amplitude: 1e6, omega: 1.0 }
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse(
            r#"
kind = "sdof"
chain_file = "c.prony"
mass = 1.0
mass_kg = 1.0
dt_s = 0.5
t_max_s = 3.0
[load]
type = "step"
amplitude_n = 1.0
"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mass"), "{err}");
    }

    #[test]
    fn exact_solver_rejects_tabulated_loads() {
        let err = parse(
            r#"
kind = "sdof"
chain_file = "c.prony"
mass_kg = 1.0
dt_s = 0.5
t_max_s = 3.0
solver = "exact"
[load]
type = "tabulated"
samples_s_n = [[0.0, 0.0], [1.0, 1.0]]
"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("exact"));
    }

    #[test]
    fn fem_defaults() {
        let s = parse(
            r#"
kind = "fem"
chain_file = "c.prony"
cells = [2, 2, 2]
size_m = [1.0, 1.0, 1.0]
poisson_ratio = 0.3
boundary = "patch-rollers"
dt_s = 0.1
t_max_s = 1.0
probe_points_m = [[1.0, 1.0, 1.0]]
[traction]
face = "z-max"
vector_n_m2 = [0.0, 0.0, 1.0]
profile = { type = "step", scale = 1.0 }
"#,
        )
        .unwrap();
        let ScenarioKind::Fem(fem) = &s.kind else { panic!() };
        assert_eq!(fem.density_kg_m3, None);
        assert_eq!(fem.density(), DEFAULT_DENSITY);
        let grid = BoxGrid::new(fem.cells, fem.size_m).unwrap();
        assert_eq!(fem.probes(&grid), vec![26]);
    }
}
