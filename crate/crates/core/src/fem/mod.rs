//! Viscoelastic continuum on a structured box grid.
//!
//! Every stress contribution shares the unit-modulus isotropic tensor
//! [`DnuTensor`], so the long-term part assembles through one stiffness
//! matrix `K1` and each Maxwell cell keeps a Voigt stress per Gauss point.
//! The time step solves `(M + c K1) a = rhs` with a matrix factored once
//! per run.

use core::fmt;

use crate::chain::ChainError;

pub mod grid;
pub mod hex8;
pub mod material;
pub mod model;
pub mod solver;
pub mod sparse;

pub use grid::{BoxGrid, Face};
pub use hex8::BoxElement;
pub use material::{update_cell_stresses, DnuTensor};
pub use model::{assemble, Assembly, BoundaryCondition, FemModel, Traction};
pub use solver::{run_fem, FemIntegrator, FemRun, FemRunOptions, FemSnapshot, FemState};
pub use sparse::{CsrMatrix, SkylineCholesky};

#[derive(Debug, Clone, PartialEq)]
pub enum FemError {
    InvalidGrid,
    InvalidPoisson(f64),
    InvalidDensity(f64),
    /// No displacement is prescribed, so the stiffness has rigid modes.
    NoDirichlet,
    /// Cholesky pivot at a global DOF was not positive.
    NotPositiveDefinite { row: usize },
    NonFinite { step: usize },
    InvalidTimeGrid { dt: f64, t_max: f64 },
    ProbeOutOfRange { node: usize },
    StateShape,
    Chain(ChainError),
}

impl fmt::Display for FemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FemError::InvalidGrid => write!(f, "grid needs at least one cell per axis and a positive size"),
            FemError::InvalidPoisson(nu) => write!(f, "Poisson ratio {nu} outside (0, 0.5)"),
            FemError::InvalidDensity(rho) => write!(f, "density {rho} must be positive"),
            FemError::NoDirichlet => write!(f, "no prescribed displacements; stiffness is singular"),
            FemError::NotPositiveDefinite { row } => {
                write!(f, "matrix not positive definite at DOF {row}")
            }
            FemError::NonFinite { step } => write!(f, "non-finite state at step {step}"),
            FemError::InvalidTimeGrid { dt, t_max } => {
                write!(f, "invalid time grid: dt = {dt}, t_max = {t_max}")
            }
            FemError::ProbeOutOfRange { node } => write!(f, "probe node {node} does not exist"),
            FemError::StateShape => write!(f, "state vectors do not match the model"),
            FemError::Chain(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FemError {}

impl From<ChainError> for FemError {
    fn from(e: ChainError) -> Self {
        FemError::Chain(e)
    }
}
