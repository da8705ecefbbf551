//! Newmark average-acceleration time stepping for structures whose
//! restoring forces follow a generalized Maxwell chain.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, scenario
//! handling and the command line live in the companion CLI crate.
//!
//! * [`chain`]: the material model, its Prony text format and the
//!   per-step coefficients shared by every integrator.
//! * [`sdof`]: the single-degree-of-freedom integrator.
//! * [`oracle`]: an exact matrix-exponential reference for the same ODEs.
//! * [`energy`]: time-discrete energy balance and artificial dissipation.
//! * [`fem`]: trilinear hexahedra on a structured box grid.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chain;
pub mod dense;
pub mod energy;
pub mod expm;
pub mod fem;
pub mod load;
pub mod math;
pub mod oracle;
pub mod sdof;

pub use chain::{CellCoefficients, ChainError, MaxwellCell, MaxwellChain, ParseError, StepCoefficients};
pub use energy::{dissipation_report, ledger, DissipationRow, EnergyEntry, EnergyError, EnergyLedger};
pub use load::{LoadError, LoadSignal};
pub use oracle::{build_augmented, solve_exact, AugmentedLti, OracleError, Propagator};
pub use sdof::{
    initial_acceleration, integrate, newmark_step, InitialConditions, NewmarkStepper, SdofError,
    SdofProblem, SdofState, Trajectory,
};
