//! Exact reference solution of the coupled mass/cell ODEs.
//!
//! The system is linear and time invariant once the load is generated by
//! extra "carrier" states, so sampling it at a fixed step is a repeated
//! multiplication by `exp(A dt)`. No stability or accuracy restriction on
//! `dt` applies, which matters for relaxation times spanning 21 decades.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dense::Matrix;
use crate::expm::expm;
use crate::load::LoadSignal;
use crate::sdof::{step_count, SdofProblem, SdofState, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleError {
    /// Only step and harmonic loads can be generated by carrier states.
    UnsupportedLoad,
    InvalidTimeGrid { dt: f64, t_max: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::UnsupportedLoad => {
                write!(f, "the exact solver supports step and harmonic loads only")
            }
            OracleError::InvalidTimeGrid { dt, t_max } => {
                write!(f, "need dt > 0 and t_max >= dt, got dt = {dt}, t_max = {t_max}")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// `x' = A x` with `x = [r, v, f_1..f_P, carriers..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedLti {
    system: Matrix,
    initial: Vec<f64>,
    cells: usize,
    carriers: usize,
}

impl AugmentedLti {
    pub const DISPLACEMENT: usize = 0;
    pub const VELOCITY: usize = 1;

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn system(&self) -> &Matrix {
        &self.system
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn carriers(&self) -> usize {
        self.carriers
    }

    /// Index of the first cell force.
    pub fn force_offset(&self) -> usize {
        2
    }

    pub fn cell_forces<'x>(&self, x: &'x [f64]) -> &'x [f64] {
        &x[2..2 + self.cells]
    }
}

pub fn build_augmented(problem: &SdofProblem) -> Result<AugmentedLti, OracleError> {
    let chain = problem.chain();
    let m = problem.mass();
    let cells = chain.len();
    let (carriers, amplitude) = match *problem.load() {
        LoadSignal::Step { amplitude } => (1, amplitude),
        LoadSignal::Harmonic { amplitude, .. } => (2, amplitude),
        LoadSignal::Tabulated(_) => return Err(OracleError::UnsupportedLoad),
    };
    let n = 2 + cells + carriers;
    let carrier = 2 + cells;
    let mut a = Matrix::zeros(n);

    // r' = v
    a[(0, 1)] = 1.0;
    // m v' = F - k_inf r - sum(f)
    a[(1, 0)] = -chain.long_term_stiffness() / m;
    for p in 0..cells {
        a[(1, 2 + p)] = -1.0 / m;
    }
    a[(1, carrier)] = amplitude / m;
    // f' = k v - f / theta
    for (p, cell) in chain.cells().iter().enumerate() {
        a[(2 + p, 1)] = cell.stiffness();
        a[(2 + p, 2 + p)] = -1.0 / cell.relaxation_time();
    }

    let init = problem.initial();
    let mut x0 = vec![0.0; n];
    x0[0] = init.displacement;
    x0[1] = init.velocity;
    x0[2..2 + cells].copy_from_slice(&init.cell_forces);
    match *problem.load() {
        LoadSignal::Step { .. } => x0[carrier] = 1.0,
        LoadSignal::Harmonic { omega, .. } => {
            // s = sin(wt) drives the load, c = cos(wt)
            a[(carrier, carrier + 1)] = omega;
            a[(carrier + 1, carrier)] = -omega;
            x0[carrier] = 0.0;
            x0[carrier + 1] = 1.0;
        }
        LoadSignal::Tabulated(_) => unreachable!(),
    }

    Ok(AugmentedLti {
        system: a,
        initial: x0,
        cells,
        carriers,
    })
}

/// The exact one-step map `exp(A dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    dt: f64,
    transition: Matrix,
}

impl Propagator {
    pub fn new(lti: &AugmentedLti, dt: f64) -> Self {
        Self {
            dt,
            transition: expm(&lti.system.scaled(dt)),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.transition.mul_vec(x)
    }
}

/// Exact states at `t_i = i * dt_out`; accelerations come from equilibrium.
pub fn solve_exact(problem: &SdofProblem, dt_out: f64, t_max: f64) -> Result<Trajectory, OracleError> {
    let steps = step_count(dt_out, t_max).map_err(|_| OracleError::InvalidTimeGrid { dt: dt_out, t_max })?;
    let lti = build_augmented(problem)?;
    let propagator = Propagator::new(&lti, dt_out);
    let decode = |x: &[f64], time: f64| {
        let cell_forces = lti.cell_forces(x).to_vec();
        let displacement = x[AugmentedLti::DISPLACEMENT];
        let acceleration = (problem.load().value(time)
            - problem.chain().long_term_stiffness() * displacement
            - cell_forces.iter().sum::<f64>())
            / problem.mass();
        SdofState {
            time,
            displacement,
            velocity: x[AugmentedLti::VELOCITY],
            acceleration,
            cell_forces,
        }
    };
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = lti.initial.clone();
    states.push(decode(&x, 0.0));
    for i in 1..=steps {
        x = propagator.apply(&x);
        states.push(decode(&x, i as f64 * dt_out));
    }
    Ok(Trajectory { dt: dt_out, states })
}
