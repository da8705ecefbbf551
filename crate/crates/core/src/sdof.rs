//! Single-degree-of-freedom mass on a Maxwell chain, integrated with the
//! average-acceleration Newmark scheme.
//!
//! Displacement and velocity follow the trapezoidal kinematics
//!
//! ```text
//! v[i+1] = v[i] + dt/2 (a[i] + a[i+1])
//! r[i+1] = r[i] + dt v[i] + dt^2/4 (a[i] + a[i+1])
//! ```
//!
//! while each cell force is advanced by the exact solution of its relaxation
//! ODE under that linear velocity. Substituting both into equilibrium at
//! `t[i+1]` leaves one scalar equation for `a[i+1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::{ChainError, MaxwellChain, StepCoefficients};
use crate::load::LoadSignal;

#[derive(Debug, Clone, PartialEq)]
pub enum SdofError {
    NonPositiveMass(f64),
    InitialForceCount { expected: usize, found: usize },
    InvalidTimeGrid { dt: f64, t_max: f64 },
    NonFinite { step: usize },
    Chain(ChainError),
}

impl fmt::Display for SdofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SdofError::NonPositiveMass(m) => write!(f, "mass must be positive and finite, got {m}"),
            SdofError::InitialForceCount { expected, found } => {
                write!(f, "expected {expected} initial cell forces, found {found}")
            }
            SdofError::InvalidTimeGrid { dt, t_max } => {
                write!(f, "need dt > 0 and t_max >= dt, got dt = {dt}, t_max = {t_max}")
            }
            SdofError::NonFinite { step } => write!(f, "non-finite state at step {step}"),
            SdofError::Chain(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SdofError {}

impl From<ChainError> for SdofError {
    fn from(e: ChainError) -> Self {
        SdofError::Chain(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions {
    pub displacement: f64,
    pub velocity: f64,
    pub cell_forces: Vec<f64>,
}

impl InitialConditions {
    pub fn at_rest(cells: usize) -> Self {
        Self {
            displacement: 0.0,
            velocity: 0.0,
            cell_forces: vec![0.0; cells],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdofProblem {
    mass: f64,
    chain: MaxwellChain,
    load: LoadSignal,
    initial: InitialConditions,
}

impl SdofProblem {
    pub fn new(
        mass: f64,
        chain: MaxwellChain,
        load: LoadSignal,
        initial: InitialConditions,
    ) -> Result<Self, SdofError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(SdofError::NonPositiveMass(mass));
        }
        if initial.cell_forces.len() != chain.len() {
            return Err(SdofError::InitialForceCount {
                expected: chain.len(),
                found: initial.cell_forces.len(),
            });
        }
        Ok(Self {
            mass,
            chain,
            load,
            initial,
        })
    }

    /// Zero displacement, velocity and cell forces at `t = 0`.
    pub fn at_rest(mass: f64, chain: MaxwellChain, load: LoadSignal) -> Result<Self, SdofError> {
        let initial = InitialConditions::at_rest(chain.len());
        Self::new(mass, chain, load, initial)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn chain(&self) -> &MaxwellChain {
        &self.chain
    }

    pub fn load(&self) -> &LoadSignal {
        &self.load
    }

    pub fn initial(&self) -> &InitialConditions {
        &self.initial
    }

    /// `m a + k_inf r + sum(f) - F(t)` at a state.
    pub fn equilibrium_residual(&self, state: &SdofState) -> f64 {
        self.mass * state.acceleration
            + self.chain.long_term_stiffness() * state.displacement
            + state.cell_forces.iter().sum::<f64>()
            - self.load.value(state.time)
    }

    /// The initial state, with acceleration from equilibrium at `t = 0`.
    pub fn initial_state(&self) -> SdofState {
        SdofState {
            time: 0.0,
            displacement: self.initial.displacement,
            velocity: self.initial.velocity,
            acceleration: initial_acceleration(self),
            cell_forces: self.initial.cell_forces.clone(),
        }
    }
}

/// State at one time node. Cell forces double as the constraint multipliers
/// of the variational form.
#[derive(Debug, Clone, PartialEq)]
pub struct SdofState {
    pub time: f64,
    pub displacement: f64,
    pub velocity: f64,
    pub acceleration: f64,
    pub cell_forces: Vec<f64>,
}

impl SdofState {
    /// Spring elongation of cell `p`.
    pub fn elastic_part(&self, chain: &MaxwellChain, p: usize) -> f64 {
        self.cell_forces[p] / chain.cells()[p].stiffness()
    }

    /// Dashpot elongation of cell `p`.
    pub fn viscous_part(&self, chain: &MaxwellChain, p: usize) -> f64 {
        self.displacement - self.elastic_part(chain, p)
    }

    pub fn is_finite(&self) -> bool {
        self.displacement.is_finite()
            && self.velocity.is_finite()
            && self.acceleration.is_finite()
            && self.cell_forces.iter().all(|f| f.is_finite())
    }
}

/// States at `t[i] = i * dt`, `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<SdofState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &SdofState {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn displacements(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.displacement)
    }
}

/// `(F(0) - k_inf r0 - sum(f0)) / m`.
pub fn initial_acceleration(problem: &SdofProblem) -> f64 {
    let init = &problem.initial;
    (problem.load.value(0.0)
        - problem.chain.long_term_stiffness() * init.displacement
        - init.cell_forces.iter().sum::<f64>())
        / problem.mass
}

/// Newmark stepper with the step-invariant factors precomputed.
#[derive(Debug, Clone)]
pub struct NewmarkStepper<'a> {
    problem: &'a SdofProblem,
    coeffs: StepCoefficients,
    /// `m + k_inf dt^2/4 + sum(B)`.
    effective_mass: f64,
    /// `k_inf dt + sum(k theta_hat)`.
    velocity_stiffness: f64,
    /// `k_inf dt^2/4 + sum(B)`.
    acceleration_stiffness: f64,
}

impl<'a> NewmarkStepper<'a> {
    pub fn new(problem: &'a SdofProblem, dt: f64) -> Result<Self, SdofError> {
        let coeffs = problem.chain.step_coefficients(dt)?;
        Ok(Self::with_coefficients(problem, coeffs))
    }

    pub fn with_coefficients(problem: &'a SdofProblem, coeffs: StepCoefficients) -> Self {
        let dt = coeffs.dt;
        let k_inf = problem.chain.long_term_stiffness();
        let acceleration_stiffness = 0.25 * k_inf * dt * dt + coeffs.sum_acceleration_factor;
        Self {
            problem,
            effective_mass: problem.mass + acceleration_stiffness,
            velocity_stiffness: k_inf * dt + coeffs.sum_velocity_gain,
            acceleration_stiffness,
            coeffs,
        }
    }

    pub fn coefficients(&self) -> &StepCoefficients {
        &self.coeffs
    }

    pub fn step(&self, state: &SdofState) -> SdofState {
        let dt = self.coeffs.dt;
        let k_inf = self.problem.chain.long_term_stiffness();
        let t_next = state.time + dt;

        let decayed: f64 = self
            .coeffs
            .cells
            .iter()
            .zip(&state.cell_forces)
            .map(|(c, f)| c.decay_factor * f)
            .sum();
        let rhs = self.problem.load.value(t_next)
            - decayed
            - k_inf * state.displacement
            - self.velocity_stiffness * state.velocity
            - self.acceleration_stiffness * state.acceleration;
        let a_next = rhs / self.effective_mass;

        let a_sum = state.acceleration + a_next;
        let cell_forces = self
            .coeffs
            .cells
            .iter()
            .zip(&state.cell_forces)
            .map(|(c, &f)| c.advance(f, state.velocity, a_sum))
            .collect();
        SdofState {
            time: t_next,
            displacement: state.displacement + state.velocity * dt + 0.25 * a_sum * dt * dt,
            velocity: state.velocity + 0.5 * a_sum * dt,
            acceleration: a_next,
            cell_forces,
        }
    }
}

/// One Newmark step. Prefer [`NewmarkStepper`] in loops; this recomputes
/// the step-invariant sums on every call.
pub fn newmark_step(state: &SdofState, coeffs: &StepCoefficients, problem: &SdofProblem) -> SdofState {
    NewmarkStepper::with_coefficients(problem, coeffs.clone()).step(state)
}

/// Integrates `N = round(t_max / dt)` steps from the initial conditions.
pub fn integrate(problem: &SdofProblem, dt: f64, t_max: f64) -> Result<Trajectory, SdofError> {
    let steps = step_count(dt, t_max)?;
    let stepper = NewmarkStepper::new(problem, dt)?;
    let mut states = Vec::with_capacity(steps + 1);
    let first = problem.initial_state();
    if !first.is_finite() {
        return Err(SdofError::NonFinite { step: 0 });
    }
    states.push(first);
    for i in 1..=steps {
        let mut next = stepper.step(&states[i - 1]);
        // keep t_i = i * dt without accumulated round-off
        next.time = i as f64 * dt;
        if !next.is_finite() {
            return Err(SdofError::NonFinite { step: i });
        }
        states.push(next);
    }
    Ok(Trajectory { dt, states })
}

pub(crate) fn step_count(dt: f64, t_max: f64) -> Result<usize, SdofError> {
    if !(dt.is_finite() && dt > 0.0 && t_max.is_finite() && t_max >= dt) {
        return Err(SdofError::InvalidTimeGrid { dt, t_max });
    }
    Ok(libm::round(t_max / dt) as usize)
}
