//! Time-discrete energy balance along a trajectory.
//!
//! Dissipation and external work are trapezoidal sums over the stored
//! nodes; the cell forces stand in for the multipliers of the variational
//! form. Whatever the balance misses is the artificial dissipation of the
//! time discretization.

use alloc::vec::Vec;
use core::fmt;

use crate::chain::MaxwellChain;
use crate::load::LoadSignal;
use crate::sdof::{integrate, SdofError, SdofProblem, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub enum EnergyError {
    CellCountMismatch { chain: usize, state: usize, node: usize },
    Integration(SdofError),
}

impl fmt::Display for EnergyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyError::CellCountMismatch { chain, state, node } => write!(
                f,
                "node {node} carries {state} cell forces but the chain has {chain} cells"
            ),
            EnergyError::Integration(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EnergyError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEntry {
    pub time: f64,
    /// Kinetic energy plus the energy stored in all springs.
    pub internal: f64,
    /// Cumulative viscous dissipation.
    pub dissipated: f64,
    /// Cumulative external work.
    pub work: f64,
    /// `|E(0) + W - E - D|`.
    pub artificial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub entries: Vec<EnergyEntry>,
}

impl EnergyLedger {
    pub fn last(&self) -> &EnergyEntry {
        self.entries.last().expect("ledger has at least one entry")
    }

    /// `D / W` at the final node, or `None` when no work was done.
    pub fn dissipation_ratio(&self) -> Option<f64> {
        let last = self.last();
        (last.work != 0.0).then(|| last.dissipated / last.work)
    }

    /// `max_i Delta_i / W_N`, or `None` when no work was done.
    pub fn artificial_ratio(&self) -> Option<f64> {
        let work = self.last().work;
        let worst = self.entries.iter().map(|e| e.artificial).fold(0.0, f64::max);
        (work != 0.0).then(|| worst / work)
    }
}

/// Builds the ledger. Interval lengths come from the node times, so a
/// repeated node contributes nothing.
pub fn ledger(trajectory: &Trajectory, chain: &MaxwellChain, mass: f64, load: &LoadSignal) -> Result<EnergyLedger, EnergyError> {
    let cells = chain.cells();
    for (node, s) in trajectory.states.iter().enumerate() {
        if s.cell_forces.len() != cells.len() {
            return Err(EnergyError::CellCountMismatch {
                chain: cells.len(),
                state: s.cell_forces.len(),
                node,
            });
        }
    }
    let k_inf = chain.long_term_stiffness();
    let internal = |i: usize| {
        let s = &trajectory.states[i];
        let springs: f64 = cells
            .iter()
            .zip(&s.cell_forces)
            .map(|(c, f)| f * f / (2.0 * c.stiffness()))
            .sum();
        0.5 * mass * s.velocity * s.velocity + 0.5 * k_inf * s.displacement * s.displacement + springs
    };
    // f^2 / eta, the dissipation rate
    let dissipation_rate = |i: usize| -> f64 {
        cells
            .iter()
            .zip(&trajectory.states[i].cell_forces)
            .map(|(c, f)| f * f / c.viscosity())
            .sum()
    };
    let power = |i: usize| {
        let s = &trajectory.states[i];
        load.value(s.time) * s.velocity
    };

    let mut entries = Vec::with_capacity(trajectory.len());
    let Some(first) = trajectory.states.first() else {
        return Ok(EnergyLedger { entries });
    };
    let e0 = internal(0);
    entries.push(EnergyEntry {
        time: first.time,
        internal: e0,
        dissipated: 0.0,
        work: 0.0,
        artificial: 0.0,
    });
    let (mut dissipated, mut work) = (0.0, 0.0);
    let (mut rate_prev, mut power_prev) = (dissipation_rate(0), power(0));
    for i in 1..trajectory.len() {
        let h = trajectory.states[i].time - trajectory.states[i - 1].time;
        let (rate, pow) = (dissipation_rate(i), power(i));
        dissipated += 0.5 * (rate_prev + rate) * h;
        work += 0.5 * (power_prev + pow) * h;
        rate_prev = rate;
        power_prev = pow;
        let e = internal(i);
        entries.push(EnergyEntry {
            time: trajectory.states[i].time,
            internal: e,
            dissipated,
            work,
            artificial: (e0 + work - e - dissipated).abs(),
        });
    }
    Ok(EnergyLedger { entries })
}

/// One row of [`dissipation_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationRow {
    pub dt: f64,
    /// `max_i Delta_i / W_N`; 0 when `W_N = 0`.
    pub artificial_ratio: f64,
    /// `D_N / W_N`; 0 when `W_N = 0`.
    pub dissipation_ratio: f64,
    /// False when `W_N = 0` and the ratios are placeholders.
    pub defined: bool,
}

/// Newmark runs over `dt_list`, each summarised by its normalised
/// artificial dissipation and dissipated fraction of the external work.
pub fn dissipation_report(problem: &SdofProblem, dt_list: &[f64], t_max: f64) -> Result<Vec<DissipationRow>, EnergyError> {
    dt_list
        .iter()
        .map(|&dt| {
            let traj = integrate(problem, dt, t_max).map_err(EnergyError::Integration)?;
            let ledger = ledger(&traj, problem.chain(), problem.mass(), problem.load())?;
            let artificial = ledger.artificial_ratio();
            Ok(DissipationRow {
                dt,
                artificial_ratio: artificial.unwrap_or(0.0),
                dissipation_ratio: ledger.dissipation_ratio().unwrap_or(0.0),
                defined: artificial.is_some(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdof::{InitialConditions, SdofState};
    use alloc::vec;

    #[test]
    fn zero_trajectory_has_zero_ledger() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 3.0)]).unwrap();
        let p = SdofProblem::at_rest(1.0, chain.clone(), LoadSignal::Step { amplitude: 0.0 }).unwrap();
        let traj = integrate(&p, 0.1, 2.0).unwrap();
        let l = ledger(&traj, &chain, 1.0, p.load()).unwrap();
        for e in &l.entries {
            assert_eq!((e.internal, e.dissipated, e.work, e.artificial), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn elastic_free_vibration_conserves() {
        let chain = MaxwellChain::elastic(3.0).unwrap();
        let init = InitialConditions {
            displacement: 1.0,
            velocity: 0.5,
            cell_forces: vec![],
        };
        let p = SdofProblem::new(2.0, chain.clone(), LoadSignal::Step { amplitude: 0.0 }, init).unwrap();
        let traj = integrate(&p, 0.3, 300.0).unwrap();
        let l = ledger(&traj, &chain, 2.0, p.load()).unwrap();
        let e0 = l.entries[0].internal;
        for e in &l.entries {
            assert_eq!(e.dissipated, 0.0);
            assert!(e.artificial <= 1e-10 * e0);
        }
        assert_eq!(l.dissipation_ratio(), None);
    }

    #[test]
    fn mismatch_is_reported() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 3.0)]).unwrap();
        let traj = Trajectory {
            dt: 1.0,
            states: vec![SdofState {
                time: 0.0,
                displacement: 0.0,
                velocity: 0.0,
                acceleration: 0.0,
                cell_forces: vec![],
            }],
        };
        let err = ledger(&traj, &chain, 1.0, &LoadSignal::Step { amplitude: 0.0 }).unwrap_err();
        assert_eq!(err, EnergyError::CellCountMismatch { chain: 1, state: 0, node: 0 });
    }

    #[test]
    fn repeated_node_changes_nothing() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 0.5)]).unwrap();
        let p = SdofProblem::at_rest(1.0, chain.clone(), LoadSignal::Harmonic { amplitude: 1.0, omega: 2.0 }).unwrap();
        let mut traj = integrate(&p, 0.1, 3.0).unwrap();
        let before = ledger(&traj, &chain, 1.0, p.load()).unwrap();
        let dup = traj.last().clone();
        traj.states.push(dup);
        let after = ledger(&traj, &chain, 1.0, p.load()).unwrap();
        assert_eq!(after.entries.len(), before.entries.len() + 1);
        assert_eq!(after.last(), before.last());
    }

    #[test]
    fn free_vibration_report_is_flagged() {
        let chain = MaxwellChain::elastic(1.0).unwrap();
        let init = InitialConditions {
            displacement: 1.0,
            velocity: 0.0,
            cell_forces: vec![],
        };
        let p = SdofProblem::new(1.0, chain, LoadSignal::Step { amplitude: 0.0 }, init).unwrap();
        let rows = dissipation_report(&p, &[0.5, 0.25], 10.0).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert!(!r.defined);
            assert_eq!(r.artificial_ratio, 0.0);
            assert_eq!(r.dissipation_ratio, 0.0);
        }
    }

    #[test]
    fn dissipation_is_non_decreasing() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 0.5), (0.3, 10.0)]).unwrap();
        let p = SdofProblem::at_rest(1.0, chain.clone(), LoadSignal::Harmonic { amplitude: 1.0, omega: 1.3 }).unwrap();
        let traj = integrate(&p, 0.05, 20.0).unwrap();
        let l = ledger(&traj, &chain, 1.0, p.load()).unwrap();
        for w in l.entries.windows(2) {
            assert!(w[1].dissipated >= w[0].dissipated);
            assert!(w[1].internal >= 0.0);
        }
    }
}
