//! Newmark average-acceleration stepping of the assembled continuum.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::StepCoefficients;
use crate::sdof::step_count;

use super::hex8::{ELEMENT_DOFS, GAUSS_POINTS};
use super::material::update_cell_stresses;
use super::model::{element_dofs, Assembly};
use super::sparse::SkylineCholesky;
use super::FemError;

#[derive(Debug, Clone, PartialEq)]
pub struct FemState {
    pub time: f64,
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
    /// Cell stresses, indexed `(element * 8 + gauss) * P + p`.
    pub stresses: Vec<[f64; 6]>,
    cells: usize,
}

impl FemState {
    pub fn zeros(dofs: usize, elements: usize, cells: usize) -> Self {
        Self {
            time: 0.0,
            displacement: vec![0.0; dofs],
            velocity: vec![0.0; dofs],
            acceleration: vec![0.0; dofs],
            stresses: vec![[0.0; 6]; elements * GAUSS_POINTS * cells],
            cells,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    /// Cell stresses of one Gauss point.
    pub fn gauss_point(&self, element: usize, gauss: usize) -> &[[f64; 6]] {
        let start = (element * GAUSS_POINTS + gauss) * self.cells;
        &self.stresses[start..start + self.cells]
    }

    pub fn is_finite(&self) -> bool {
        self.displacement.iter().all(|x| x.is_finite())
            && self.velocity.iter().all(|x| x.is_finite())
            && self.acceleration.iter().all(|x| x.is_finite())
            && self.stresses.iter().flatten().all(|x| x.is_finite())
    }
}

impl Assembly {
    /// State at rest with the acceleration balancing the load at `t = 0`.
    pub fn initial_state(&self) -> Result<FemState, FemError> {
        let grid = &self.model.grid;
        let state = FemState::zeros(self.dof_count(), grid.element_count(), self.model.chain.len());
        self.with_consistent_acceleration(state)
    }

    /// Replaces the acceleration of `state` by the solution of
    /// `M a = F(t) - G_inf K1 u - int B^T sum sigma_p` on the free DOFs.
    pub fn with_consistent_acceleration(&self, mut state: FemState) -> Result<FemState, FemError> {
        self.check_shape(&state)?;
        let residual = self.static_imbalance(&state);
        let factor = SkylineCholesky::factor(&self.mass, &self.free)?;
        let mut rhs: Vec<f64> = self.free.iter().map(|&d| residual[d]).collect();
        factor.solve_in_place(&mut rhs);
        state.acceleration.fill(0.0);
        for (&d, a) in self.free.iter().zip(&rhs) {
            state.acceleration[d] = *a;
        }
        Ok(state)
    }

    fn check_shape(&self, state: &FemState) -> Result<(), FemError> {
        let n = self.dof_count();
        let gp = self.model.grid.element_count() * GAUSS_POINTS;
        let p = self.model.chain.len();
        if state.displacement.len() != n
            || state.velocity.len() != n
            || state.acceleration.len() != n
            || state.cells != p
            || state.stresses.len() != gp * p
        {
            return Err(FemError::StateShape);
        }
        Ok(())
    }

    /// `F(t) - G_inf K1 u - int B^T sum sigma_p`
    fn static_imbalance(&self, state: &FemState) -> Vec<f64> {
        let g = self.model.chain.long_term_stiffness();
        let ku = self.stiffness.mul_vec(&state.displacement);
        let div = self.stress_divergence(&state.stresses, None);
        let mut f = self.external_force(state.time);
        for ((fi, k), s) in f.iter_mut().zip(&ku).zip(&div) {
            *fi -= g * k + s;
        }
        f
    }

    /// `int B^T sum_p w_p sigma_p` with weights `w_p` (all ones if `None`).
    pub fn stress_divergence(&self, stresses: &[[f64; 6]], weights: Option<&[f64]>) -> Vec<f64> {
        let grid = &self.model.grid;
        let p = self.model.chain.len();
        let mut out = vec![0.0; self.dof_count()];
        if p == 0 {
            return out;
        }
        for e in 0..grid.element_count() {
            let mut fe = [0.0; ELEMENT_DOFS];
            for (q, gp) in self.element.gauss.iter().enumerate() {
                let start = (e * GAUSS_POINTS + q) * p;
                let mut s = [0.0; 6];
                for (k, sigma) in stresses[start..start + p].iter().enumerate() {
                    let w = weights.map_or(1.0, |w| w[k]);
                    for c in 0..6 {
                        s[c] += w * sigma[c];
                    }
                }
                gp.add_divergence(&s, &mut fe);
            }
            for (d, v) in element_dofs(grid, e).iter().zip(fe) {
                out[*d] += v;
            }
        }
        out
    }

    /// Discrete equilibrium `M a + G_inf K1 u + int B^T sum sigma_p - F(t)`
    /// on the free DOFs, in the max norm, relative to the largest of the
    /// load, inertia and internal force norms.
    pub fn equilibrium_residual(&self, state: &FemState) -> f64 {
        let ma = self.mass.mul_vec(&state.acceleration);
        let imbalance = self.static_imbalance(state);
        let f = self.external_force(state.time);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &d in &self.free {
            worst = worst.max((ma[d] - imbalance[d]).abs());
            scale = scale.max(f[d].abs()).max(ma[d].abs()).max((f[d] - imbalance[d]).abs());
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }

    pub fn kinetic_energy(&self, state: &FemState) -> f64 {
        let mv = self.mass.mul_vec(&state.velocity);
        0.5 * mv.iter().zip(&state.velocity).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Total stress `G_inf D B u + sum sigma_p` at one Gauss point.
    pub fn total_stress(&self, state: &FemState, element: usize, gauss: usize) -> [f64; 6] {
        let ue = self.element_vector(&state.displacement, element);
        let eps = self.element.gauss[gauss].strain_of(&ue);
        let mut s = self.model.dnu.apply(&eps);
        let g = self.model.chain.long_term_stiffness();
        for c in s.iter_mut() {
            *c *= g;
        }
        for sigma in state.gauss_point(element, gauss) {
            for c in 0..6 {
                s[c] += sigma[c];
            }
        }
        s
    }

    /// Gauss-point average of the total stress in each element.
    pub fn element_stresses(&self, state: &FemState) -> Vec<[f64; 6]> {
        (0..self.model.grid.element_count())
            .map(|e| {
                let mut mean = [0.0; 6];
                for q in 0..GAUSS_POINTS {
                    let s = self.total_stress(state, e, q);
                    for c in 0..6 {
                        mean[c] += s[c] / GAUSS_POINTS as f64;
                    }
                }
                mean
            })
            .collect()
    }
}

/// One-step map for a fixed `dt`, holding the factored effective matrix.
pub struct FemIntegrator<'a> {
    assembly: &'a Assembly,
    coeffs: StepCoefficients,
    factor: SkylineCholesky,
    accel_stiffness: f64,
    velocity_stiffness: f64,
}

impl<'a> FemIntegrator<'a> {
    pub fn new(assembly: &'a Assembly, dt: f64) -> Result<Self, FemError> {
        let chain = &assembly.model.chain;
        let coeffs = chain.step_coefficients(dt)?;
        let g = chain.long_term_stiffness();
        let accel_stiffness = 0.25 * g * dt * dt + coeffs.sum_acceleration_factor;
        let velocity_stiffness = g * dt + coeffs.sum_velocity_gain;
        let effective = assembly.mass.combine(1.0, &assembly.stiffness, accel_stiffness);
        let factor = SkylineCholesky::factor(&effective, &assembly.free)?;
        Ok(Self {
            assembly,
            coeffs,
            factor,
            accel_stiffness,
            velocity_stiffness,
        })
    }

    pub fn coefficients(&self) -> &StepCoefficients {
        &self.coeffs
    }

    pub fn step(&self, state: &FemState) -> FemState {
        let asm = self.assembly;
        let dt = self.coeffs.dt;
        let t1 = state.time + dt;
        let g = asm.model.chain.long_term_stiffness();
        let n = asm.dof_count();

        let mut w = vec![0.0; n];
        for d in 0..n {
            w[d] = g * state.displacement[d]
                + self.velocity_stiffness * state.velocity[d]
                + self.accel_stiffness * state.acceleration[d];
        }
        let kw = asm.stiffness.mul_vec(&w);
        let decays: Vec<f64> = self.coeffs.cells.iter().map(|c| c.decay_factor).collect();
        let div = asm.stress_divergence(&state.stresses, Some(&decays));
        let f = asm.external_force(t1);
        let mut rhs: Vec<f64> = asm.free.iter().map(|&d| f[d] - kw[d] - div[d]).collect();
        self.factor.solve_in_place(&mut rhs);

        let mut next = FemState {
            time: t1,
            displacement: state.displacement.clone(),
            velocity: state.velocity.clone(),
            acceleration: vec![0.0; n],
            stresses: state.stresses.clone(),
            cells: state.cells,
        };
        for (&d, a) in asm.free.iter().zip(&rhs) {
            next.acceleration[d] = *a;
        }
        let mut accel_sum = vec![0.0; n];
        for d in 0..n {
            let s = state.acceleration[d] + next.acceleration[d];
            accel_sum[d] = s;
            next.displacement[d] += dt * state.velocity[d] + 0.25 * dt * dt * s;
            next.velocity[d] += 0.5 * dt * s;
        }
        self.update_stresses(&mut next.stresses, &state.velocity, &accel_sum);
        next
    }

    fn update_stresses(&self, stresses: &mut [[f64; 6]], velocity: &[f64], accel_sum: &[f64]) {
        let asm = self.assembly;
        let p = self.coeffs.cells.len();
        if p == 0 {
            return;
        }
        let dnu = &asm.model.dnu;
        for e in 0..asm.model.grid.element_count() {
            let ve = asm.element_vector(velocity, e);
            let ae = asm.element_vector(accel_sum, e);
            for (q, gp) in asm.element.gauss.iter().enumerate() {
                let rate = dnu.apply(&gp.strain_of(&ve));
                let acc = dnu.apply(&gp.strain_of(&ae));
                let start = (e * GAUSS_POINTS + q) * p;
                update_cell_stresses(&mut stresses[start..start + p], &self.coeffs, &rate, &acc);
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FemRunOptions {
    /// Nodes whose displacement is recorded every step.
    pub probes: Vec<usize>,
    /// Nodes whose mean displacement is recorded every step.
    pub mean_nodes: Vec<usize>,
    /// Keep a snapshot every this many steps (step 0 included).
    pub snapshot_every: Option<usize>,
    /// Evaluate the equilibrium residual at every node.
    pub check_equilibrium: bool,
}

#[derive(Debug, Clone)]
pub struct FemSnapshot {
    pub step: usize,
    pub time: f64,
    pub displacement: Vec<f64>,
    pub element_stress: Vec<[f64; 6]>,
}

#[derive(Debug, Clone)]
pub struct FemRun {
    pub times: Vec<f64>,
    /// `probe_history[i][k]` is the displacement of probe `k` at `times[i]`.
    pub probe_history: Vec<Vec<[f64; 3]>>,
    pub mean_history: Vec<[f64; 3]>,
    pub kinetic_energy: Vec<f64>,
    pub max_residual: f64,
    pub snapshots: Vec<FemSnapshot>,
    pub final_state: FemState,
}

pub fn run_fem(assembly: &Assembly, dt: f64, t_max: f64, options: &FemRunOptions) -> Result<FemRun, FemError> {
    let steps = step_count(dt, t_max).map_err(|_| FemError::InvalidTimeGrid { dt, t_max })?;
    let nodes = assembly.model.grid.node_count();
    if let Some(&node) = options.probes.iter().chain(&options.mean_nodes).find(|&&n| n >= nodes) {
        return Err(FemError::ProbeOutOfRange { node });
    }
    let integrator = FemIntegrator::new(assembly, dt)?;
    let mut state = assembly.initial_state()?;
    let mut run = FemRun {
        times: Vec::with_capacity(steps + 1),
        probe_history: Vec::with_capacity(steps + 1),
        mean_history: Vec::with_capacity(steps + 1),
        kinetic_energy: Vec::with_capacity(steps + 1),
        max_residual: 0.0,
        snapshots: Vec::new(),
        final_state: state.clone(),
    };
    for i in 0..=steps {
        if i > 0 {
            state = integrator.step(&state);
            state.time = i as f64 * dt;
            if !state.is_finite() {
                return Err(FemError::NonFinite { step: i });
            }
        }
        record(assembly, &state, i, options, &mut run);
    }
    run.final_state = state;
    Ok(run)
}

fn record(asm: &Assembly, state: &FemState, step: usize, options: &FemRunOptions, run: &mut FemRun) {
    let u = &state.displacement;
    let at = |n: usize| [u[3 * n], u[3 * n + 1], u[3 * n + 2]];
    run.times.push(state.time);
    run.probe_history.push(options.probes.iter().map(|&n| at(n)).collect());
    let mut mean = [0.0; 3];
    if !options.mean_nodes.is_empty() {
        for &n in &options.mean_nodes {
            let x = at(n);
            for d in 0..3 {
                mean[d] += x[d];
            }
        }
        for m in mean.iter_mut() {
            *m /= options.mean_nodes.len() as f64;
        }
    }
    run.mean_history.push(mean);
    run.kinetic_energy.push(asm.kinetic_energy(state));
    if options.check_equilibrium {
        run.max_residual = run.max_residual.max(asm.equilibrium_residual(state));
    }
    if let Some(every) = options.snapshot_every {
        if every > 0 && step.is_multiple_of(every) {
            run.snapshots.push(FemSnapshot {
                step,
                time: state.time,
                displacement: u.clone(),
                element_stress: asm.element_stresses(state),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::MaxwellChain;
    use crate::fem::{assemble, BoundaryCondition, BoxGrid, Face, FemModel, Traction};
    use crate::load::LoadSignal;

    fn model(chain: MaxwellChain, boundary: BoundaryCondition, cells: usize, load: f64) -> FemModel {
        let grid = BoxGrid::new([cells; 3], [1.0; 3]).unwrap();
        let traction = Traction {
            face: Face::ZMax,
            vector: [0.0, 0.0, -1.0],
            profile: LoadSignal::Step { amplitude: load },
        };
        FemModel::new(grid, 1.0, 0.3, chain, boundary, Some(traction)).unwrap()
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 0.1), (1.0, 3.0)]).unwrap();
        let a = assemble(&model(chain, BoundaryCondition::FixBottom, 2, 0.0)).unwrap();
        let run = run_fem(&a, 0.05, 1.0, &FemRunOptions::default()).unwrap();
        let s = &run.final_state;
        assert!(s.displacement.iter().chain(&s.velocity).chain(&s.acceleration).all(|&x| x == 0.0));
        assert!(s.stresses.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn equilibrium_holds_every_step() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 0.1), (1.0, 3.0)]).unwrap();
        let a = assemble(&model(chain, BoundaryCondition::FixBottom, 2, 1.0)).unwrap();
        let opts = FemRunOptions {
            check_equilibrium: true,
            ..Default::default()
        };
        let run = run_fem(&a, 0.05, 2.0, &opts).unwrap();
        assert!(run.max_residual < 1e-10, "{}", run.max_residual);
    }

    #[test]
    fn fixed_dofs_stay_zero() {
        let chain = MaxwellChain::from_pairs(1.0, &[(2.0, 0.1)]).unwrap();
        let m = model(chain, BoundaryCondition::PatchRollers, 2, 1.0);
        let fixed = m.fixed_dofs();
        let a = assemble(&m).unwrap();
        let run = run_fem(&a, 0.1, 1.0, &FemRunOptions::default()).unwrap();
        for (d, &f) in fixed.iter().enumerate() {
            if f {
                assert_eq!(run.final_state.displacement[d], 0.0);
                assert_eq!(run.final_state.velocity[d], 0.0);
            }
        }
    }

    #[test]
    fn elastic_response_oscillates_about_static() {
        let chain = MaxwellChain::elastic(1.0).unwrap();
        let a = assemble(&model(chain, BoundaryCondition::FixBottom, 2, 1.0)).unwrap();
        let top = a.model.grid.node_index(1, 1, 2);
        let u_static = a.static_displacement(0.0).unwrap()[3 * top + 2];
        let opts = FemRunOptions {
            probes: vec![top],
            ..Default::default()
        };
        let dt = 0.01;
        let run = run_fem(&a, dt, 100.0, &opts).unwrap();
        let mean = run.probe_history.iter().map(|p| p[0][2]).sum::<f64>() / run.times.len() as f64;
        assert!((mean - u_static).abs() < 0.02 * u_static.abs(), "{mean} vs {u_static}");
        // Undamped: the energy is conserved, so the peak overshoots the static value.
        let min = run.probe_history.iter().map(|p| p[0][2]).fold(f64::INFINITY, f64::min);
        assert!(min < 1.5 * u_static);
    }

    #[test]
    fn snapshots_and_probe_checks() {
        let chain = MaxwellChain::elastic(1.0).unwrap();
        let a = assemble(&model(chain, BoundaryCondition::FixBottom, 1, 1.0)).unwrap();
        let opts = FemRunOptions {
            probes: vec![7],
            snapshot_every: Some(5),
            ..Default::default()
        };
        let run = run_fem(&a, 0.1, 1.0, &opts).unwrap();
        assert_eq!(run.snapshots.iter().map(|s| s.step).collect::<Vec<_>>(), vec![0, 5, 10]);
        assert_eq!(run.snapshots[0].element_stress.len(), 1);
        let bad = FemRunOptions {
            probes: vec![8],
            ..Default::default()
        };
        assert_eq!(run_fem(&a, 0.1, 1.0, &bad).unwrap_err(), FemError::ProbeOutOfRange { node: 8 });
        assert!(matches!(
            run_fem(&a, -0.1, 1.0, &FemRunOptions::default()),
            Err(FemError::InvalidTimeGrid { .. })
        ));
    }
}
