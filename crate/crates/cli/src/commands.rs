//! The subcommands. Each returns a [`Summary`] after writing its files.

use std::fmt;
use std::path::{Path, PathBuf};

use maxwell_newmark::fem::{assemble, run_fem, Assembly, Face, FemRun, FemRunOptions};
use maxwell_newmark::{
    dissipation_report, integrate, ledger, solve_exact, DissipationRow, EnergyLedger, SdofProblem, Trajectory,
};

use crate::error::CliError;
use crate::output::{self, num};
use crate::scenario::{read_chain, FemScenario, Scenario, ScenarioKind, SdofScenario, Solver};

/// Command-line values that replace the scenario's own.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub chain: Option<PathBuf>,
    pub solver: Option<Solver>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub dt_list: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

/// Ordered `key = value` results with a human-readable label each.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub title: String,
    items: Vec<(String, String, String)>,
}

impl Summary {
    fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            items: Vec::new(),
        }
    }

    fn push(&mut self, key: &str, label: &str, value: impl fmt::Display) {
        self.items.push((key.to_owned(), label.to_owned(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.items.iter().find(|(k, _, _)| k == key).map(|(_, _, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        let width = self.items.iter().map(|(_, l, _)| l.len()).max().unwrap_or(0);
        for (_, label, value) in &self.items {
            writeln!(f, "  {label:<width$}  {value}")?;
        }
        for (key, _, value) in &self.items {
            writeln!(f, "{key}={value}")?;
        }
        Ok(())
    }
}

pub struct SdofSetup {
    pub scenario: SdofScenario,
    pub problem: SdofProblem,
    pub out: PathBuf,
}

pub struct FemSetup {
    pub scenario: FemScenario,
    pub assembly: Assembly,
    pub out: PathBuf,
    pub density_defaulted: bool,
}

fn output_dir(scenario: &Scenario, configured: Option<&Path>, flag: Option<&Path>) -> PathBuf {
    match (flag, configured) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) => scenario.resolve(dir),
        (None, None) => Path::new("out").join(scenario.name()),
    }
}

impl SdofSetup {
    pub fn new(scenario: &Scenario, over: &Overrides) -> Result<Self, CliError> {
        let ScenarioKind::Sdof(s) = &scenario.kind else {
            return Err(CliError::Unsupported(format!(
                "{} is not an sdof scenario",
                scenario.path.display()
            )));
        };
        let mut s = s.clone();
        let chain_path = match &over.chain {
            Some(p) => p.clone(),
            None => scenario.resolve(&s.chain_file),
        };
        if let Some(solver) = over.solver {
            s.solver = solver;
        }
        if let Some(dt) = over.dt {
            s.dt_s = dt;
        }
        if let Some(t) = over.t_max {
            s.t_max_s = t;
        }
        if let Some(list) = &over.dt_list {
            s.dt_list_s = list.clone();
        }
        let chain = read_chain(&chain_path, s.modulus_scale)?;
        let problem = s.problem(chain)?;
        let out = output_dir(scenario, s.output_dir.as_deref(), over.out.as_deref());
        Ok(Self { scenario: s, problem, out })
    }

    fn dt_list(&self) -> Vec<f64> {
        if self.scenario.dt_list_s.is_empty() {
            vec![self.scenario.dt_s]
        } else {
            self.scenario.dt_list_s.clone()
        }
    }

    pub fn trajectory(&self, solver: Solver, dt: f64) -> Result<Trajectory, CliError> {
        let t_max = self.scenario.t_max_s;
        Ok(match solver {
            Solver::Newmark => integrate(&self.problem, dt, t_max)?,
            Solver::Exact => solve_exact(&self.problem, dt, t_max)?,
        })
    }
}

/// Largest discrete equilibrium residual, each relative to the largest
/// force term at its node.
pub fn equilibrium_defect(problem: &SdofProblem, traj: &Trajectory) -> f64 {
    let k = problem.chain().long_term_stiffness();
    traj.states
        .iter()
        .map(|s| {
            let scale = s
                .cell_forces
                .iter()
                .map(|f| f.abs())
                .chain([
                    (problem.mass() * s.acceleration).abs(),
                    (k * s.displacement).abs(),
                    problem.load().value(s.time).abs(),
                ])
                .fold(f64::MIN_POSITIVE, f64::max);
            problem.equilibrium_residual(s).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Largest defect of `(r_{i+1} - 2 r_i + r_{i-1}) / dt^2 = (a_{i-1} + 2 a_i + a_{i+1}) / 4`
/// relative to the largest acceleration.
pub fn midpoint_defect(traj: &Trajectory) -> f64 {
    let s = &traj.states;
    if s.len() < 3 {
        return 0.0;
    }
    let dt = traj.dt;
    let scale = s.iter().map(|x| x.acceleration.abs()).fold(f64::MIN_POSITIVE, f64::max);
    (1..s.len() - 1)
        .map(|i| {
            let lhs = (s[i + 1].displacement - 2.0 * s[i].displacement + s[i - 1].displacement) / (dt * dt);
            let rhs = 0.25 * (s[i - 1].acceleration + 2.0 * s[i].acceleration + s[i + 1].acceleration);
            (lhs - rhs).abs() / scale
        })
        .fold(0.0, f64::max)
}

pub struct SdofOutcome {
    pub trajectory: Trajectory,
    pub ledger: EnergyLedger,
    pub summary: Summary,
}

pub fn simulate_sdof(setup: &SdofSetup) -> Result<SdofOutcome, CliError> {
    let s = &setup.scenario;
    let traj = setup.trajectory(s.solver, s.dt_s)?;
    let led = ledger(&traj, setup.problem.chain(), setup.problem.mass(), setup.problem.load())?;
    output::write_trajectory(&setup.out.join("trajectory.csv"), &traj)?;
    output::write_energy(&setup.out.join("energy.csv"), &led)?;

    let mut sum = Summary::new(format!("simulate-sdof ({} solver)", s.solver.name()));
    let last = traj.last();
    sum.push("solver", "solver", s.solver.name());
    sum.push("steps", "steps", traj.len() - 1);
    sum.push("t_final_s", "final time [s]", num(last.time));
    sum.push("r_final_m", "final displacement [m]", num(last.displacement));
    match (led.dissipation_ratio(), led.artificial_ratio()) {
        (Some(d), Some(a)) => {
            sum.push("D_over_W", "dissipated / work", num(d));
            sum.push("delta_ratio", "max artificial / final work", num(a));
        }
        _ => {
            sum.push("D_over_W", "dissipated / work", "undefined");
            sum.push("delta_ratio", "max artificial / final work", "undefined");
        }
    }
    if s.solver == Solver::Newmark {
        sum.push("equilibrium_defect", "max equilibrium residual (rel)", num(equilibrium_defect(&setup.problem, &traj)));
        sum.push("midpoint_defect", "max midpoint identity residual (rel)", num(midpoint_defect(&traj)));
    }
    sum.push("output_dir", "output directory", setup.out.display());
    Ok(SdofOutcome {
        trajectory: traj,
        ledger: led,
        summary: sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub max_error: f64,
    /// Order against the previous row; `None` for the first.
    pub observed_order: Option<f64>,
}

/// Newmark against the exact solver on the same grid, one row per step size.
pub fn convergence_table(setup: &SdofSetup, dt_list: &[f64]) -> Result<Vec<ConvergenceRow>, CliError> {
    let errors = std::thread::scope(|scope| {
        let handles: Vec<_> = dt_list
            .iter()
            .map(|&dt| {
                scope.spawn(move || -> Result<f64, CliError> {
                    let ours = setup.trajectory(Solver::Newmark, dt)?;
                    let exact = setup.trajectory(Solver::Exact, dt)?;
                    Ok(ours
                        .states
                        .iter()
                        .zip(&exact.states)
                        .map(|(a, b)| (a.displacement - b.displacement).abs())
                        .fold(0.0, f64::max))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(dt_list
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&dt, &max_error))| ConvergenceRow {
            dt,
            max_error,
            observed_order: (i > 0).then(|| (errors[i - 1] / max_error).ln() / (dt_list[i - 1] / dt).ln()),
        })
        .collect())
}

pub fn converge(setup: &SdofSetup) -> Result<(Vec<ConvergenceRow>, Summary), CliError> {
    if matches!(setup.scenario.load, crate::scenario::SdofLoad::Tabulated { .. }) {
        return Err(CliError::Unsupported("converge needs a step or harmonic load".to_owned()));
    }
    let list = setup.dt_list();
    let rows = convergence_table(setup, &list)?;
    let csv_rows = rows.iter().map(|r| {
        vec![
            num(r.dt),
            num(r.max_error),
            r.observed_order.map(num).unwrap_or_default(),
        ]
    });
    output::write_csv(&setup.out.join("convergence.csv"), "dt,max_error,observed_order", csv_rows)?;

    let mut sum = Summary::new("converge (newmark vs exact)");
    sum.push("rows", "step sizes", rows.len());
    for r in &rows {
        let order = r.observed_order.map(|o| format!("{o:.4}")).unwrap_or_else(|| "-".to_owned());
        sum.push(
            &format!("error_dt_{}", r.dt),
            &format!("max error at dt = {} s (order {order})", r.dt),
            num(r.max_error),
        );
    }
    let orders: Vec<f64> = rows.iter().filter_map(|r| r.observed_order).collect();
    if let (Some(lo), Some(hi)) = (
        orders.iter().cloned().reduce(f64::min),
        orders.iter().cloned().reduce(f64::max),
    ) {
        sum.push("order_min", "smallest observed order", format!("{lo:.6}"));
        sum.push("order_max", "largest observed order", format!("{hi:.6}"));
    }
    if rows.len() >= 2 {
        sum.push("order_fit", "least-squares order", format!("{:.6}", fitted_order(&rows)));
    }
    sum.push("output_dir", "output directory", setup.out.display());
    Ok((rows, sum))
}

/// Slope of `ln(error)` against `ln(dt)`.
pub fn fitted_order(rows: &[ConvergenceRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.dt.ln(), r.max_error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub fn energy_report(setup: &SdofSetup) -> Result<(Vec<DissipationRow>, Summary), CliError> {
    let list = setup.dt_list();
    let rows = dissipation_report(&setup.problem, &list, setup.scenario.t_max_s)?;
    output::write_report(&setup.out.join("report.csv"), &rows)?;
    let mut sum = Summary::new("energy-report (newmark)");
    for r in &rows {
        let (d, a) = if r.defined {
            (num(r.dissipation_ratio), num(r.artificial_ratio))
        } else {
            ("undefined".to_owned(), "undefined".to_owned())
        };
        sum.push(&format!("D_over_W_dt_{}", r.dt), &format!("dissipated / work at dt = {} s", r.dt), d);
        sum.push(&format!("delta_ratio_dt_{}", r.dt), &format!("max artificial / work at dt = {} s", r.dt), a);
    }
    sum.push("output_dir", "output directory", setup.out.display());
    Ok((rows, sum))
}

impl FemSetup {
    pub fn new(scenario: &Scenario, over: &Overrides) -> Result<Self, CliError> {
        let ScenarioKind::Fem(f) = &scenario.kind else {
            return Err(CliError::Unsupported(format!(
                "{} is not a fem scenario",
                scenario.path.display()
            )));
        };
        if over.solver == Some(Solver::Exact) {
            return Err(CliError::Unsupported("the exact solver is available for sdof scenarios only".to_owned()));
        }
        let mut f = f.clone();
        let chain_path = match &over.chain {
            Some(p) => p.clone(),
            None => scenario.resolve(&f.chain_file),
        };
        if let Some(dt) = over.dt {
            f.dt_s = dt;
        }
        if let Some(t) = over.t_max {
            f.t_max_s = t;
        }
        let chain = read_chain(&chain_path, f.modulus_scale)?;
        let model = f.model(chain)?;
        let assembly = assemble(&model)?;
        let out = output_dir(scenario, f.output_dir.as_deref(), over.out.as_deref());
        Ok(Self {
            density_defaulted: f.density_kg_m3.is_none(),
            scenario: f,
            assembly,
            out,
        })
    }

    /// Face whose mean displacement is tracked: the loaded one, else the top.
    pub fn tracked_face(&self) -> Face {
        self.assembly.model.traction.as_ref().map_or(Face::ZMax, |t| t.face)
    }
}

pub struct FemOutcome {
    pub run: FemRun,
    pub probes: Vec<usize>,
    pub summary: Summary,
}

/// Largest deviation of any Gauss-point total stress from the mean over
/// all Gauss points, relative to the largest mean component.
pub fn stress_spread(assembly: &Assembly, run: &FemRun) -> f64 {
    let state = &run.final_state;
    let elements = assembly.model.grid.element_count();
    let mut all = Vec::with_capacity(elements * 8);
    for e in 0..elements {
        for q in 0..8 {
            all.push(assembly.total_stress(state, e, q));
        }
    }
    let mut mean = [0.0; 6];
    for s in &all {
        for c in 0..6 {
            mean[c] += s[c] / all.len() as f64;
        }
    }
    let scale = mean.iter().map(|m| m.abs()).fold(f64::MIN_POSITIVE, f64::max);
    let worst = all
        .iter()
        .flat_map(|s| (0..6).map(move |c| (s[c] - mean[c]).abs()))
        .fold(0.0, f64::max);
    worst / scale
}

pub fn simulate_fem(setup: &FemSetup) -> Result<FemOutcome, CliError> {
    let f = &setup.scenario;
    let grid = setup.assembly.model.grid;
    let probes = f.probes(&grid);
    let face = setup.tracked_face();
    let options = FemRunOptions {
        probes: probes.clone(),
        mean_nodes: grid.face_nodes(face),
        snapshot_every: f.snapshot_every,
        check_equilibrium: true,
    };
    let run = run_fem(&setup.assembly, f.dt_s, f.t_max_s, &options)?;

    for (k, node) in probes.iter().enumerate() {
        output::write_probe(&setup.out.join(format!("probe_{node}.csv")), &run.times, &probe_series(&run, k))?;
    }
    output::write_probe(&setup.out.join("face_mean.csv"), &run.times, &run.mean_history)?;
    let ke_rows = run.times.iter().zip(&run.kinetic_energy).map(|(&t, &k)| vec![num(t), num(k)]);
    output::write_csv(&setup.out.join("kinetic_energy.csv"), "t,E_kin", ke_rows)?;
    for snap in &run.snapshots {
        output::write_vtk(&setup.out.join(format!("snapshot_{:06}.vtk", snap.step)), &grid, snap)?;
    }

    let mut sum = Summary::new("simulate-fem");
    let n = run.times.len();
    let last_mean = run.mean_history.last().copied().unwrap_or([0.0; 3]);
    let peak = run.mean_history.iter().map(norm).fold(0.0, f64::max);
    sum.push("elements", "elements", grid.element_count());
    sum.push("dofs", "degrees of freedom", grid.dof_count());
    sum.push("free_dofs", "free degrees of freedom", setup.assembly.free.len());
    sum.push("density_kg_m3", "density [kg/m^3]", num(f.density()));
    sum.push("steps", "steps", n.saturating_sub(1));
    sum.push("t_final_s", "final time [s]", num(run.times.last().copied().unwrap_or(0.0)));
    sum.push("face_mean_uz_final_m", "final loaded-face mean uz [m]", num(last_mean[2]));
    sum.push("face_mean_peak_m", "peak loaded-face mean |u| [m]", num(peak));
    if setup.assembly.model.traction.is_some() {
        let t_end = run.times.last().copied().unwrap_or(0.0);
        let stat = setup.assembly.static_displacement(t_end)?;
        let nodes = grid.face_nodes(face);
        let static_mean = nodes.iter().map(|&nd| stat[3 * nd + 2]).sum::<f64>() / nodes.len() as f64;
        sum.push("face_mean_uz_static_m", "long-term static loaded-face mean uz [m]", num(static_mean));
    }
    let quarter = (n / 4).max(1);
    let window_peak = |w: &[f64]| w.iter().cloned().fold(0.0, f64::max);
    sum.push("kinetic_peak_first_quarter_j", "peak kinetic energy, first quarter [J]", num(window_peak(&run.kinetic_energy[..quarter.min(n)])));
    sum.push("kinetic_peak_last_quarter_j", "peak kinetic energy, last quarter [J]", num(window_peak(&run.kinetic_energy[n - quarter.min(n)..])));
    sum.push("equilibrium_defect", "max equilibrium residual (rel)", num(run.max_residual));
    sum.push("stress_spread", "final stress non-uniformity (rel)", num(stress_spread(&setup.assembly, &run)));
    for (k, node) in probes.iter().enumerate() {
        let u = run.probe_history.last().map_or([0.0; 3], |p| p[k]);
        sum.push(&format!("probe_{node}_uz_final_m"), &format!("probe {node} final uz [m]"), num(u[2]));
    }
    sum.push("snapshots", "VTK snapshots", run.snapshots.len());
    sum.push("output_dir", "output directory", setup.out.display());
    Ok(FemOutcome { run, probes, summary: sum })
}

/// Displacement history of probe `k`.
pub fn probe_series(run: &FemRun, k: usize) -> Vec<[f64; 3]> {
    run.probe_history.iter().map(|p| p[k]).collect()
}

fn norm(u: &[f64; 3]) -> f64 {
    (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
}
