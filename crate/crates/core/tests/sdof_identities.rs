use maxwell_newmark::{
    integrate, ledger, InitialConditions, LoadSignal, MaxwellChain, SdofProblem, Trajectory,
};

fn table_one() -> MaxwellChain {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pvb_table1.prony")).unwrap();
    MaxwellChain::parse(&src).unwrap().scaled(1e3).unwrap()
}

fn table_one_problem(load: LoadSignal) -> SdofProblem {
    SdofProblem::at_rest(1e6, table_one(), load).unwrap()
}

/// Largest equilibrium residual relative to the largest term at that node.
fn max_equilibrium(problem: &SdofProblem, traj: &Trajectory) -> f64 {
    let k = problem.chain().long_term_stiffness();
    traj.states
        .iter()
        .map(|s| {
            let r = problem.equilibrium_residual(s);
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
            r.abs() / scale
        })
        .fold(0.0, f64::max)
}

/// `(r_{i+1} - 2 r_i + r_{i-1}) / dt^2 = (a_{i-1} + 2 a_i + a_{i+1}) / 4`,
/// relative to the largest acceleration.
fn max_midpoint(traj: &Trajectory) -> f64 {
    let dt = traj.dt;
    let s = &traj.states;
    let scale = s.iter().map(|x| x.acceleration.abs()).fold(f64::MIN_POSITIVE, f64::max);
    (1..s.len() - 1)
        .map(|i| {
            let lhs = (s[i + 1].displacement - 2.0 * s[i].displacement + s[i - 1].displacement) / (dt * dt);
            let rhs = 0.25 * (s[i - 1].acceleration + 2.0 * s[i].acceleration + s[i + 1].acceleration);
            (lhs - rhs).abs() / scale
        })
        .fold(0.0, f64::max)
}

#[test]
fn discrete_identities_hold_at_every_node() {
    for load in [
        LoadSignal::Step { amplitude: 1e6 },
        LoadSignal::Harmonic { amplitude: 1e6, omega: 1.0 },
    ] {
        let problem = table_one_problem(load);
        for dt in [0.5, 0.1] {
            let traj = integrate(&problem, dt, 300.0).unwrap();
            let eq = max_equilibrium(&problem, &traj);
            assert!(eq < 1e-10, "equilibrium {eq} at dt {dt}");
            assert!(max_midpoint(&traj) < 1e-9, "{}", max_midpoint(&traj));
        }
    }
}

#[test]
fn identities_with_prestressed_start() {
    let chain = MaxwellChain::from_pairs(3.0, &[(2.0, 0.3), (5.0, 40.0)]).unwrap();
    let init = InitialConditions {
        displacement: 0.4,
        velocity: -1.0,
        cell_forces: vec![0.7, -2.0],
    };
    let problem = SdofProblem::new(2.0, chain, LoadSignal::Harmonic { amplitude: 1.5, omega: 2.0 }, init).unwrap();
    let traj = integrate(&problem, 0.05, 50.0).unwrap();
    assert!(max_equilibrium(&problem, &traj) < 1e-12);
    assert!(max_midpoint(&traj) < 1e-9);
}

#[test]
fn elastic_free_vibration_conserves_energy() {
    let (m, k) = (2.0, 50.0);
    let chain = MaxwellChain::elastic(k).unwrap();
    let init = InitialConditions {
        displacement: 0.3,
        velocity: -1.1,
        cell_forces: vec![],
    };
    let problem = SdofProblem::new(m, chain, LoadSignal::Step { amplitude: 0.0 }, init).unwrap();
    for dt in [1e-3, 0.1, 2.0] {
        let traj = integrate(&problem, dt, 1e4 * dt).unwrap();
        assert_eq!(traj.len(), 10_001);
        let energy = |i: usize| {
            let s = &traj.states[i];
            0.5 * m * s.velocity * s.velocity + 0.5 * k * s.displacement * s.displacement
        };
        let e0 = energy(0);
        let drift = (0..traj.len()).map(|i| (energy(i) - e0).abs() / e0).fold(0.0, f64::max);
        assert!(drift <= 1e-10, "dt {dt}: drift {drift}");
    }
}

#[test]
fn table_one_trajectories_stay_bounded() {
    for dt in [1e-3, 1.0, 1e3] {
        for load in [
            LoadSignal::Step { amplitude: 1e6 },
            LoadSignal::Harmonic { amplitude: 1e6, omega: 1.0 },
        ] {
            let problem = table_one_problem(load);
            let traj = integrate(&problem, dt, 1e4 * dt).unwrap();
            // Energy bound: E_int(t) <= W(t) with W at most F * (max displacement range).
            let bound = 2.0 * 1e6 / problem.chain().long_term_stiffness();
            for s in &traj.states {
                assert!(s.is_finite());
                assert!(s.displacement.abs() <= bound, "dt {dt}: r = {}", s.displacement);
            }
        }
    }
}

#[test]
fn dissipation_never_exceeds_work_for_step() {
    let problem = table_one_problem(LoadSignal::Step { amplitude: 1e6 });
    let traj = integrate(&problem, 0.5, 300.0).unwrap();
    let led = ledger(&traj, problem.chain(), problem.mass(), problem.load()).unwrap();
    for e in &led.entries {
        assert!(e.dissipated <= e.work + 1e-9 * e.work.abs());
        assert!(e.internal >= 0.0);
    }
}
