use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxwell-newmark"))
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> String {
    let prefix = format!("{key}=");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_owned))
        .unwrap_or_else(|| panic!("no {key} in\n{}", stdout(o)))
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let chain = repo("data/patch_chain.prony");
    let path = dir.join(name);
    fs::write(&path, body.replace("@CHAIN@", &chain.display().to_string())).unwrap();
    path
}

#[test]
fn sdof_outputs_have_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let scenario = repo("scenarios/step_sdof.toml");
    let o = run(&["simulate-sdof", scenario.to_str().unwrap(), "--dt", "1.0", "--tmax", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let header: Vec<&str> = traj.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 4 + 22);
    assert_eq!(&header[..5], ["t", "r", "v", "a", "f_1"]);
    assert_eq!(header[25], "f_22");
    assert_eq!(traj.lines().count(), 1 + 21);
    let energy = fs::read_to_string(out.join("energy.csv")).unwrap();
    assert_eq!(energy.lines().next().unwrap(), "t,E_int,D_d,W_d,Delta_d");
    assert_eq!(value(&o, "steps"), "20");
    assert!(stdout(&o).contains("final displacement [m]"));
    let r: f64 = value(&o, "r_final_m").parse().unwrap();
    let last: f64 = traj.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(r, last);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/harmonic_sdof.toml");
    let patch = repo("scenarios/patch_fem.toml");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}"));
        let o = run(&["simulate-sdof", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        let o = run(&["simulate-fem", patch.to_str().unwrap(), "--tmax", "5", "--out", out.join("fem").to_str().unwrap()]);
        assert!(o.status.success());
        outputs.push([
            fs::read(out.join("trajectory.csv")).unwrap(),
            fs::read(out.join("energy.csv")).unwrap(),
            fs::read(out.join("fem/probe_26.csv")).unwrap(),
        ]);
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn zero_traction_gives_zero_probes() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "zero.toml",
        r#"
kind = "fem"
chain_file = "@CHAIN@"
cells = [2, 2, 2]
size_m = [1.0, 1.0, 1.0]
density_kg_m3 = 1.0
poisson_ratio = 0.3
boundary = "fix-bottom"
dt_s = 0.1
t_max_s = 2.0
probe_points_m = [[1.0, 1.0, 1.0], [0.5, 0.5, 0.5]]

[traction]
face = "z-max"
vector_n_m2 = [0.0, 0.0, 1.0]
profile = { type = "step", scale = 0.0 }
"#,
    );
    let out = dir.path().join("o");
    let o = run(&["simulate-fem", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for node in [26, 13] {
        let csv = fs::read_to_string(out.join(format!("probe_{node}.csv"))).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "t,ux,uy,uz");
        assert_eq!(csv.lines().count(), 1 + 21);
        for line in csv.lines().skip(1) {
            let u: Vec<f64> = line.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
            assert_eq!(u, [0.0; 3]);
        }
    }
}

#[test]
fn missing_density_warns_and_uses_default() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        dir.path(),
        "nodensity.toml",
        r#"
kind = "fem"
chain_file = "@CHAIN@"
cells = [1, 1, 1]
size_m = [1.0, 1.0, 1.0]
poisson_ratio = 0.3
boundary = "fix-bottom"
dt_s = 0.1
t_max_s = 0.5
"#,
    );
    let o = run(&["simulate-fem", scenario.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: "));
    assert_eq!(value(&o, "density_kg_m3").parse::<f64>().unwrap(), 1.0);
}

#[test]
fn single_step_size_convergence_has_empty_order() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/step_sdof.toml");
    let out = dir.path().join("o");
    let o = run(&["converge", scenario.to_str().unwrap(), "--dt-list", "0.5", "--tmax", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "dt,max_error,observed_order");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(','));
    assert_eq!(value(&o, "rows"), "1");
}

#[test]
fn convergence_error_decreases_for_coarse_steps() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/step_sdof.toml");
    let out = dir.path().join("o");
    let o = run(&["converge", scenario.to_str().unwrap(), "--dt-list", "1.0,0.5,0.2", "--tmax", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    let errors: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn energy_report_rows() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/step_sdof.toml");
    let out = dir.path().join("o");
    let o = run(&["energy-report", scenario.to_str().unwrap(), "--dt-list", "0.2,0.1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "dt,delta_ratio,D_over_W");
    assert_eq!(csv.lines().count(), 3);
    let a: f64 = value(&o, "delta_ratio_dt_0.1").parse().unwrap();
    let b: f64 = value(&o, "delta_ratio_dt_0.2").parse().unwrap();
    assert!(a < b);
}

#[test]
fn free_vibration_report_is_undefined() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/elastic_free_sdof.toml");
    let o = run(&["simulate-sdof", scenario.to_str().unwrap(), "--tmax", "10", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(value(&o, "D_over_W"), "undefined");
}

#[test]
fn chain_flag_replaces_scenario_chain() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/step_sdof.toml");
    let chain = repo("data/elastic_spring.prony");
    let out = dir.path().join("o");
    let o = run(&[
        "simulate-sdof",
        scenario.to_str().unwrap(),
        "--chain",
        chain.to_str().unwrap(),
        "--tmax",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,r,v,a");
}

#[test]
fn failures_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let o = run(&["simulate-sdof", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));

    let bad = write_scenario(
        dir.path(),
        "bad.toml",
        "kind = \"sdof\"\nchain_file = \"@CHAIN@\"\nmass_kg = -1.0\ndt_s = 0.1\nt_max_s = 1.0\n[load]\ntype = \"step\"\namplitude_n = 1.0\n",
    );
    let o = run(&["simulate-sdof", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mass"));

    let fem = repo("scenarios/patch_fem.toml");
    let o = run(&["simulate-sdof", fem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["simulate-fem", fem.to_str().unwrap(), "--solver", "exact"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exact_solver_writes_same_grid() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = repo("scenarios/harmonic_sdof.toml");
    let out = dir.path().join("o");
    let o = run(&["simulate-sdof", scenario.to_str().unwrap(), "--solver", "exact", "--tmax", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(value(&o, "solver"), "exact");
    assert_eq!(value(&o, "steps"), "100");
}

#[test]
fn fem_snapshots_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let patch = repo("scenarios/patch_fem.toml");
    let scenario = dir.path().join("snap.toml");
    // Top-level keys must precede the [traction] table.
    let text = fs::read_to_string(&patch)
        .unwrap()
        .replace("../data/", &format!("{}/", repo("data").display()))
        .replace("[traction]", "snapshot_every = 20\n\n[traction]");
    fs::write(&scenario, text).unwrap();
    let out = dir.path().join("o");
    let o = run(&["simulate-fem", scenario.to_str().unwrap(), "--tmax", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&o, "snapshots"), "3");
    let vtk = fs::read_to_string(out.join("snapshot_000040.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(vtk.contains("DATASET STRUCTURED_GRID\nDIMENSIONS 3 3 3\n"));
}
