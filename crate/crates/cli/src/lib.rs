//! Scenario-driven front end for the `maxwell-newmark` integrators.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{Overrides, Summary};
pub use error::CliError;
pub use scenario::{Scenario, Solver};

#[derive(Debug, Parser)]
#[command(name = "maxwell-newmark", version, about = "Newmark time stepping for generalized Maxwell viscoelasticity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a single-degree-of-freedom scenario; writes trajectory.csv and energy.csv.
    SimulateSdof(CommonArgs),
    /// Run a finite element scenario; writes probe CSVs and VTK snapshots.
    SimulateFem(CommonArgs),
    /// Compare Newmark with the exact solver over a list of step sizes; writes convergence.csv.
    Converge(CommonArgs),
    /// Dissipated and artificial energy ratios over a list of step sizes; writes report.csv.
    EnergyReport(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    pub scenario: PathBuf,
    /// Prony file replacing the scenario's chain_file.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Time integrator.
    #[arg(long, value_enum)]
    pub solver: Option<Solver>,
    /// Time step [s].
    #[arg(long)]
    pub dt: Option<f64>,
    /// End time [s].
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Comma-separated step sizes [s] for converge and energy-report.
    #[arg(long, value_delimiter = ',')]
    pub dt_list: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            chain: self.chain.clone(),
            solver: self.solver,
            dt: self.dt,
            t_max: self.tmax,
            dt_list: self.dt_list.clone(),
            out: self.out.clone(),
        }
    }
}

/// Runs one command and returns its summary. Warnings go to stderr.
pub fn run(cli: &Cli) -> Result<Summary, CliError> {
    match &cli.command {
        Command::SimulateFem(args) => {
            let scenario = Scenario::load(&args.scenario)?;
            let setup = commands::FemSetup::new(&scenario, &args.overrides())?;
            if setup.density_defaulted {
                eprintln!(
                    "warning: {} sets no density_kg_m3; using {} kg/m^3",
                    scenario.path.display(),
                    scenario::DEFAULT_DENSITY
                );
            }
            Ok(commands::simulate_fem(&setup)?.summary)
        }
        Command::SimulateSdof(args) => Ok(commands::simulate_sdof(&sdof_setup(args)?)?.summary),
        Command::Converge(args) => Ok(commands::converge(&sdof_setup(args)?)?.1),
        Command::EnergyReport(args) => Ok(commands::energy_report(&sdof_setup(args)?)?.1),
    }
}

fn sdof_setup(args: &CommonArgs) -> Result<commands::SdofSetup, CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    commands::SdofSetup::new(&scenario, &args.overrides())
}
