use std::fmt;
use std::io;
use std::path::PathBuf;

use maxwell_newmark::fem::FemError;
use maxwell_newmark::{ChainError, EnergyError, LoadError, OracleError, ParseError, SdofError};

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: io::Error },
    Scenario { path: PathBuf, message: String },
    Chain { path: PathBuf, source: ParseError },
    InvalidChain(ChainError),
    Load(LoadError),
    Sdof(SdofError),
    Oracle(OracleError),
    Energy(EnergyError),
    Fem(FemError),
    /// A scenario/command combination that cannot run.
    Unsupported(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Scenario { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Chain { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::InvalidChain(e) => write!(f, "chain: {e}"),
            CliError::Load(e) => write!(f, "load: {e}"),
            CliError::Sdof(e) => write!(f, "integration failed: {e}"),
            CliError::Oracle(e) => write!(f, "exact solver failed: {e}"),
            CliError::Energy(e) => write!(f, "energy report failed: {e}"),
            CliError::Fem(e) => write!(f, "finite element run failed: {e}"),
            CliError::Unsupported(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Chain { source, .. } => Some(source),
            CliError::InvalidChain(e) => Some(e),
            CliError::Load(e) => Some(e),
            CliError::Sdof(e) => Some(e),
            CliError::Oracle(e) => Some(e),
            CliError::Energy(e) => Some(e),
            CliError::Fem(e) => Some(e),
            CliError::Scenario { .. } | CliError::Unsupported(_) => None,
        }
    }
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

macro_rules! from_core {
    ($($variant:ident($ty:ty)),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::$variant(e)
            }
        })*
    };
}

from_core!(InvalidChain(ChainError), Load(LoadError), Sdof(SdofError), Oracle(OracleError), Energy(EnergyError), Fem(FemError));
