//! Scenario runner for the `rydpump` toolkit.
//!
//! A run resolves a [`config::ScenarioConfig`], executes the scenario and
//! writes CSV/JSON files plus `manifest.json` into the output directory.
//! Exit codes: 0 ok, 1 a checked criterion failed, 2 configuration error,
//! 3 numerical or I/O failure.

pub mod analysis;
pub mod checks;
pub mod config;
pub mod output;
pub mod scenarios;

use std::time::Instant;

use rydpump::Execution;

use config::{FieldError, ScenarioConfig};
use output::{ErrorDocument, Manifest, OutputDir};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {}", join_fields(.0))]
    Config(Vec<FieldError>),
    #[error(transparent)]
    Numerical(#[from] rydpump::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn join_fields(errors: &[FieldError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

macro_rules! numerical_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numerical(e.into())
            }
        })*
    };
}

numerical_from!(
    rydpump::hamiltonians::HamiltonianError,
    rydpump::dynamics::DynamicsError,
    rydpump::states::StateError,
    rydpump::entanglement::EntanglementError,
    rydpump::darkstate::DarkStateError,
    rydpump::dissipation::DissipationError,
    rydpump::lattice::LatticeError
);

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// Machine-readable form printed on stderr.
    pub fn to_json(&self) -> String {
        let fields: &[FieldError] = match self {
            CliError::Config(f) => f,
            _ => &[],
        };
        let doc = ErrorDocument { error: &self.to_string(), kind: self.kind(), fields };
        serde_json::to_string(&doc).expect("error document serializes")
    }
}

/// Execute a resolved configuration and write its manifest.
pub fn run_scenario(cfg: &ScenarioConfig, exec: Execution) -> Result<Manifest, CliError> {
    let start = Instant::now();
    let mut out = OutputDir::create(&cfg.output)?;
    scenarios::run(cfg, exec, &mut out)?;
    Ok(out.finish(cfg, exec.thread_count(), start.elapsed().as_secs_f64())?)
}
