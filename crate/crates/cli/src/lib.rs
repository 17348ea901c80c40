//! Command-line front end: scenario files, presets, runs, sweeps and CSV
//! export for the `cavity-ghz` toolkit.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;
pub mod run;

use thiserror::Error;

pub use config::ScenarioConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or out-of-range scenario input.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] cavity_ghz::Error),
}

impl CliError {
    /// Process exit status: 1 configuration, 2 validity failure,
    /// 3 infeasible calibration, 4 integrator abort.
    pub fn exit_code(&self) -> i32 {
        use cavity_ghz::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                E::ValidityFailed(_) => 2,
                E::Infeasible { .. } => 3,
                E::TraceDrift { .. } | E::Positivity { .. } | E::Integration(_) => 4,
                _ => 1,
            },
        }
    }

    /// The message without its category prefix.
    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            other => other.to_string(),
        }
    }
}
