//! Scenario configuration, command execution and report emission for the
//! `simrev` command-line tool.

pub mod config;
pub mod run;

pub use config::ScenarioConfig;
pub use run::{run, Command, Outcome, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] simrev_core::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 2 for configuration and input errors, 3 for exceeded budgets, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use simrev_core::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(E::BudgetExceeded { .. }) => 3,
            HarnessError::Core(
                E::InvalidInstance(_)
                | E::InvalidArgument(_)
                | E::AxiomViolation(_)
                | E::UnknownToken { .. }
                | E::SetOutOfRange { .. }
                | E::MissingTableEntry { .. },
            ) => 2,
            HarnessError::Core(_) | HarnessError::Io { .. } => 1,
        }
    }
}
