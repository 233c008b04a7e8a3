use thiserror::Error;

/// Failures of a campaign, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{module}: {source}")]
    Numeric {
        module: &'static str,
        source: qpcocycle::Error,
    },

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn numeric(module: &'static str, source: qpcocycle::Error) -> CliError {
        CliError::Numeric { module, source }
    }

    /// 2 for configuration and output problems, 3 for numerical failures,
    /// 4 for exhausted size or precision budgets.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numeric { source, .. } if source.is_resource() => 4,
            CliError::Numeric { .. } => 3,
        }
    }
}

/// Tags a library error with the module it came from.
pub fn in_module(module: &'static str) -> impl Fn(qpcocycle::Error) -> CliError {
    move |e| CliError::numeric(module, e)
}
