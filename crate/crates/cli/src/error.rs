use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] scatterlab_core::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 configuration, 3 evolution, 4 I/O, 5 corner incompatibility.
    pub fn exit_code(&self) -> i32 {
        use scatterlab_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                E::Config(_) | E::Domain { .. } | E::Support(_) => 2,
                E::Evolution { .. } | E::MaskIncomplete(_) | E::Convergence { .. } | E::Degenerate(_) => 3,
                E::Table { .. } | E::Csv(_) | E::Io(_) => 4,
                E::CornerMismatch { .. } => 5,
            },
        }
    }
}
