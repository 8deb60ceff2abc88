use hmimo_core::ChannelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid sweep configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error(transparent)]
    Channel(#[from] ChannelError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv output error: {0}")]
    Csv(#[from] csv::Error),

    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl BenchError {
    /// Process exit status: 2 config, 3 degenerate geometry, 4 I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Channel(e) if e.is_degenerate_geometry() => 3,
            BenchError::Io(_) | BenchError::Csv(_) => 4,
            BenchError::Channel(_) | BenchError::Pool(_) => 1,
        }
    }
}
