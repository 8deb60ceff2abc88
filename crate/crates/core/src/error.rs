use thiserror::Error;

pub type Result<T> = std::result::Result<T, ChannelError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// A TX and an RX element sit at the same point; the Green function is singular there.
    #[error("coincident points for element pair (m = {m}, n = {n})")]
    CoincidentPoints { m: usize, n: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("zero channel: every singular value vanishes")]
    ZeroChannel,

    #[error("degenerate reference: reference matrix has zero Frobenius norm")]
    DegenerateReference,
}

impl ChannelError {
    pub fn is_degenerate_geometry(&self) -> bool {
        matches!(self, ChannelError::DegenerateGeometry(_) | ChannelError::CoincidentPoints { .. })
    }
}
