use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("{}", match .index {
        Some(i) => format!("degenerate displacement at {i}"),
        None => "degenerate displacement".to_string(),
    })]
    DegenerateDisplacement { index: Option<usize> },

    #[error("degenerate bounding box: all poses coincide")]
    DegenerateBoundingBox,

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("frames do not align: {0}")]
    FrameMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from configuration rather than input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }
}
