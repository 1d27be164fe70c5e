use leibniz_scalar::ScalarError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("locality projector required")]
    MissingProjector,
    #[error("connection is not admissible")]
    NotAdmissible,
    #[error("metric is degenerate")]
    DegenerateMetric,
    #[error("singular frame change")]
    SingularFrame,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid document: {0}")]
    Document(String),
}

impl GeomError {
    pub fn is_budget(&self) -> bool {
        matches!(self, GeomError::Scalar(ScalarError::Budget { .. }))
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
