//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Curvature selector outside the closed set {-1, 0, +1}.
    #[error("invalid curvature {0}: must be -1, 0, or +1")]
    InvalidCurvature(i64),

    /// A precondition on user input was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Mesh construction or structural consistency failure.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// A graph ray does not intersect the requested geodesic circle.
    #[error("ray theta={theta} does not intersect the circle of radius {radius} about (d={dist})")]
    RayMissesCircle { theta: f64, radius: f64, dist: f64 },

    /// Fields, meshes, or problem specs that do not belong together.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// Factorization hit a pivot too small to trust.
    #[error("singular system: pivot {pivot:e} at index {index} below tolerance")]
    Singular { pivot: f64, index: usize },

    /// An iterative solver ran out of its iteration budget.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// No closed-form reference solution exists for this configuration.
    #[error("no closed-form solution for curvature {curvature} with kind {kind}")]
    UnsupportedClosedForm { curvature: i64, kind: &'static str },

    /// A multi-stage pipeline failed; names the stage for diagnosis.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
