use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("instance validation failed:\n{}", .violations.join("\n"))]
    Validation { violations: Vec<String> },

    #[error("{guard} guard tripped (limit {limit})")]
    GuardTripped { guard: &'static str, limit: usize },

    #[error("boundary wall: {0} is a divisorial wall of the movable cone")]
    BoundaryWall(String),

    #[error("wall {0} is not a facet of the chamber")]
    NotAFacet(String),

    #[error("no flop rule entry for wall {0}")]
    MissingFlopRule(String),

    #[error("not a translation on W: {0}")]
    NotATranslation(String),

    #[error("lift not found within bounds (m <= {max_m}, nu <= {max_nu})")]
    LiftNotFound { max_m: u32, max_nu: u32 },

    #[error("boundedness certificate failed: {0}")]
    Unbounded(String),

    #[error("negativity dichotomy violated by instance data: {0}")]
    DichotomyViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
