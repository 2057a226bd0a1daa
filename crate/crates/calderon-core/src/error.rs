//! Error type shared by the solver, DtN, and reconstruction layers.

use crate::geometry::Point3;
use thiserror::Error;

/// Errors produced by the lattice Maxwell solvers and the reconstruction
/// pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A field value was read at a site/component where it is undefined.
    #[error("missing field value: component {component} at {point}")]
    MissingValue { component: &'static str, point: Point3 },

    /// A potential entry was requested that is not part of the known state.
    #[error("missing potential entry: {component} at {point}")]
    MissingPotential { component: &'static str, point: Point3 },

    /// A material or potential entry is zero (not invertible).
    #[error("zero diagonal entry: {component} at {point}")]
    ZeroEntry { component: &'static str, point: Point3 },

    /// The Dirichlet system is singular or numerically near-singular.
    #[error("singular Dirichlet system: sigma_min = {sigma_min:.3e}, matrix norm = {norm:.3e}")]
    SingularSystem { sigma_min: f64, norm: f64 },

    /// The boundary-completion operator could not be inverted.
    #[error("singular completion operator: sigma_min = {sigma_min:.3e}")]
    SingularCompletion { sigma_min: f64 },

    /// A marching window was too small for the requested number of layers.
    #[error("marching window exhausted: requested layer {requested}, budget {budget}")]
    WindowExhausted { requested: i32, budget: i32 },

    /// A divisor fell below the numerical-reliability threshold.
    #[error("vanishing divisor in {context}: |{value:.3e}| below {threshold:.3e} at {point}")]
    VanishingDivisor { context: &'static str, value: f64, threshold: f64, point: Point3 },

    /// The tau-escalation ladder was exhausted without a usable weight.
    #[error("tau escalation exhausted at plane {plane}: {detail}")]
    TauExhausted { plane: i32, detail: String },

    /// Aggregated reconstruction failure with the plane index attached.
    #[error("reconstruction failed at plane {plane}: {source}")]
    PlaneFailure {
        plane: i32,
        #[source]
        source: Box<CoreError>,
    },

    /// Input validation failure (formats, dimensions, ranges).
    #[error("validation error: {0}")]
    Validation(String),

    /// Filesystem error while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CoreError {
    /// Attach a plane index to an error bubbling out of a plane iteration.
    pub fn at_plane(self, plane: i32) -> CoreError {
        CoreError::PlaneFailure { plane, source: Box::new(self) }
    }

    /// True for errors that signal a numerical failure (CLI exit code 2)
    /// rather than an input-validation failure (exit code 1).
    pub fn is_numerical(&self) -> bool {
        match self {
            CoreError::SingularSystem { .. }
            | CoreError::SingularCompletion { .. }
            | CoreError::VanishingDivisor { .. }
            | CoreError::TauExhausted { .. } => true,
            CoreError::PlaneFailure { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
