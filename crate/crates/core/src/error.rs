//! Crate-wide error type.

use thiserror::Error;

use crate::graph::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structural invariant violations collected by graph validation.
    #[error("graph validation failed:\n{0}")]
    Validation(ValidationReport),

    /// Curvature and angle queries are undefined on truncation boundaries.
    #[error("vertex {vertex} lies on the truncation boundary; curvature is undefined there")]
    BoundaryVertex { vertex: usize },

    #[error("vertices {from} and {to} are not connected")]
    Disconnected { from: usize, to: usize },

    /// A ball query touched the truncation boundary, so the result would not
    /// equal the infinite-graph value.
    #[error("insufficient truncation: ball of radius {radius} around {center} reaches the boundary")]
    InsufficientTruncation { center: usize, radius: usize },

    #[error("unsupported tiling pattern `{0}`")]
    UnsupportedPattern(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// Semantic problems in an input file, pointing at the offending entry.
    #[error("bad graph file: {detail}")]
    FileFormat { detail: String },

    #[error("field has no value for vertex {vertex}")]
    MissingValue { vertex: usize },

    #[error("Dirichlet problem has an empty boundary")]
    EmptyBoundary,

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("field is not strictly positive at vertex {vertex} (value {value})")]
    NotPositive { vertex: usize, value: f64 },

    #[error("field is not harmonic at vertex {vertex}: |Lf| = {residual:.3e} exceeds tolerance")]
    NotHarmonic { vertex: usize, residual: f64 },

    /// Planar development only exists for flat patches.
    #[error("not developable: vertex {vertex} has nonzero curvature")]
    NotDevelopable { vertex: usize },

    #[error("development is inconsistent near vertex {vertex} (mismatch {mismatch:.3e})")]
    InconsistentDevelopment { vertex: usize, mismatch: f64 },

    #[error("point lies outside face {face}")]
    OutsideFace { face: usize },

    #[error("face degree must be at least 3, got {0}")]
    FaceDegreeTooSmall(usize),

    #[error("surface query of radius {radius} leaves the safe region of the truncation")]
    OutsideSafeRegion { radius: f64 },

    #[error("insufficient boundary sampling: {samples} samples for {harmonics} harmonics (need at least 8x)")]
    InsufficientSampling { samples: usize, harmonics: usize },

    #[error("no Fourier data stored for face {face}")]
    FaceNotExtended { face: usize },

    #[error("face {face} has zero mass but nonzero vertex values; extension is unusable there")]
    ZeroFaceMass { face: usize },

    #[error("transfer radius {r} is too small; need r > {min_r:.4}")]
    TransferRadiusTooSmall { r: f64, min_r: f64 },

    #[error("Gram matrix at the expanded radius is not positive definite")]
    GramNotPositiveDefinite,

    #[error("radius schedule needs at least 3 entries to certify growth, got {0}")]
    ScheduleTooShort(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
