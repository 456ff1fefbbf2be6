pub mod analysis;
pub mod error;
pub mod extension;
pub mod field;
pub mod graph;
pub mod laplace;
pub mod report;
pub mod surface;
pub mod tiling;

pub use error::{Error, Result};
pub use extension::{ExtendedField, FaceEnergy, FaceFourier};
pub use field::ScalarField;
pub use graph::{Curvature, GraphBall, SemiplanarGraph};
pub use laplace::{DirichletProblem, SolveMethod, SolveReport};
pub use surface::{FaceGeometry, MetricMesh, PlanarLayout, SurfacePoint};
pub use tiling::{GeneratedPatch, TilingKind, TilingSpec};
