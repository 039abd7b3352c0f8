//! Curvature, perfect-fluid matter and soliton analysis for user-defined
//! 4-dimensional Lorentzian metrics.
//!
//! The crate evaluates metrics given as closed-form coordinate expressions,
//! differentiates them exactly, and checks the identities relating curvature,
//! perfect-fluid energy-momentum, quasi-Einstein structure and solitons at
//! seeded sample points. Start with the runnable examples (`cargo run
//! --example curvature_tour`) or the `fluidspace` binary for batch analysis.

pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod expr;
pub mod fluid;
pub mod geometry;
pub mod report;
pub mod soliton;
pub mod tensor;

pub use catalog::SpacetimeSpec;
pub use expr::Expr;
pub use fluid::FluidParams;
pub use geometry::{MetricField, VectorFieldExpr};
pub use tensor::{MetricAtPoint, OrthonormalFrame, SpacetimePoint, TensorComponents};

/// Default absolute tolerances (desk units), overridable per run.
pub mod tol {
    /// Geometry residuals: curvature identities, trace agreements.
    pub const GEOMETRY: f64 = 1e-9;
    /// Structural symmetry residuals (Riemann symmetries, Bianchi, nabla g).
    pub const SYMMETRY: f64 = 1e-10;
    /// Frame orthonormality.
    pub const FRAME: f64 = 1e-12;
    /// Classification of covariant-derivative conditions (three derivative
    /// levels stack, so this is looser than the geometry tolerance).
    pub const CLASSIFY: f64 = 1e-7;
    /// Soliton equation residuals.
    pub const SOLITON: f64 = 1e-8;
    /// `|a|` below this counts as a steady soliton.
    pub const STEADY: f64 = 1e-9;
}
