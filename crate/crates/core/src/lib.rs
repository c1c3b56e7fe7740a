//! Numerical verification kit for partially overdetermined mixed
//! boundary-value problems on sector-like domains inside and outside convex
//! cones in the three constant-curvature surfaces.
//!
//! What lives where:
//! - [`spaceform`]: curvature-indexed warp factors, radial weights, geodesic
//!   distances.
//! - [`mesh`]: structured polar triangulations of cap domains with tagged
//!   cap/wall boundaries, plus diagnostics and plain-text export.
//! - [`assembly`]: metric P1 stiffness/mass/load, direct solves with inertia
//!   reporting, and the smallest mixed eigenpair.
//! - [`postprocess`]: gradient recovery, cap normal-derivative traces,
//!   volume and boundary quadrature.
//! - [`pfunctions`]: the two auxiliary functions of the rigidity argument
//!   and their discrete maximum-principle / harmonicity checks.
//! - [`verify`]: closed forms, trace constancy, flux compatibility, the
//!   boundary eigenvalue identity, and the convergence harness.
//! - [`radial`]: the one-dimensional radial reduction for general dimension.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! the aliases below fix the common `f64` instantiation.

pub mod assembly;
pub mod error;
pub mod mesh;
pub mod pfunctions;
pub mod postprocess;
pub mod radial;
pub mod scalar;
pub mod spaceform;
pub mod sparse;
pub mod tolerances;
pub mod verify;

pub use assembly::{ProblemKind, ProblemSpec};
pub use error::{Error, Result};
pub use mesh::{BoundaryTag, Side};
pub use scalar::Real;
pub use spaceform::SpaceForm;

/// `f64` instantiations of the core types.
pub type PolarPoint = spaceform::PolarPoint<f64>;
pub type ConeSpec = mesh::ConeSpec<f64>;
pub type RadialGraph = mesh::RadialGraph<f64>;
pub type Mesh = mesh::Mesh<f64>;
pub type ScalarField = assembly::ScalarField<f64>;
pub type SparseSystem = assembly::SparseSystem<f64>;
pub type GradientField = postprocess::GradientField<f64>;
pub type BoundaryTrace = postprocess::BoundaryTrace<f64>;
pub type RadialProfile = radial::RadialProfile<f64>;
pub type GraphSpec = verify::GraphSpec<f64>;
pub type CaseConfig = verify::CaseConfig<f64>;
pub type CaseOutcome = verify::CaseOutcome<f64>;
pub type ConvergenceStudy = verify::ConvergenceStudy<f64>;
