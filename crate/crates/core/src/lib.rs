//! Numerical library for surfaces in 3-dimensional unimodular metric Lie
//! groups of diagonalizable type.
//!
//! The ambient spaces are the simply connected 3-manifolds carrying a
//! left-invariant (semi-)Riemannian metric with an orthonormal frame
//! `{E1, E2, E3}` satisfying
//!
//! ```text
//! [E1,E2] = c3 E3,   [E2,E3] = c1 E1,   [E3,E1] = c2 E2,
//! <Ei,Ei> = eps_i in {-1,+1}.
//! ```
//!
//! Everything is driven by the structure constants `(c1,c2,c3)` and the
//! signs `(eps1,eps2,eps3)`. The crate provides
//!
//! * [`model`] — the cylinder coordinate model `D x R`, its global frame,
//!   metric, connection, curvature, classification and covering maps;
//! * [`surface`] — extraction of the fundamental data `(S, J, T_i, nu_i)`
//!   of a parametrized surface patch and numerical evaluation of the
//!   compatibility equations;
//! * [`frame`] — the change-of-frame matrix `M`, the moving-frame equation
//!   `M^{-1} dM = Omega + L(M)`, Darboux/Frobenius diagnostics and the
//!   frame/position integrators;
//! * [`reconstruct`] — recovery of an immersion from tangent projections,
//!   from angle functions, or from `(S, T3, nu3)` in the spaces with
//!   4-dimensional isometry group;
//! * [`correspond`] — Lawson/Daniel-type deformations of fundamental data;
//! * [`special`] — constant-angle coset surfaces, totally geodesic
//!   distributions and vertical cylinders with their angular companions;
//! * [`io`] — CSV grid formats and JSON manifests used by the CLI.
//!
//! All floating point work is in `f64`. Grids are dense row-major arrays,
//! derivatives are 4th-order finite differences unless a patch provides
//! analytic partials.

pub mod correspond;
pub mod error;
pub mod frame;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod model;
pub mod reconstruct;
pub mod special;
pub mod surface;

pub use error::Error;
pub use model::{MetricLieGroupModel, ModelPoint, Signature, StructureConstants};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
