//! Centers of simplicial polytopes in `R^n` and the volume derivative along
//! Möbius, projective and interpolating vector fields.
//!
//! A polytope is an integer-weighted cycle of oriented simplex facets
//! ([`SimplicialPolytope`]). Its center of mass, circumcenter of mass and
//! Möbius center are volume-weighted averages over any cone triangulation,
//! and the Möbius center is also characterised without a triangulation: the
//! logarithmic rate of change of volume along any Möbius field equals the
//! field's divergence there ([`derivative`]).
//!
//! ```
//! use mobius_center::polytope::generators::unit_cube;
//! use mobius_center::{verify_center_identity, QuadraticField, Vector};
//!
//! let cube = unit_cube();
//! let centers = cube.centers()?;
//! assert!((centers.m - Vector::from([0.5, 0.5, 0.5])).max_abs() < 1e-12);
//!
//! let xi = QuadraticField::special_conformal(Vector::from([0.1, 0.0, 0.2]));
//! let report = verify_center_identity(&xi, &cube)?;
//! assert!(report.relative_residual() < 1e-10);
//! # Ok::<(), mobius_center::Error>(())
//! ```

pub mod cli;
pub mod derivative;
pub mod error;
pub mod fields;
pub mod linalg;
pub mod polytope;
pub mod sampling;
pub mod simplex;
pub mod verify;

pub use derivative::{dlogvol_analytic, dlogvol_fd, mobius_center_from_derivatives, verify_center_identity, DerivativeReport};
pub use error::{Error, Result};
pub use fields::{invert_in_sphere, FieldKind, FlowTrajectory, QuadraticField};
pub use linalg::{Matrix, Vector};
pub use polytope::{CenterReport, CycleViolation, Facet, Similarity, SimplicialPolytope, Triangulation};
pub use simplex::{Circumsphere, Simplex};
