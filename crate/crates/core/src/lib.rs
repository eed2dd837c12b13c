//! Virtual element discretizations of the Poisson problem with homogeneous
//! Dirichlet conditions on polygonal (2D) and polyhedral (3D) meshes.
//!
//! The crate is organized bottom-up:
//!
//! - [`mesh`]: mesh containers, generators (including small-edge families) and
//!   shape-regularity diagnostics.
//! - [`polybasis`]: scaled monomials, their calculus and exact quadrature on
//!   star-shaped cells.
//! - [`element2d`] / [`element3d`]: per-cell projectors, stabilizations, local
//!   stiffness, load and interpolation.
//! - [`system`]: global dof numbering, sparse assembly and SPD solves.
//! - [`study`]: manufactured solutions, error norms and convergence studies.

pub mod element2d;
pub mod element3d;
pub mod error;
pub mod mesh;
pub mod polybasis;
pub mod study;
pub mod system;

mod vecops;

pub use error::{Result, VemError};

/// A point in the plane.
pub type Point2 = [f64; 2];
/// A point in space.
pub type Point3 = [f64; 3];
