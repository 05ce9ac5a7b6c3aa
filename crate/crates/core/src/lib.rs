//! Numerical and algebraic toolkit for Riemannian and Kähler cones.
//!
//! * [`mesh`]: simplicial links, boundary operators, real Betti numbers.
//! * [`dec`]: Whitney-form Hodge Laplacians on links and their spectra.
//! * [`cone`]: homogeneous forms on cones, the block operator `E`, indicial roots.
//! * [`kahler`]: weighted radius functions, Levi forms, potential gluing.
//! * [`catalog`]: singularity records and hypothesis checkers.
//! * [`artin`]: exact Artin local algebras and finite modules.

pub mod artin;
pub mod catalog;
pub mod cone;
pub mod dec;
pub mod error;
pub mod kahler;
pub mod linalg;
pub mod mesh;

pub use error::{Error, Result};
