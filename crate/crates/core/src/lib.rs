//! Angle structures on layered ideal triangulations of the solid torus.
//!
//! A triangulation of the boundary torus, together with exterior dihedral
//! angles `α` on its edges and a cone angle `K`, determines a linear system
//! on the corner angles. This crate decides whether the system has a
//! positive solution, maximizes the hyperbolic volume over the solutions,
//! and builds the resulting boundary similarity structure.

pub mod checker;
pub mod cli;
pub mod config;
pub mod error;
pub mod feasibility;
pub mod generate;
pub mod homology;
pub mod instance;
pub mod linalg;
pub mod lobachevsky;
pub mod realize;
pub mod scalar;
pub mod simplex;
pub mod system;
pub mod topology;
pub mod volume;

pub use error::{Error, Result};
pub use instance::RawInstance;
pub use system::AngleAssignment;
pub use topology::{SideRef, Step, TransversePath, Triangulation, Turn};
