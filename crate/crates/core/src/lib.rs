//! Reflection-loss based scatterer localization and material identification.
//!
//! The forward chain runs from material parameters ([`materials`]) through
//! Fresnel reflection ([`fresnel`]) to a lookup table of single-bounce loss
//! ([`rl_db`]). [`scene`] traces specular paths through planar scatterers and
//! synthesizes measurements; [`solver`] inverts a measurement back to
//! reflection points and materials.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod curves;
pub mod error;
pub mod fresnel;
pub mod geometry;
pub mod golden;
pub mod linkbudget;
pub mod materials;
pub mod rl_db;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Ray, PlaneScatterer, Trajectory, Vec3};
pub use materials::{catalog_lookup, MaterialCatalog, MaterialParams};
pub use rl_db::{generate_db, MaterialSequence, RlDatabase};
pub use scene::{Measurement, Scene};
pub use solver::{CandidateSolution, MethodRegistry, SolverConfig};
