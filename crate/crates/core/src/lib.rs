//! Solver for one-dimensional strain-limiting viscoelasticity,
//! `ε + νε_t = h(S)`, written in potential form
//! `η_tt = g(η_x)_x + ν g(η_x)_xt` with `g = h⁻¹`.
//!
//! The nonlinear problem is solved by Picard iteration on a linearized
//! parabolic solve ([`fixed_point`]) and cross-checked against a direct IMEX
//! solver for the strain-sum ([`oracle`]).

pub mod constitutive;
pub mod convergence;
pub mod diagnostics;
pub mod error;
pub mod fixed_point;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod parabolic;
pub mod scenario;
pub mod trajectory;
pub mod transforms;
pub mod tridiag;

pub use constitutive::{ConstitutiveModel, ModelKind};
pub use error::{Result, SlvError};
pub use fixed_point::{ContractionHistory, SolverConfig};
pub use grid::{Field, GridSpec};
pub use trajectory::Trajectory;
