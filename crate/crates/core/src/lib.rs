//! Structure-preserving time integrators for the cubic nonlinear
//! Schrödinger equation `i z_t + z_xx + |z|^2 z = 0` on a periodic grid.
//!
//! Four schemes share one Newton driver: the discrete variational derivative
//! (DVD) scheme, the average vector field (AVF) scheme, and exponentially
//! fitted versions of both that replace the time difference `z_{n+1} - z_n`
//! with `alpha (z_{n+1} - z_n)`.

pub mod breather;
pub mod checks;
pub mod diagnostics;
pub mod dvd;
pub mod error;
pub mod fitting;
pub mod grid;
mod linalg;
pub mod newton;
pub mod runner;
pub mod schemes;

pub use breather::{breather, order_estimate, sol_err, BreatherParams, OrderEntry};
pub use diagnostics::{global_invariants, local_cl_residuals, GlobalInvariantReport, LocalClReport};
pub use error::{Error, Result};
pub use fitting::{alpha, FitParams};
pub use grid::{ComplexField, GridSpec};
pub use newton::{JacobianMode, NewtonStats, SolverConfig};
pub use runner::{run_single, run_sweep, RunConfig, RunReport};
pub use schemes::{SchemeKind, StepPair, Variant};
