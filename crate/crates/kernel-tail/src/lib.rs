//! Exact tail asymptotics for two-dimensional stochastic networks via the
//! kernel method.
//!
//! The library mechanizes one analytic pipeline for three model families:
//!
//! * discrete random walks in the quarter plane ([`model::WalkSpec`]),
//! * semimartingale reflected Brownian motion ([`model::SrbmSpec`]),
//! * M/M/c-driven fluid queues ([`model::FluidSpec`]).
//!
//! For each family the steps are the same: build the kernel and its
//! coefficient polynomials, locate branch points of the two-valued algebraic
//! function the kernel defines, search the boundary kernels for pole
//! candidates, classify the dominant singularity into one of four types, and
//! transfer the local behavior of the boundary generating function to exact
//! tail asymptotics `c * n^alpha * theta^n` (or `C * x^p * e^{-tau x}` for
//! the continuous families).
//!
//! An independent numerical oracle (truncated-lattice stationary solver plus
//! tail regression) verifies the discrete-walk predictions; see [`oracle`].

pub mod asymptotics;
pub mod error;
pub mod fluid;
pub mod kernel;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod singularity;
pub mod srbm;

pub use error::{AnalysisError, Error, ModelError, OracleError, Result};
