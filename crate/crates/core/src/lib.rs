//! A priori bounds for traveling waves of n-species reaction-diffusion
//! systems
//!
//! ```text
//! d_i u_i'' + theta u_i' + u_i^{l_i} f_i(u_1, ..., u_n) = 0
//! ```
//!
//! built from N-barriers: nested level sets of `p = sum alpha_i U_i` and
//! `q = sum alpha_i d_i U_i` with `U_i = ln(u_i + k_i)` (lower bounds) or
//! `U_i = u_i^{m_i}` (upper bounds).
//!
//! The crate is `no_std` (it needs `alloc`). It contains the closed-form
//! bounds, the barrier geometry, hypothesis checks on the reaction terms, a
//! finite-difference Newton solver for two-species Lotka-Volterra waves, and
//! pointwise verification of every bound along a computed profile. File
//! formats and the command line live in the `nbarrier-cli` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod banded;
pub mod barrier;
pub mod bounds;
mod error;
pub mod hypotheses;
pub(crate) mod math;
pub mod model;
pub mod sampling;
pub mod solver;
pub mod verify;

pub use barrier::{BarrierConstruction, InclusionReport, Intercepts, Membership};
pub use bounds::{BarrierLevels, BoundParams, Mode};
pub use error::Error;
pub use hypotheses::{Hypothesis, HypothesisReport, Method};
pub use model::{Equilibrium, EquilibriumLabel, HypothesisRegion, Lv2Params, Lv2System, Reaction, SystemSpec};
pub use solver::{SolveConfig, SolveError, WaveProfile};
pub use verify::{BoundCheckReport, BoundKind, SolutionClass};

pub type Result<T, E = Error> = core::result::Result<T, E>;
