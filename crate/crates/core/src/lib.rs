//! Optimal counterfactual explanations for binary integer linear programs.
//!
//! Given a present problem `min ĉᵀx s.t. âᵀx ≥ b̂, x ∈ 𝒳 ⊆ {0,1}ⁿ`, a favored
//! solution space `𝒟` and a bounded integer space `ℋ` of admissible parameter
//! triples `(c, a, b)`, this crate computes the cheapest parameter change
//! (weighted ℓ1) such that
//!
//! * some optimal solution lies in `𝒟` (a *weak* explanation), or
//! * every optimal solution lies in `𝒟` (a *strong* explanation).
//!
//! Everything runs on [`mip`], a small exact branch-and-bound solver for
//! bounded-integer programs, so results are bit-reproducible. The [`oracle`]
//! module classifies parameter grids by exhaustive enumeration and serves as
//! the independent reference for the algorithms.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled; wall-clock budgets are then injected through [`mip::Stopwatch`].
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;

pub mod ce;
pub mod dp;
pub mod instances;
pub mod mip;
pub mod model;
pub mod oracle;
pub mod strong;
pub mod weak;

pub use ce::{solve, CeInstance, SolveOptions};
pub use error::{Error, Result};
pub use model::{
    check_strong, check_weak, CeResult, CeStatus, Distance, FavoredSpace, Interval, Kind, LinearRow, Mode,
    MutableSpace, Params, PresentProblem, SolveStats,
};
