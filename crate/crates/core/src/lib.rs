//! Optimal weight interpolation for dynamic-weight geometric-mean market makers.
//!
//! A G3M pool that moves its weights from `w_start` to `w_end` pays arbitrageurs
//! a KL divergence per step. Under the Hellinger map `eta = sqrt(w)` the
//! Fisher–Rao metric becomes the round metric on the positive orthant of the
//! unit sphere, so the loss-minimising interpolation is SLERP. This crate
//! provides:
//!
//! - [`simplex`]: weight vectors, Hellinger coordinates, KL loss, retention
//!   ratio, loss kernels and the principal-branch Lambert W.
//! - [`interpolation`]: linear, geometric, (AM+GM)/normalise, SLERP, the
//!   two-token angle form, the Lambert-W midpoint and trig-free bisection.
//! - [`cost`]: per-step cost reports and the analytic SLERP cost.
//! - [`optimize`]: a brute-force path optimiser used as an oracle.
//! - [`stochastic`]: LVR, optimal step counts, price simulation and CSV replay.
//! - [`fees`]: fee-band thresholds and fee-adjusted step counts.
//! - [`dynamics`]: the two-token pendulum boundary-value problem, its
//!   Green's-function correction and the Jacobi speed profile.
//! - [`cli`]: the `rebal` command-line front end.

pub mod cli;
pub mod cost;
pub mod dynamics;
pub mod error;
pub mod fees;
pub mod interpolation;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod simplex;
pub mod special;
pub mod stochastic;

pub use cost::{analytic_slerp_cost, evaluate_trajectory, suboptimality_bound, CostReport};
pub use error::{Error, Result};
pub use interpolation::{Method, Trajectory};
pub use simplex::{HellingerPoint, LossKernelKind, WeightVector};
pub use stochastic::MarketParams;
