//! Multi-rate Adams-Bashforth time integration.
//!
//! This crate implements explicit multistep time integration built around
//! Adams-Bashforth (AB) schemes whose weights are derived from arbitrary
//! history nodes, including *extended-history* variants (AB34, AB45) that use
//! more history values than the order requires and pick the minimum-2-norm
//! weight vector. On top of the integrators sit:
//!
//! - [`multirate`]: a fastest-first multi-rate AB scheme (MRAB) for systems
//!   partitioned into fast and slow components with an integer step ratio,
//! - [`stability`]: a stability laboratory (boundary-locus stability regions,
//!   finite-difference step matrices with a spectral-radius criterion, and a
//!   maximum-stable-timestep search),
//! - [`pde1d`]: a 1D linear-advection testbed discretized with a
//!   summation-by-parts (SBP) operator and SAT penalties, including a
//!   two-grid overset configuration and a CFL timestep calculator,
//! - [`perfmodel`]: an RHS-evaluation-count performance model that predicts
//!   when multi-rate integration is profitable.
//!
//! The `examples/` directory is the front door: each example exercises one
//! capability end to end and writes plot-ready CSV. A thin `mrab` binary
//! exposes the same capabilities as subcommands for scripting.

pub mod cli;
pub mod coeffs;
pub mod eoc;
pub mod multirate;
pub mod output;
pub mod pde1d;
pub mod perfmodel;
pub mod stability;
pub mod steppers;

pub use coeffs::{ab_weights, CoefficientSet, Extrapolant};
pub use multirate::{MrabConfig, MrabRun, MrabState, TwoRateSystem};
pub use steppers::{integrate_to, IntegrationResult, RkKind, SchemeState, StepperSpec};
