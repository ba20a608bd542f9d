//! Simulator of the classical analogue of a driven two-level atom: two
//! coupled, parametrically detuned, damped harmonic oscillators.
//!
//! Three model layers cover the same physics at increasing levels of
//! approximation and are cross-validated against each other:
//!
//! * [`newton`] — the full lab-frame Newtonian dynamics, integrated with
//!   fixed-step RK4, plus quadrature demodulation of the mode envelopes;
//! * [`envelope`] — the slowly-varying-envelope equations, their
//!   rotating-frame / RWA reduction, and the closed-form segment solution;
//! * [`bloch`] — the classical Bloch equations and exact axis-angle
//!   propagation of the Bloch vector.
//!
//! [`protocol`] runs Rabi, Ramsey, and Hahn-echo pulse sequences on any of
//! the layers; [`app`] and the `mechanical-bloch` binary expose them as a
//! deterministic CLI.

// validation uses negated comparisons (`!(x > 0.0)`) on purpose: they also
// reject NaN, which the suggested positive form would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod bloch;
pub mod config;
pub mod envelope;
pub mod error;
pub mod model;
pub mod newton;
pub mod output;
pub mod par;
pub mod protocol;
pub mod rk4;

pub use error::{Error, Result};
