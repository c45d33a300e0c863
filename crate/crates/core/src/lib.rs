//! Efficient hedging of European calls under the standard, time-varying and
//! fractional Black-Scholes models.
//!
//! * [`term_structure`]: market models and window quantities
//!   `(sigma_T, theta_T, alpha_T)`.
//! * [`analytic_pricing`]: normal CDF, `d_pm`, perfect-hedge price.
//! * [`efficient_hedging`]: value functions, hedge ratios, modified claims and
//!   budget calibration for power and linear loss.
//! * [`monte_carlo`]: exact path simulation, fBm synthesis, pricing,
//!   shortfall-risk estimation and hedging backtests.
//! * [`cli`]: configuration and the command workflows behind the binary.

// Negated comparisons are used so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic_pricing;
pub mod cli;
pub mod efficient_hedging;
pub mod error;
pub mod monte_carlo;
mod root;
pub mod term_structure;

pub use error::{Error, ErrorKind, Result};
