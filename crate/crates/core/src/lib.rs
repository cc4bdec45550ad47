//! Stochastic-geometry model of cellular/WiFi coexistence in a shared
//! unlicensed band, and a best-response game over band-utilization fractions.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod game;
pub mod geometry;
pub mod montecarlo;
pub mod plot;
pub mod quadrature;
pub mod radio;
pub mod rng;
pub mod scenario_io;
pub mod units;
pub mod workflows;
