//! Differential-service incentives for peer-to-peer systems.
//!
//! Peers choose how much to contribute; requests from a peer are served
//! with a probability that grows with its contribution. This crate provides
//! the dimensionless utility model, closed-form equilibria for homogeneous
//! populations, a best-response learning engine for heterogeneous ones,
//! seeded instance generation and the experiment sweeps built on top.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod model;
pub mod synth;

pub use error::{Error, Result};
