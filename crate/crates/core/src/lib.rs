//! Microphone utility estimation for acoustic sensor networks.
//!
//! Each node reduces its signal to a handful of per-block features. The
//! access point tracks cross-channel feature correlations with Kalman
//! filters, fuses them into a channel similarity graph and reads per-channel
//! utilities off its Fiedler vector. A simulator, a coherence oracle and a
//! LASSO feature study round out the evaluation pipeline.

#![allow(clippy::needless_range_loop)]

pub mod dsp;
pub mod error;
pub mod estimator;
pub mod features;
pub mod harness;
pub mod lasso;
pub mod msc;
pub mod sim;
pub mod stats;
pub mod tracker;
pub mod wav;
pub mod wire;

pub use error::{Error, Result};
