//! Performance analysis of a receiver-side fluid antenna system (single RF
//! chain, `N` selectable ports) under spatially correlated Rician fading.
//!
//! The crate is split into the numerical kernels ([`specfun`], [`quad`]),
//! the port geometry and fading parameterization ([`channel`]), the
//! analytical metrics ([`analysis`]) and a Monte Carlo simulator
//! ([`montecarlo`]) that serves as the ground truth for every analytical
//! result.
//!
//! All thresholds are linear, normalized SNR values; dB conversion is left
//! to callers.

// `!(x > 0.0)` style checks are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
