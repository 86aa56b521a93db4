//! Feedback-aided coded caching for the `K`-user MISO broadcast channel with
//! small caches.
//!
//! - [`analysis`]: closed-form delivery time, CSIT breakpoints, the converse
//!   bound and gap ratios, CSIT savings, audits.
//! - [`scheme`]: the disjoint placement, order-2 XOR set and the `2K - 1`
//!   phase delivery schedule.
//! - [`simulator`]: bit-exact end-to-end run of the scheme over a lossless
//!   scheduled pipe.

pub mod analysis;
pub mod error;
pub mod harmonic;
pub mod params;
pub mod rational;
mod scalar;
pub mod scheme;
pub mod simulator;

pub use analysis::{Alpha, PerformancePoint, RegimeTag};
pub use error::{Error, Result};
pub use params::{validate_params, SystemParams};
pub use rational::{Rational, Value};
pub use scalar::Scalar;
