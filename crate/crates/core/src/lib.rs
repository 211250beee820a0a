//! Simulation and verification library for the staggered MISO block-fading
//! wiretap channel.
//!
//! The block-stacked compound channel model lives in [`channel`], the linear
//! transmit strategies in [`precoding`], closed-form Gaussian secrecy rates and
//! the worst-case search in [`rate`], and secrecy degrees-of-freedom formulas
//! and slope fitting in [`dof`]. [`experiment`] drives configurable power
//! sweeps and writes CSV/JSON results.

pub mod channel;
pub mod dof;
mod error;
pub mod exec;
pub mod experiment;
pub mod linalg;
pub mod precoding;
pub mod rate;
mod seed;

pub use error::{Error, Result};
pub use seed::derive_seed;
