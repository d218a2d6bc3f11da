//! Exact one-shot capacity bounds for classical-to-GPT channels over
//! polyhedral cones.
//!
//! All certified quantities are exact rationals computed by an exact simplex
//! solver. Floating point appears only in display columns (`-log2`, bits).

pub mod error;
pub mod rational;
pub mod lp;
pub mod cone;
pub mod gpt;
pub mod sampling;
pub mod hypothesis;
pub mod capacity;
pub mod asymptotic;
pub mod io;
pub mod report;

pub use error::{Error, Result};
pub use rational::{Rational, Vector};
