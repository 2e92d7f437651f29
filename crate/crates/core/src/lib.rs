//! Mean-field and exact small-N simulation of cooperative resonance
//! fluorescence from an atomic ensemble in a driven optical cavity.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod drift;
pub mod dynamics;
pub mod error;
pub mod fluctuations;
pub mod model;
pub mod steady;
pub mod numerics;
pub mod oracle;
pub mod plot;
pub mod runner;
pub mod table;

pub use error::{Error, Result};
