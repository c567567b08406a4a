//! Saturation engines for bounded-width resolution and polynomial calculus,
//! together with the structures and encoders used to exercise them.

pub mod algebra;
pub mod cfi;
pub mod encoders;
pub mod error;
pub mod games;
pub mod harness;
pub mod logic;
pub mod pc;
pub mod resolution;
pub mod wl;

pub use error::{Error, Result};
