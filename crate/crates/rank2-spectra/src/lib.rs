//! Spectral measures of Sp(2) and SO(5) fusion graphs over the maximal torus.

pub mod error;
pub mod fusion;
pub mod measures;
pub mod modular;
pub mod torus;
pub mod verify;
pub mod weights1d;
pub mod weyl;

pub use error::{Error, Result};
