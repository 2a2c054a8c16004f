//! Eigenstates of the chaotic quartic oscillator
//! H = (px² + py²)/2 + x²y²/2 + β(x⁴ + y⁴)/4 in a basis of scar functions
//! built over its shortest unstable periodic orbits.

pub mod analysis;
pub mod basis;
pub mod classical;
mod error;
mod quad;
pub mod quantization;
pub mod reference;
pub mod wavefunctions;

pub use error::{Error, ParseError, Result};
