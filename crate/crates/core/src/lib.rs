//! Generalized mutual information of Gaussian channels under memoryless
//! transceiver distortion.
//!
//! The crate covers binary and multi-bit symmetric output quantization,
//! transmit-side nonlinearities, super-Nyquist sampling with one-bit
//! outputs, and seeded Monte-Carlo checks of all closed forms.

pub mod error;
pub mod gmi;
pub mod numerics;
pub mod quantizer;
pub mod simlab;
pub mod supernyq;

pub use error::{Error, Result};
