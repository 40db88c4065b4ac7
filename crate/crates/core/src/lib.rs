//! Numerical verification toolkit for de Branges-Rovnyak spaces `H(b)` built
//! from finite Blaschke products.

pub mod blaschke;
pub mod clark;
pub mod cyclic;
pub mod decomp;
mod error;
pub mod hardy;
pub mod hb;
pub mod poly;
pub mod scenario;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
