//! Graph families used for continuous-time walks, the Kronecker-structure
//! convolutions that shrink them while keeping the walk dynamics, and the
//! quantum / classical evolutions that check it.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! experiment orchestration live in the `graphfold` companion crate.
//!
//! Units: `ħ = Ω = 1`, so times and rates are dimensionless.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod convolve;
pub mod dynamics;
mod error;
pub mod graph;
pub mod linalg;
pub mod race;

pub use error::{Error, Result};

pub use num_complex::Complex64;
