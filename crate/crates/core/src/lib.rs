//! Finite rings, their additive characters, and Fourier spectra of polynomial
//! graphs and hyperbolas over them.

pub mod arith;
pub mod budget;
pub mod dual;
pub mod error;
pub mod fourier;
pub mod poly;
pub mod ring;
pub mod structure;
pub mod variety;
pub mod verify;

pub use budget::Budget;
pub use error::{Error, Result};
pub use ring::{Element, Ring, RingSpec};
