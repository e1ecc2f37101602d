//! Hamiltonicity, minimal cycle covers and uniform sampling of Hamiltonian
//! cycles on grid graphs, via height functions and local square moves.

pub mod error;
pub mod fixtures;
pub mod chain;
pub mod cover;
pub mod grid;
pub mod hamilton;
pub mod height;
pub mod oracle;
pub mod render;
pub mod sampler;

pub use error::{Error, Result};
