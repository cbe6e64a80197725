//! Quantum quadratic operators on the 2x2 complex matrices.
//!
//! An operator `Δ: M₂ → M₂ ⊗ M₂` of Haar form is determined by 27 real
//! coefficients. This crate evaluates such operators in the Pauli basis,
//! certifies positivity and Kadison-Schwarz type conditions, and iterates
//! the induced dynamics on the Bloch ball.

pub mod dense;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod format;
pub mod ks;
pub mod operator;
mod par;
pub mod pauli;
pub mod report;
pub mod sampling;
pub mod tolerance;
pub mod vec3;

pub use error::{Error, Result};
pub use operator::{apply_delta, b_matrix, QqoTensor, TensorSquareElement};
pub use pauli::{PauliElement, StateVec};
pub use tolerance::{ScanConfig, Tolerances};
