//! Entanglement, mixedness and nonlocality of two-qubit X states.
//!
//! The crate computes the concurrence `C`, purity `P` and CHSH maximum `B`
//! of two-qubit states, the remainder `R = B²/4 − P − C²` with its
//! region-wise closed forms, and the time evolution of two qubits coupled to
//! a common zero-temperature Lorentzian reservoir.
//!
//! The reservoir is represented by a single damped pseudomode, which makes
//! the reduced dynamics exact for initial states carrying at most two
//! excitations. Analytic closed forms for the super-radiant decay and the
//! lossless single-mode cavity are provided as oracles.
//!
//! Basis convention everywhere: `{|11⟩, |10⟩, |01⟩, |00⟩}`, qubit A is the
//! slow index and the pseudomode Fock index is the fastest.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod mems;
pub mod qmat;
pub mod quantifiers;
pub mod sample;
pub mod trajectory;

mod math;

pub use error::{DensityViolation, Error, Result};
pub use num_complex::Complex64;
pub use qmat::{ComplexMatrix, DensityMatrix};
pub use quantifiers::{CpbTriplet, Region, XState};
