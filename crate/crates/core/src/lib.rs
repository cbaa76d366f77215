//! Classical simulation of the conjugation dynamics `U·O·U†` in the
//! vectorization (Choi-state) picture.
//!
//! An `n`-qubit operator `O` is mapped to the `2n`-qubit vector
//! `|O⟩ = Σ o_ij |i⟩|j⟩`, on which conjugation acts as `U ⊗ U*`. In that space
//! the crate measures five resources:
//!
//! - space entanglement (SE): operator Schmidt spectrum across a qubit cut;
//! - time entanglement (TE): singular values of `O` itself;
//! - Fourier time entanglement (FTE): Walsh–Hadamard transform of the TE
//!   spectrum;
//! - computational-basis coherence (CBC): the distribution `|o_ij|²`;
//! - Bell-basis coherence (BBC): the Pauli-coefficient distribution.
//!
//! All five are reported as Rényi entropies in bits. Around them sit a small
//! gate/circuit IR ([`circuits`]), an operator stabilizer formalism in the
//! doubled space ([`osf`]) and the experiment harness ([`lab`]) that checks the
//! entropy inequalities relating the measures and regenerates the sweep data.
//!
//! Conventions used throughout:
//!
//! - qubit `k` is bit `k` of a basis index (little-endian);
//! - matrices are stored row-major;
//! - the vectorized amplitude of `|i⟩|j⟩` lives at index `i + 2^n·j`, so the
//!   row register occupies doubled-space qubits `0..n` and the column register
//!   `n..2n`;
//! - Pauli strings are indexed base 4 with digit `k` for qubit `k`
//!   (`0:I, 1:X, 2:Y, 3:Z`).

pub mod circuits;
pub mod error;
pub mod lab;
pub mod numkit;
pub mod opspace;
pub mod osf;
pub mod resources;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
