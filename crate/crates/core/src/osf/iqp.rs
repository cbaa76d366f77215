//! Pauli-observable expectation for circuits `U = T^{⊗n}·U_c·T^{⊗n}` with
//! Clifford `U_c`.
//!
//! The value `2^{-n} Tr(X^{⊗n} U X^{⊗n} U†)` is an overlap in the doubled
//! space. Each outer `T` layer acts on the X-Bell pair as
//! `(T⊗T*)|X/√2⟩ = |(X+Y)/2⟩`, which is itself a stabilizer state:
//! `ω^{-1}·(S⊗I)|X/√2⟩`. The same holds on the left with `S†` and `ω`,
//! so the whole quantity is one exact stabilizer inner product.

use num_complex::Complex64 as C64;

use super::tableau::{inner_product_exact, stab_from_basis_operator, ExactAmp, StabilizerState};
use crate::circuits::{circuit_unitary, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::numkit::{ComplexMatrix, Pauli};
use crate::opspace::{Factor, FactorSpec};

fn x_bell(n: usize) -> Result<StabilizerState> {
    stab_from_basis_operator(&FactorSpec::uniform(n, Factor::Pauli(Pauli::X)))
}

/// `vec(((X+Y)/2)^{⊗n})` when `dagger` is false, `vec(((X−Y)/2)^{⊗n})`
/// otherwise.
pub fn t_absorbed_x_state(n: usize, dagger: bool) -> Result<StabilizerState> {
    let mut st = x_bell(n)?;
    let (kind, omega) = if dagger { (GateKind::SDG, 1u8) } else { (GateKind::S, 7u8) };
    for q in 0..n {
        st.apply_gate(&Gate::one(kind, q))?;
        st.mul_global_phase(omega);
    }
    Ok(st)
}

fn check_clifford(n: usize, uc: &Circuit) -> Result<()> {
    if uc.n != n {
        return Err(Error::invalid(format!("circuit acts on {} qubits, expected {n}", uc.n)));
    }
    if let Some(g) = uc.gates.iter().find(|g| !g.kind().is_clifford()) {
        return Err(Error::invalid(format!("magic-IQP core must be Clifford, found {g}")));
    }
    Ok(())
}

/// Exact value as `2^{-h/2}·ω^k`.
pub fn magic_iqp_exact(n: usize, uc: &Circuit) -> Result<ExactAmp> {
    check_clifford(n, uc)?;
    let left = t_absorbed_x_state(n, true)?;
    let mut right = t_absorbed_x_state(n, false)?;
    for g in &uc.gates {
        right.apply_doubled_gate(g)?;
    }
    inner_product_exact(&left, &right)
}

/// `2^{-n} Tr(X^{⊗n} U X^{⊗n} U†)` with `U = T^{⊗n} U_c T^{⊗n}`, in time
/// polynomial in `n`.
pub fn magic_iqp_value(n: usize, uc: &Circuit) -> Result<f64> {
    let v = magic_iqp_exact(n, uc)?.to_c64();
    debug_assert!(v.im.abs() < 1e-12, "expectation of a Hermitian product is real");
    Ok(v.re)
}

/// Same quantity from the dense unitary. For cross-checks at small `n`.
pub fn magic_iqp_dense(n: usize, uc: &Circuit) -> Result<f64> {
    check_clifford(n, uc)?;
    if n > 8 {
        return Err(Error::invalid("dense magic-IQP reference limited to 8 qubits"));
    }
    let mut full = Circuit::empty(n);
    for q in 0..n {
        full.push(Gate::one(GateKind::T, q))?;
    }
    full.gates.extend_from_slice(&uc.gates);
    for q in 0..n {
        full.push(Gate::one(GateKind::T, q))?;
    }
    let u = circuit_unitary(&full);
    let dim = 1usize << n;
    let mask = dim - 1;
    let xn = ComplexMatrix::from_fn(dim, dim, |i, j| C64::new(if i ^ j == mask { 1.0 } else { 0.0 }, 0.0));
    let t = xn.matmul(&u).matmul(&xn).matmul(&u.adjoint()).trace();
    Ok(t.re / dim as f64)
}
