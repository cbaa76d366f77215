//! Operator stabilizer formalism: vectorized operators as stabilizer
//! states on `2n` doubled qubits, Pauli-sum propagation through
//! Clifford+T circuits, and two circuit classes with efficient exact
//! simulation.

pub mod iqp;
pub mod pauli;
pub mod propagate;
pub mod tableau;
pub mod xy;

pub use iqp::{magic_iqp_dense, magic_iqp_exact, magic_iqp_value};
pub use pauli::PauliString;
pub use propagate::{heisenberg_propagate, PauliSum};
pub use tableau::{inner_product, inner_product_exact, stab_from_basis_operator, ExactAmp, StabilizerState};
pub use xy::{
    check_xy_preserving, xy_encode_circuit, xy_simulate, xy_simulate_exact, EncodedCircuit, EncodedGate,
    LocalClifford, XyCircuit, XyGate,
};
