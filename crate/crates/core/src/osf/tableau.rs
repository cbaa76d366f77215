//! Phase-exact stabilizer states.
//!
//! A state is held as a destabilizer/stabilizer tableau together with one
//! basis index in its support (the anchor) and the exact amplitude there.
//! The tableau fixes the state up to a global phase; the anchor amplitude
//! pins that phase, so overlaps come out exact, not just up to phase.

use std::fmt;

use num_complex::Complex64 as C64;

use super::pauli::PauliString;
use crate::circuits::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::numkit::Pauli;
use crate::opspace::{Factor, FactorSpec};

/// `0` or `2^{-h/2}·ω^k` with `ω = e^{iπ/4}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExactAmp {
    Zero,
    Value { h: i32, k: u8 },
}

impl ExactAmp {
    pub const ONE: ExactAmp = ExactAmp::Value { h: 0, k: 0 };

    pub fn is_zero(self) -> bool {
        self == ExactAmp::Zero
    }

    pub fn to_c64(self) -> C64 {
        match self {
            ExactAmp::Zero => C64::new(0.0, 0.0),
            ExactAmp::Value { h, k } => {
                let mag = (0.5f64).powf(h as f64 / 2.0);
                C64::from_polar(mag, std::f64::consts::FRAC_PI_4 * k as f64)
            }
        }
    }

    /// Multiplies by `ω^k`.
    pub fn mul_omega(self, k: u8) -> Self {
        match self {
            ExactAmp::Zero => ExactAmp::Zero,
            ExactAmp::Value { h, k: k0 } => ExactAmp::Value { h, k: (k0 + k) & 7 },
        }
    }

    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (ExactAmp::Value { h: h1, k: k1 }, ExactAmp::Value { h: h2, k: k2 }) => {
                ExactAmp::Value { h: h1 + h2, k: (k1 + k2) & 7 }
            }
            _ => ExactAmp::Zero,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            ExactAmp::Zero => ExactAmp::Zero,
            ExactAmp::Value { h, k } => ExactAmp::Value { h, k: (8 - k) & 7 },
        }
    }

    pub fn neg(self) -> Self {
        self.mul_omega(4)
    }

    /// `(a + b)/√2` for two amplitudes of equal magnitude (or zero), as
    /// always holds for amplitudes of one stabilizer state.
    pub fn half_sum(a: Self, b: Self) -> Self {
        match (a, b) {
            (ExactAmp::Zero, ExactAmp::Zero) => ExactAmp::Zero,
            (ExactAmp::Value { h, k }, ExactAmp::Zero) | (ExactAmp::Zero, ExactAmp::Value { h, k }) => {
                ExactAmp::Value { h: h + 1, k }
            }
            (ExactAmp::Value { h: ha, k: ka }, ExactAmp::Value { h: hb, k: kb }) => {
                assert_eq!(ha, hb, "stabilizer amplitudes of unequal magnitude");
                match (kb + 8 - ka) & 7 {
                    0 => ExactAmp::Value { h: ha - 1, k: ka },
                    4 => ExactAmp::Zero,
                    2 => ExactAmp::Value { h: ha, k: (ka + 1) & 7 },
                    6 => ExactAmp::Value { h: ha, k: (ka + 7) & 7 },
                    d => panic!("relative phase ω^{d} cannot occur in a stabilizer state"),
                }
            }
        }
    }
}

impl fmt::Display for ExactAmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (h, k) = match *self {
            ExactAmp::Zero => return f.write_str("0"),
            ExactAmp::Value { h, k } => (h, k),
        };
        let mag = match h {
            0 => "1".to_string(),
            1 => "1/√2".to_string(),
            _ if h > 0 && h % 2 == 0 => format!("1/{}", 1u128.checked_shl((h / 2) as u32).map_or(format!("2^{}", h / 2), |v| v.to_string())),
            _ if h > 0 => format!("1/({}·√2)", 1u128.checked_shl(((h - 1) / 2) as u32).map_or(format!("2^{}", (h - 1) / 2), |v| v.to_string())),
            _ => format!("2^({}/2)", -h),
        };
        match k {
            0 => write!(f, "{mag}"),
            2 => write!(f, "i·{mag}"),
            4 => write!(f, "-{mag}"),
            6 => write!(f, "-i·{mag}"),
            _ => write!(f, "e^(iπ·{k}/4)·{mag}"),
        }
    }
}

fn bits_get(v: &[u64], q: usize) -> bool {
    (v[q / 64] >> (q % 64)) & 1 == 1
}

fn bits_set(v: &mut [u64], q: usize, b: bool) {
    let mask = 1u64 << (q % 64);
    if b {
        v[q / 64] |= mask;
    } else {
        v[q / 64] &= !mask;
    }
}

fn parity_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() % 2 == 1
}

/// Reduced row echelon form of a commuting generating set over the X part,
/// with full Pauli products tracked so phases stay exact.
struct XEchelon {
    rows: Vec<PauliString>,
    pivots: Vec<usize>,
}

impl XEchelon {
    fn new(gens: &[PauliString], m: usize) -> Self {
        let mut rows: Vec<PauliString> = gens.to_vec();
        let mut pivots = Vec::new();
        let mut r = 0;
        for q in 0..m {
            let Some(found) = (r..rows.len()).find(|&i| rows[i].x_bit(q)) else {
                continue;
            };
            rows.swap(r, found);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.x_bit(q) {
                    row.mul_assign_right(&pivot_row);
                }
            }
            pivots.push(q);
            r += 1;
        }
        rows.truncate(r);
        Self { rows, pivots }
    }

    /// Group element whose X part equals `target`, if one exists.
    fn combine(&self, target: &[u64], m: usize) -> Option<PauliString> {
        let mut rem = target.to_vec();
        let mut acc = PauliString::identity(m);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if bits_get(&rem, p) {
                acc.mul_assign_right(row);
                for (w, x) in rem.iter_mut().zip(row.x_words()) {
                    *w ^= x;
                }
            }
        }
        rem.iter().all(|&w| w == 0).then_some(acc)
    }
}

/// `⟨x0 ⊕ x_g| g |x0⟩` as a power of `ω`, for `g = i^k X^{x} Z^{z}·i^{|x∧z|}`.
fn transition_phase(g: &PauliString, x0: &[u64]) -> u8 {
    let k = 2 * (g.phase() as u32 + g.y_count()) + if parity_and(g.z_words(), x0) { 4 } else { 0 };
    (k % 8) as u8
}

/// Power of `ω` picked up by `|bits⟩` under a monomial Clifford.
fn monomial_omega(kind: GateKind, bits: usize) -> u8 {
    let b0 = bits & 1 == 1;
    match kind {
        GateKind::Y => if b0 { 6 } else { 2 },
        GateKind::Z => if b0 { 4 } else { 0 },
        GateKind::S => if b0 { 2 } else { 0 },
        GateKind::SDG => if b0 { 6 } else { 0 },
        GateKind::CZ => if bits == 3 { 4 } else { 0 },
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerState {
    m: usize,
    stab: Vec<PauliString>,
    destab: Vec<PauliString>,
    anchor: Vec<u64>,
    amp: ExactAmp,
}

impl StabilizerState {
    /// `|0…0⟩` on `m` qubits.
    pub fn zero(m: usize) -> Self {
        Self {
            m,
            stab: (0..m).map(|q| PauliString::single(m, q, Pauli::Z)).collect(),
            destab: (0..m).map(|q| PauliString::single(m, q, Pauli::X)).collect(),
            anchor: vec![0; m.div_ceil(64).max(1)],
            amp: ExactAmp::ONE,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destab
    }

    /// A basis index in the support (as bit words) and its exact amplitude.
    pub fn anchor(&self) -> (&[u64], ExactAmp) {
        (&self.anchor, self.amp)
    }

    /// Multiplies the state by `ω^k`.
    pub fn mul_global_phase(&mut self, k: u8) {
        self.amp = self.amp.mul_omega(k);
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        if g.max_qubit() >= self.m {
            return Err(Error::invalid(format!("gate {g} out of range for {} qubits", self.m)));
        }
        if !g.kind().is_clifford() {
            return Err(Error::UnsupportedGate {
                gate: g.to_string(),
                context: "stabilizer tableau",
            });
        }
        Ok(())
    }

    fn local_anchor_bits(&self, qubits: &[usize]) -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &q)| acc | (usize::from(bits_get(&self.anchor, q)) << t))
    }

    fn set_local_anchor_bits(&mut self, qubits: &[usize], local: usize) {
        for (t, &q) in qubits.iter().enumerate() {
            bits_set(&mut self.anchor, q, (local >> t) & 1 == 1);
        }
    }

    /// Applies a Clifford gate acting on this register directly.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        self.check_gate(g)?;
        if g.kind() == GateKind::H {
            self.update_anchor_hadamard(g.qubits()[0]);
        } else {
            let local = self.local_anchor_bits(g.qubits());
            let (out, _) = g.kind().monomial_action(local);
            self.amp = self.amp.mul_omega(monomial_omega(g.kind(), local));
            self.set_local_anchor_bits(g.qubits(), out);
        }
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            row.conjugate_by(g).expect("checked Clifford gate");
        }
        Ok(())
    }

    fn update_anchor_hadamard(&mut self, q: usize) {
        let mut flip = vec![0u64; self.anchor.len()];
        bits_set(&mut flip, q, true);
        let partner = XEchelon::new(&self.stab, self.m)
            .combine(&flip, self.m)
            .map(|g| self.amp.mul_omega(transition_phase(&g, &self.anchor)))
            .unwrap_or(ExactAmp::Zero);
        let (a0, a1) = if bits_get(&self.anchor, q) {
            (partner, self.amp)
        } else {
            (self.amp, partner)
        };
        let plus = ExactAmp::half_sum(a0, a1);
        if !plus.is_zero() {
            bits_set(&mut self.anchor, q, false);
            self.amp = plus;
        } else {
            bits_set(&mut self.anchor, q, true);
            self.amp = ExactAmp::half_sum(a0, a1.neg());
        }
    }

    /// Applies `g` on row qubits `q` and `g*` on column qubits `q + n`,
    /// i.e. `U ⊗ U*` in the vectorized picture with `m = 2n`.
    pub fn apply_doubled_gate(&mut self, g: &Gate) -> Result<()> {
        if self.m % 2 != 0 {
            return Err(Error::invalid("doubled gates need an even register"));
        }
        let n = self.m / 2;
        if g.max_qubit() >= n {
            return Err(Error::invalid(format!("gate {g} out of range for {n} qubits")));
        }
        self.check_gate(g)?;
        let conj_kind = match g.kind() {
            GateKind::S => GateKind::SDG,
            GateKind::SDG => GateKind::S,
            k => k,
        };
        let shifted: Vec<usize> = g.qubits().iter().map(|q| q + n).collect();
        self.apply_gate(g)?;
        self.apply_gate(&Gate::new(conj_kind, &shifted)?)?;
        if g.kind() == GateKind::Y {
            // Y* = −Y
            self.amp = self.amp.neg();
        }
        debug_assert!(self.validate().is_ok(), "{:?}", self.validate());
        Ok(())
    }

    /// Applies a Clifford given by its images of `X_t`, `Z_t` on `qubits`
    /// (`t` local), which must also act monomially: `action[b] = (b', k)`
    /// means `|b⟩ ↦ ω^k |b'⟩` in local bits.
    pub(crate) fn apply_tableau_gate(
        &mut self,
        qubits: &[usize],
        x_images: &[PauliString],
        z_images: &[PauliString],
        action: &[(usize, u8)],
    ) -> Result<()> {
        if qubits.iter().any(|&q| q >= self.m) {
            return Err(Error::invalid("tableau gate out of range"));
        }
        let local = self.local_anchor_bits(qubits);
        let (out, k) = action[local];
        self.amp = self.amp.mul_omega(k);
        self.set_local_anchor_bits(qubits, out);
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            conjugate_local(row, qubits, x_images, z_images);
        }
        Ok(())
    }

    /// Exact amplitude `⟨x|ψ⟩` with `x` given as bit words.
    pub fn amplitude(&self, x: &[u64]) -> ExactAmp {
        self.amplitude_with(&XEchelon::new(&self.stab, self.m), x)
    }

    fn amplitude_with(&self, ech: &XEchelon, x: &[u64]) -> ExactAmp {
        let diff: Vec<u64> = x.iter().zip(&self.anchor).map(|(a, b)| a ^ b).collect();
        match ech.combine(&diff, self.m) {
            Some(g) => self.amp.mul_omega(transition_phase(&g, &self.anchor)),
            None => ExactAmp::Zero,
        }
    }

    pub fn amplitude_index(&self, x: usize) -> ExactAmp {
        let mut words = vec![0u64; self.anchor.len()];
        words[0] = x as u64;
        self.amplitude(&words)
    }

    /// Dense state vector, basis index bit `q` = qubit `q`. Small `m` only.
    pub fn to_statevector(&self) -> Vec<C64> {
        assert!(self.m <= 20, "dense expansion limited to 20 qubits");
        let ech = XEchelon::new(&self.stab, self.m);
        (0..1usize << self.m)
            .map(|x| {
                let mut words = vec![0u64; self.anchor.len()];
                words[0] = x as u64;
                self.amplitude_with(&ech, &words).to_c64()
            })
            .collect()
    }

    /// Checks the tableau relations: stabilizers Hermitian and commuting,
    /// destabilizers commuting, `D_i` anticommuting with `S_i` only, and the
    /// anchor amplitude nonzero and consistent with Z-type stabilizers.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::invalid(format!("invalid tableau: {msg}")));
        if self.stab.len() != self.m || self.destab.len() != self.m {
            return fail("wrong generator count".into());
        }
        if self.amp.is_zero() {
            return fail("anchor amplitude is zero".into());
        }
        for i in 0..self.m {
            if !self.stab[i].is_hermitian() {
                return fail(format!("stabilizer {i} not Hermitian"));
            }
            for j in 0..self.m {
                if j > i && !self.stab[i].commutes_with(&self.stab[j]) {
                    return fail(format!("stabilizers {i},{j} anticommute"));
                }
                if j > i && !self.destab[i].commutes_with(&self.destab[j]) {
                    return fail(format!("destabilizers {i},{j} anticommute"));
                }
                let anti = !self.destab[i].commutes_with(&self.stab[j]);
                if anti != (i == j) {
                    return fail(format!("destabilizer {i} vs stabilizer {j}"));
                }
            }
            if !self.stab[i].has_x_part() {
                let k = transition_phase(&self.stab[i], &self.anchor);
                if k != 0 {
                    return fail(format!("anchor not a +1 eigenstate of {}", self.stab[i]));
                }
            }
        }
        Ok(())
    }
}

/// `P ← C P C†` for a local Clifford `C` given by generator images.
pub(crate) fn conjugate_local(row: &mut PauliString, qubits: &[usize], x_images: &[PauliString], z_images: &[PauliString]) {
    let k = qubits.len();
    let mut acc = PauliString::identity(k);
    let mut extra = 0u8;
    for (t, &q) in qubits.iter().enumerate() {
        let (x, z) = (row.x_bit(q), row.z_bit(q));
        if x {
            acc.mul_assign_right(&x_images[t]);
        }
        if z {
            acc.mul_assign_right(&z_images[t]);
        }
        if x && z {
            // Y = i·X·Z
            extra += 1;
        }
    }
    // letters = i^{extra}·Π X^x Z^z, and the image keeps that prefactor
    row.add_phase(acc.phase() + (extra & 3));
    for (t, &q) in qubits.iter().enumerate() {
        row.set_x(q, acc.x_bit(t));
        row.set_z(q, acc.z_bit(t));
    }
}

/// Stabilizer state of the vectorized product operator described by
/// `spec` on `2n` qubits. Ket-bra factors give computational basis states,
/// Pauli factors give Bell pairs `vec(P/√2)`. The global phase matches
/// `vectorize(from_factors(spec))` exactly.
pub fn stab_from_basis_operator(spec: &FactorSpec) -> Result<StabilizerState> {
    let n = spec.n();
    if n == 0 {
        return Err(Error::invalid("empty operator spec"));
    }
    let mut st = StabilizerState::zero(2 * n);
    for (q, f) in spec.factors().iter().enumerate() {
        match *f {
            Factor::KetBra(i, j) => {
                if i == 1 {
                    st.apply_gate(&Gate::one(GateKind::X, q))?;
                }
                if j == 1 {
                    st.apply_gate(&Gate::one(GateKind::X, q + n))?;
                }
            }
            Factor::Pauli(p) => {
                st.apply_gate(&Gate::one(GateKind::H, q))?;
                st.apply_gate(&Gate::two(GateKind::CX, q, q + n))?;
                let kind = match p {
                    Pauli::I => GateKind::I,
                    Pauli::X => GateKind::X,
                    Pauli::Y => GateKind::Y,
                    Pauli::Z => GateKind::Z,
                };
                st.apply_gate(&Gate::one(kind, q))?;
            }
            Factor::Custom(_) => {
                return Err(Error::invalid(
                    "custom factors have no stabilizer description; use ket-bra or Pauli factors",
                ))
            }
        }
    }
    Ok(st)
}

/// Exact `⟨a|b⟩`.
///
/// A Clifford `C` that maps `b` to a basis state `|z⟩` is built from `b`'s
/// stabilizers (X-part elimination, CX to isolate pivots, S to turn pivot
/// Y into X, CZ to clear Z entries, then H on the pivots) and applied to
/// both states; the overlap is then `conj(⟨z|Ca⟩)·⟨z|Cb⟩`.
pub fn inner_product_exact(a: &StabilizerState, b: &StabilizerState) -> Result<ExactAmp> {
    if a.m != b.m {
        return Err(Error::invalid(format!("register sizes differ: {} vs {}", a.m, b.m)));
    }
    let m = a.m;
    let mut a = a.clone();
    let mut b = b.clone();
    let ech = XEchelon::new(&b.stab, m);
    let mut rows = ech.rows;
    let pivots = ech.pivots;

    let apply = |g: Gate, a: &mut StabilizerState, b: &mut StabilizerState, rows: &mut Vec<PauliString>| -> Result<()> {
        a.apply_gate(&g)?;
        b.apply_gate(&g)?;
        for r in rows.iter_mut() {
            r.conjugate_by(&g)?;
        }
        Ok(())
    };

    for i in 0..rows.len() {
        let p = pivots[i];
        for c in 0..m {
            if c != p && rows[i].x_bit(c) {
                apply(Gate::two(GateKind::CX, p, c), &mut a, &mut b, &mut rows)?;
            }
        }
    }
    for i in 0..rows.len() {
        let p = pivots[i];
        if rows[i].z_bit(p) {
            apply(Gate::one(GateKind::S, p), &mut a, &mut b, &mut rows)?;
        }
    }
    for i in 0..rows.len() {
        let p = pivots[i];
        for c in 0..m {
            if c != p && rows[i].z_bit(c) {
                apply(Gate::two(GateKind::CZ, p, c), &mut a, &mut b, &mut rows)?;
            }
        }
    }
    for &p in &pivots {
        apply(Gate::one(GateKind::H, p), &mut a, &mut b, &mut rows)?;
    }
    debug_assert!(b.stab.iter().all(|s| !s.has_x_part()));
    let (z, bz) = b.anchor();
    Ok(a.amplitude(z).conj().mul(bz))
}

pub fn inner_product(a: &StabilizerState, b: &StabilizerState) -> Result<C64> {
    Ok(inner_product_exact(a, b)?.to_c64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{circuit_unitary, random_gates, Circuit};
    use crate::opspace::{from_factors, random, vectorize};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const CLIFFORD: [GateKind; 9] = [
        GateKind::H, GateKind::S, GateKind::SDG, GateKind::CX, GateKind::CZ,
        GateKind::SWAP, GateKind::X, GateKind::Y, GateKind::Z,
    ];

    fn dense_apply(psi: &[C64], c: &Circuit) -> Vec<C64> {
        circuit_unitary(c).mul_vec(psi)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn random_state(m: usize, gates: usize, rng: &mut ChaCha8Rng) -> (StabilizerState, Vec<C64>) {
        let c = random_gates(m, gates, &CLIFFORD, rng).unwrap();
        let mut st = StabilizerState::zero(m);
        for g in &c.gates {
            st.apply_gate(g).unwrap();
            st.validate().unwrap();
        }
        let mut psi = vec![C64::new(0.0, 0.0); 1 << m];
        psi[0] = C64::new(1.0, 0.0);
        (st, dense_apply(&psi, &c))
    }

    #[test]
    fn exact_amp_arithmetic() {
        let a = ExactAmp::Value { h: 1, k: 0 };
        assert_eq!(ExactAmp::half_sum(a, a), ExactAmp::ONE);
        assert_eq!(ExactAmp::half_sum(a, a.neg()), ExactAmp::Zero);
        let s = ExactAmp::half_sum(a, a.mul_omega(2));
        assert!((s.to_c64() - (a.to_c64() + a.mul_omega(2).to_c64()) / 2f64.sqrt()).norm() < 1e-15);
        assert_eq!(ExactAmp::Value { h: 3, k: 6 }.to_string(), "-i·1/(2·√2)");
        assert_eq!(ExactAmp::Value { h: 2, k: 4 }.to_string(), "-1/2");
    }

    #[test]
    fn ketbra_and_pauli_states() {
        let st = stab_from_basis_operator(&"k00".parse().unwrap()).unwrap();
        let stabs: Vec<String> = st.stabilizers().iter().map(|s| s.to_string()).collect();
        assert_eq!(stabs, vec!["+ZI", "+IZ"]);

        let st = stab_from_basis_operator(&"X".parse().unwrap()).unwrap();
        let mut set: Vec<PauliString> = st.stabilizers().to_vec();
        // the generated group contains XX and −ZZ
        let prod = set[0].mul(&set[1]);
        set.push(prod);
        let strs: Vec<String> = set.iter().map(|s| s.to_string()).collect();
        assert!(strs.contains(&"+XX".to_string()), "{strs:?}");
        assert!(strs.contains(&"-ZZ".to_string()), "{strs:?}");
        st.validate().unwrap();
    }

    #[test]
    fn basis_operator_states_match_vectorization() {
        for spec in ["X", "Y", "Z", "I", "k01", "X,k10", "Y,Z,k11", "ketbra:011,101", "pauli:XYZY"] {
            let spec: FactorSpec = spec.parse().unwrap();
            let st = stab_from_basis_operator(&spec).unwrap();
            st.validate().unwrap();
            let v = vectorize(&from_factors(&spec).unwrap());
            assert!(close(&st.to_statevector(), v.amplitudes(), 1e-14), "{spec}");
        }
        let custom = FactorSpec(vec![Factor::Custom([C64::new(1.0, 0.0); 4])]);
        assert!(stab_from_basis_operator(&custom).is_err());
    }

    #[test]
    fn gates_track_dense_state_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 1..=5 {
            for _ in 0..10 {
                let (st, psi) = random_state(m, 30, &mut rng);
                assert!(close(&st.to_statevector(), &psi, 1e-12));
            }
        }
    }

    #[test]
    fn doubled_hadamard_on_zero_projector() {
        let mut st = stab_from_basis_operator(&"k00".parse().unwrap()).unwrap();
        st.apply_doubled_gate(&Gate::one(GateKind::H, 0)).unwrap();
        let plus = crate::opspace::DenseOperator::new(1, crate::numkit::ComplexMatrix::from_fn(2, 2, |_, _| C64::new(1.0, 0.0))).unwrap();
        assert!(close(&st.to_statevector(), vectorize(&plus).amplitudes(), 1e-14));
    }

    #[test]
    fn doubled_cliffords_match_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 3;
        for _ in 0..50 {
            let spec = random::product_spec(n, &mut rng);
            let c = random_gates(n, 20, &CLIFFORD, &mut rng).unwrap();
            let mut st = stab_from_basis_operator(&spec).unwrap();
            for g in &c.gates {
                st.apply_doubled_gate(g).unwrap();
            }
            st.validate().unwrap();
            let o = crate::circuits::apply_circuit(&from_factors(&spec).unwrap(), &c).unwrap();
            assert!(close(&st.to_statevector(), vectorize(&o).amplitudes(), 1e-12));
        }
    }

    #[test]
    fn doubled_cliffords_keep_bell_states_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_gates(3, 40, &CLIFFORD, &mut rng).unwrap();
        let mut st = stab_from_basis_operator(&"pauli:XYZ".parse().unwrap()).unwrap();
        for g in &c.gates {
            st.apply_doubled_gate(g).unwrap();
        }
        let o = crate::opspace::devectorize(&crate::opspace::VecState::new(3, st.to_statevector()).unwrap()).unwrap();
        assert!(crate::resources::bbc_entropy(&o, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let x = stab_from_basis_operator(&"X".parse().unwrap()).unwrap();
        let k00 = stab_from_basis_operator(&"k00".parse().unwrap()).unwrap();
        let k01 = stab_from_basis_operator(&"k01".parse().unwrap()).unwrap();
        assert_eq!(inner_product_exact(&k00, &x).unwrap(), ExactAmp::Zero);
        assert_eq!(inner_product_exact(&k01, &x).unwrap(), ExactAmp::Value { h: 1, k: 0 });
    }

    #[test]
    fn overlaps_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let m = rng.random_range(1..=8);
            let (a, pa) = random_state(m, 25, &mut rng);
            let (b, pb) = random_state(m, 25, &mut rng);
            let dense: C64 = pa.iter().zip(&pb).map(|(x, y)| x.conj() * y).sum();
            let exact = inner_product_exact(&a, &b).unwrap();
            assert!((exact.to_c64() - dense).norm() < 1e-12, "{exact} vs {dense}");
            let back = inner_product_exact(&b, &a).unwrap();
            assert_eq!(back, exact.conj());
            assert_eq!(inner_product_exact(&a, &a).unwrap(), ExactAmp::ONE);
        }
    }

    #[test]
    fn wide_registers_work() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 100;
        let c = random_gates(m, 400, &CLIFFORD, &mut rng).unwrap();
        let mut st = StabilizerState::zero(m);
        for g in &c.gates {
            st.apply_gate(g).unwrap();
        }
        st.validate().unwrap();
        assert_eq!(inner_product_exact(&st, &st).unwrap(), ExactAmp::ONE);
    }

    #[test]
    fn non_clifford_rejected() {
        let mut st = StabilizerState::zero(2);
        assert!(matches!(st.apply_gate(&Gate::one(GateKind::T, 0)), Err(Error::UnsupportedGate { .. })));
        assert!(st.apply_doubled_gate(&Gate::one(GateKind::H, 1)).is_err());
    }
}
