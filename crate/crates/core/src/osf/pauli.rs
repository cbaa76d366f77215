//! Phase-tracked Pauli strings in symplectic form.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::circuits::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::numkit::{ComplexMatrix, Pauli};

/// `i^phase · ⊗_q P_q` over `m` qubits, with `P_q` read from `(x_q, z_q)` and
/// `Y = iXZ` Hermitian.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    m: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

#[inline]
fn words(m: usize) -> usize {
    m.div_ceil(64).max(1)
}

#[inline]
fn bit(v: &[u64], q: usize) -> bool {
    (v[q / 64] >> (q % 64)) & 1 == 1
}

#[inline]
fn set_bit(v: &mut [u64], q: usize, b: bool) {
    let mask = 1u64 << (q % 64);
    if b {
        v[q / 64] |= mask;
    } else {
        v[q / 64] &= !mask;
    }
}

impl PauliString {
    pub fn identity(m: usize) -> Self {
        Self {
            m,
            x: vec![0; words(m)],
            z: vec![0; words(m)],
            phase: 0,
        }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, l) in letters.iter().enumerate() {
            p.set_letter(q, *l);
        }
        p
    }

    /// Single letter `l` on qubit `q`.
    pub fn single(m: usize, q: usize, l: Pauli) -> Self {
        let mut p = Self::identity(m);
        p.set_letter(q, l);
        p
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Exponent `k` of the `i^k` prefactor.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, k: u8) {
        self.phase = k & 3;
    }

    pub fn add_phase(&mut self, k: u8) {
        self.phase = (self.phase + k) & 3;
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.add_phase(2);
        p
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        bit(&self.x, q)
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        bit(&self.z, q)
    }

    #[inline]
    pub fn set_x(&mut self, q: usize, b: bool) {
        set_bit(&mut self.x, q, b)
    }

    #[inline]
    pub fn set_z(&mut self, q: usize, b: bool) {
        set_bit(&mut self.z, q, b)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set_letter(&mut self, q: usize, l: Pauli) {
        let (x, z) = l.bits();
        self.set_x(q, x);
        self.set_z(q, z);
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.m).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn has_x_part(&self) -> bool {
        self.x.iter().any(|&w| w != 0)
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum()
    }

    /// Hermitian iff the prefactor is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Letters only, phase reset to `+1`.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    /// Real sign of a Hermitian string; `None` if the prefactor is `±i`.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn prefactor(&self) -> C64 {
        [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][self.phase as usize]
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        assert_eq!(self.m, other.m);
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        acc % 2 == 0
    }

    /// `self · other`, phase exact.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.mul_assign_right(other);
        out
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &Self) {
        assert_eq!(self.m, other.m);
        let mut plus = 0i64;
        let mut minus = 0i64;
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (xa, ya, za) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (xb, yb, zb) = (x2 & !z2, x2 & z2, !x2 & z2);
            // XY = iZ, YZ = iX, ZX = iY and the reverse orders give −i
            plus += ((xa & yb) | (ya & zb) | (za & xb)).count_ones() as i64;
            minus += ((xa & zb) | (ya & xb) | (za & yb)).count_ones() as i64;
            self.x[w] = x1 ^ x2;
            self.z[w] = z1 ^ z2;
        }
        let k = self.phase as i64 + other.phase as i64 + plus - minus;
        self.phase = k.rem_euclid(4) as u8;
    }

    /// Conjugates in place, `P ← g P g†`, for a Clifford gate on this
    /// string's qubits.
    pub fn conjugate_by(&mut self, g: &Gate) -> Result<()> {
        let q = g.qubits();
        if q.iter().any(|&a| a >= self.m) {
            return Err(Error::invalid(format!("gate {g} out of range for {} qubits", self.m)));
        }
        match g.kind() {
            GateKind::I => {}
            GateKind::X => self.flip_if(self.z_bit(q[0])),
            GateKind::Z => self.flip_if(self.x_bit(q[0])),
            GateKind::Y => self.flip_if(self.x_bit(q[0]) ^ self.z_bit(q[0])),
            GateKind::H => self.h(q[0]),
            GateKind::S => self.s(q[0]),
            GateKind::SDG => self.sdg(q[0]),
            GateKind::CX => self.cx(q[0], q[1]),
            GateKind::CZ => {
                self.h(q[1]);
                self.cx(q[0], q[1]);
                self.h(q[1]);
            }
            GateKind::SWAP => {
                let (a, b) = (q[0], q[1]);
                let (xa, za, xb, zb) = (self.x_bit(a), self.z_bit(a), self.x_bit(b), self.z_bit(b));
                self.set_x(a, xb);
                self.set_z(a, zb);
                self.set_x(b, xa);
                self.set_z(b, za);
            }
            GateKind::T | GateKind::TDG | GateKind::CCX => {
                return Err(Error::UnsupportedGate {
                    gate: g.to_string(),
                    context: "Pauli conjugation (non-Clifford)",
                })
            }
        }
        Ok(())
    }

    #[inline]
    fn flip_if(&mut self, b: bool) {
        if b {
            self.add_phase(2);
        }
    }

    #[inline]
    pub(crate) fn h(&mut self, a: usize) {
        let (x, z) = (self.x_bit(a), self.z_bit(a));
        self.flip_if(x && z);
        self.set_x(a, z);
        self.set_z(a, x);
    }

    #[inline]
    pub(crate) fn s(&mut self, a: usize) {
        let (x, z) = (self.x_bit(a), self.z_bit(a));
        self.flip_if(x && z);
        self.set_z(a, z ^ x);
    }

    #[inline]
    pub(crate) fn sdg(&mut self, a: usize) {
        let (x, z) = (self.x_bit(a), self.z_bit(a));
        self.flip_if(x && !z);
        self.set_z(a, z ^ x);
    }

    #[inline]
    pub(crate) fn cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x_bit(c), self.z_bit(c), self.x_bit(t), self.z_bit(t));
        self.flip_if(xc && zt && !(xt ^ zc));
        self.set_x(t, xt ^ xc);
        self.set_z(c, zc ^ zt);
    }

    /// Restriction to `qubits` (in that order), phase dropped.
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        let mut p = Self::identity(qubits.len());
        for (t, &q) in qubits.iter().enumerate() {
            p.set_x(t, self.x_bit(q));
            p.set_z(t, self.z_bit(q));
        }
        p
    }

    /// Dense `2^m × 2^m` matrix, qubit `q` on bit `q`. For tests and small
    /// `m` only.
    pub fn to_matrix(&self) -> ComplexMatrix {
        assert!(self.m <= 12);
        let mut out = ComplexMatrix::identity(1);
        for q in (0..self.m).rev() {
            out = out.kron(&self.letter(q).matrix());
        }
        out.scale(self.prefactor())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for q in 0..self.m {
            write!(f, "{}", self.letter(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Optional sign prefix (`+`, `-`, `+i`, `-i`, `i`) followed by one
    /// letter per qubit, character `k` on qubit `k`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i").or_else(|| t.strip_prefix("i")) {
            (1, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else {
            (0, t.strip_prefix('+').unwrap_or(t))
        };
        if rest.is_empty() {
            return Err(Error::invalid(format!("empty Pauli string {s:?}")));
        }
        let letters = rest
            .chars()
            .map(|c| Pauli::from_letter(c).ok_or_else(|| Error::invalid(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Self::from_letters(&letters);
        p.phase = phase;
        Ok(p)
    }
}
