//! Circuits whose Heisenberg dynamics keep `X^{⊗n}` inside the span of
//! X/Y-only Pauli strings.
//!
//! Writing `X ↦ |0⟩`, `Y ↦ |1⟩` per qubit, such an evolution acts on the
//! coefficient vector over `{X, Y}^n` as a Clifford circuit on an n-qubit
//! register: `T` becomes `H·Z`, `T†` becomes `Z·H`, and every preserving
//! Clifford becomes the signed permutation it induces on X/Y strings.

use std::fmt;

use num_complex::Complex64 as C64;

use super::pauli::PauliString;
use super::tableau::{ExactAmp, StabilizerState};
use crate::circuits::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Pauli};

/// A Clifford on at most three qubits, given by the images of `X_t` and
/// `Z_t` for each local qubit `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalClifford {
    name: String,
    qubits: Vec<usize>,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

const MAX_LOCAL: usize = 3;

impl LocalClifford {
    pub fn from_gate(g: &Gate) -> Result<Self> {
        if !g.kind().is_clifford() {
            return Err(Error::UnsupportedGate {
                gate: g.to_string(),
                context: "local Clifford tableau",
            });
        }
        let qubits = g.qubits().to_vec();
        let k = qubits.len();
        let local = Gate::new(g.kind(), &(0..k).collect::<Vec<_>>())?;
        let image = |l: Pauli, t: usize| -> Result<PauliString> {
            let mut p = PauliString::single(k, t, l);
            p.conjugate_by(&local)?;
            Ok(p)
        };
        let x_images = (0..k).map(|t| image(Pauli::X, t)).collect::<Result<_>>()?;
        let z_images = (0..k).map(|t| image(Pauli::Z, t)).collect::<Result<_>>()?;
        Ok(Self { name: g.to_string(), qubits, x_images, z_images })
    }

    /// Checks that the images are Hermitian, on `k` qubits, and satisfy
    /// the Pauli commutation relations, so they define a Clifford.
    pub fn from_images(
        name: impl Into<String>,
        qubits: Vec<usize>,
        x_images: Vec<PauliString>,
        z_images: Vec<PauliString>,
    ) -> Result<Self> {
        let k = qubits.len();
        if k == 0 || k > MAX_LOCAL {
            return Err(Error::invalid(format!("local Clifford must act on 1..={MAX_LOCAL} qubits")));
        }
        let mut seen = qubits.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != k {
            return Err(Error::invalid("repeated qubit in local Clifford"));
        }
        if x_images.len() != k || z_images.len() != k {
            return Err(Error::invalid("need one X image and one Z image per qubit"));
        }
        let all: Vec<&PauliString> = x_images.iter().chain(&z_images).collect();
        if all.iter().any(|p| p.m() != k || !p.is_hermitian() || p.is_identity_letters()) {
            return Err(Error::invalid("images must be Hermitian non-identity strings on the gate's qubits"));
        }
        for a in 0..k {
            for b in 0..k {
                let xz = x_images[a].commutes_with(&z_images[b]);
                if xz == (a == b)
                    || (a < b && !x_images[a].commutes_with(&x_images[b]))
                    || (a < b && !z_images[a].commutes_with(&z_images[b]))
                {
                    return Err(Error::invalid("images violate the Pauli commutation relations"));
                }
            }
        }
        Ok(Self { name: name.into(), qubits, x_images, z_images })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn k(&self) -> usize {
        self.qubits.len()
    }

    /// `C P C†` for a string `P` on the gate's local qubits.
    pub fn conjugate(&self, p: &PauliString) -> PauliString {
        let mut out = p.clone();
        let local: Vec<usize> = (0..self.k()).collect();
        super::tableau::conjugate_local(&mut out, &local, &self.x_images, &self.z_images);
        out
    }

    fn xy_string(&self, f: usize) -> PauliString {
        let letters: Vec<Pauli> = (0..self.k())
            .map(|t| if (f >> t) & 1 == 1 { Pauli::Y } else { Pauli::X })
            .collect();
        PauliString::from_letters(&letters)
    }

    /// First full-support X/Y string whose image leaves the X/Y span. Every
    /// string evolved from `X^{⊗n}` has full support, so no other inputs
    /// matter.
    pub fn xy_violation(&self) -> Option<(PauliString, PauliString)> {
        (0..1usize << self.k()).find_map(|f| {
            let p = self.xy_string(f);
            let img = self.conjugate(&p);
            let ok = (0..self.k()).all(|t| matches!(img.letter(t), Pauli::X | Pauli::Y));
            (!ok).then_some((p, img))
        })
    }

    /// Signed permutation on local X/Y indices: `f ↦ (π(f), ±1)`.
    fn signed_permutation(&self) -> Result<Vec<(usize, bool)>> {
        if let Some((input, image)) = self.xy_violation() {
            return Err(Error::NotXyPreserving {
                gate: self.name.clone(),
                input: input.to_string(),
                image: image.to_string(),
            });
        }
        Ok((0..1usize << self.k())
            .map(|f| {
                let img = self.conjugate(&self.xy_string(f));
                let g = (0..self.k()).fold(0, |acc, t| acc | (usize::from(img.letter(t) == Pauli::Y) << t));
                (g, img.phase() == 2)
            })
            .collect())
    }
}

impl fmt::Display for LocalClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Whether the gate maps every X/Y-only string on its support to a signed
/// X/Y-only string.
pub fn check_xy_preserving(g: &LocalClifford) -> bool {
    g.xy_violation().is_none()
}

#[derive(Clone, Debug, PartialEq)]
pub enum XyGate {
    T(usize),
    Tdg(usize),
    Clifford(LocalClifford),
}

#[derive(Clone, Debug, PartialEq)]
pub struct XyCircuit {
    pub n: usize,
    pub gates: Vec<XyGate>,
}

impl XyCircuit {
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn push(&mut self, g: XyGate) -> Result<()> {
        let bad = match &g {
            XyGate::T(q) | XyGate::Tdg(q) => *q >= self.n,
            XyGate::Clifford(c) => c.qubits().iter().any(|&q| q >= self.n),
        };
        if bad {
            return Err(Error::invalid(format!("gate out of range for {} qubits", self.n)));
        }
        self.gates.push(g);
        Ok(())
    }

    /// `T`/`T†` stay as such, Clifford gates become tableaus, `CCX` is
    /// rejected.
    pub fn from_circuit(c: &Circuit) -> Result<Self> {
        let mut out = Self::new(c.n);
        for g in &c.gates {
            let xg = match g.kind() {
                GateKind::T => XyGate::T(g.qubits()[0]),
                GateKind::TDG => XyGate::Tdg(g.qubits()[0]),
                _ => XyGate::Clifford(LocalClifford::from_gate(g)?),
            };
            out.push(xg)?;
        }
        Ok(out)
    }
}

/// Gate of the encoded register.
#[derive(Clone, Debug, PartialEq)]
pub enum EncodedGate {
    Std(Gate),
    Tableau {
        qubits: Vec<usize>,
        x_images: Vec<PauliString>,
        z_images: Vec<PauliString>,
        action: Vec<(usize, u8)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodedCircuit {
    pub n: usize,
    pub gates: Vec<EncodedGate>,
}

/// Pauli string equal to `m`, or `None` if `m` is not a phased Pauli.
fn dense_to_pauli(m: &ComplexMatrix, k: usize) -> Option<PauliString> {
    let b = numkit::pauli_coefficients(m, k).ok()?;
    let scale = (1usize << k) as f64;
    let (idx, c) = b.iter().enumerate().find(|(_, c)| (c.norm_sqr() - scale).abs() < 1e-9)?;
    let c = c / scale.sqrt();
    let phase = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
        .iter()
        .position(|w| (w - c).norm() < 1e-9)?;
    let mut p = PauliString::identity(k);
    for t in 0..k {
        p.set_letter(t, Pauli::from_digit((idx >> (2 * t)) & 3));
    }
    p.set_phase(phase as u8);
    Some(p)
}

fn encode_clifford(g: &LocalClifford) -> Result<EncodedGate> {
    let perm = g.signed_permutation()?;
    let k = g.k();
    let dim = 1usize << k;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (f, &(to, neg)) in perm.iter().enumerate() {
        m.as_mut_slice()[to * dim + f] = C64::new(if neg { -1.0 } else { 1.0 }, 0.0);
    }
    let md = m.adjoint();
    let image = |l: Pauli, t: usize| -> Result<PauliString> {
        let p = PauliString::single(k, t, l).to_matrix();
        dense_to_pauli(&m.matmul(&p).matmul(&md), k)
            .ok_or_else(|| Error::invalid(format!("encoding of {g} is not Clifford")))
    };
    Ok(EncodedGate::Tableau {
        qubits: g.qubits().to_vec(),
        x_images: (0..k).map(|t| image(Pauli::X, t)).collect::<Result<_>>()?,
        z_images: (0..k).map(|t| image(Pauli::Z, t)).collect::<Result<_>>()?,
        action: perm.into_iter().map(|(to, neg)| (to, if neg { 4 } else { 0 })).collect(),
    })
}

/// Translates to the encoded register. Fails on the first gate that lets
/// an X/Y string escape.
pub fn xy_encode_circuit(c: &XyCircuit) -> Result<EncodedCircuit> {
    let mut gates = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        match g {
            XyGate::T(q) => {
                gates.push(EncodedGate::Std(Gate::one(GateKind::Z, *q)));
                gates.push(EncodedGate::Std(Gate::one(GateKind::H, *q)));
            }
            XyGate::Tdg(q) => {
                gates.push(EncodedGate::Std(Gate::one(GateKind::H, *q)));
                gates.push(EncodedGate::Std(Gate::one(GateKind::Z, *q)));
            }
            XyGate::Clifford(lc) if lc.name().starts_with("SWAP") && lc.k() == 2 => {
                // SWAP permutes letters without signs, so it encodes to itself
                gates.push(EncodedGate::Std(Gate::two(GateKind::SWAP, lc.qubits()[0], lc.qubits()[1])));
            }
            XyGate::Clifford(lc) => gates.push(encode_clifford(lc)?),
        }
    }
    Ok(EncodedCircuit { n: c.n, gates })
}

/// Exact `2^{-n} Tr(F·U X^{⊗n} U†)` for Hermitian `F`.
pub fn xy_simulate_exact(n: usize, c: &XyCircuit, final_pauli: &PauliString) -> Result<ExactAmp> {
    if c.n != n || final_pauli.m() != n {
        return Err(Error::invalid(format!(
            "circuit ({}) and final Pauli ({}) must act on {n} qubits",
            c.n,
            final_pauli.m()
        )));
    }
    if !final_pauli.is_hermitian() {
        return Err(Error::invalid("final Pauli must be Hermitian"));
    }
    let enc = xy_encode_circuit(c)?;
    if (0..n).any(|q| !matches!(final_pauli.letter(q), Pauli::X | Pauli::Y)) {
        // the evolved operator has no weight outside the X/Y span
        return Ok(ExactAmp::Zero);
    }
    let mut st = StabilizerState::zero(n);
    for g in &enc.gates {
        match g {
            EncodedGate::Std(g) => st.apply_gate(g)?,
            EncodedGate::Tableau { qubits, x_images, z_images, action } => {
                st.apply_tableau_gate(qubits, x_images, z_images, action)?
            }
        }
    }
    // the Y bits of the final string select the encoded basis state
    let target: Vec<u64> = final_pauli.x_words().iter().zip(final_pauli.z_words()).map(|(x, z)| x & z).collect();
    let amp = st.amplitude(&target);
    Ok(if final_pauli.phase() == 2 { amp.neg() } else { amp })
}

pub fn xy_simulate(n: usize, c: &XyCircuit, final_pauli: &PauliString) -> Result<f64> {
    Ok(xy_simulate_exact(n, c, final_pauli)?.to_c64().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{circuit_unitary, random_gates};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lc(kind: GateKind, qs: &[usize]) -> LocalClifford {
        LocalClifford::from_gate(&Gate::new(kind, qs).unwrap()).unwrap()
    }

    fn dense_value(c: &Circuit, f: &PauliString) -> f64 {
        let n = c.n;
        let u = circuit_unitary(c);
        let x = PauliString::from_letters(&vec![Pauli::X; n]).to_matrix();
        let t = f.to_matrix().matmul(&u).matmul(&x).matmul(&u.adjoint()).trace();
        t.re / (1usize << n) as f64
    }

    #[test]
    fn preservation_checks() {
        assert!(check_xy_preserving(&lc(GateKind::SWAP, &[0, 1])));
        assert!(check_xy_preserving(&lc(GateKind::S, &[0])));
        assert!(check_xy_preserving(&lc(GateKind::CZ, &[0, 1])));
        assert!(check_xy_preserving(&lc(GateKind::Z, &[0])));
        assert!(!check_xy_preserving(&lc(GateKind::CX, &[0, 1])));
        let h = lc(GateKind::H, &[0]);
        assert!(!check_xy_preserving(&h));
        let (input, image) = h.xy_violation().unwrap();
        assert_eq!(input.to_string(), "+X");
        assert_eq!(image.to_string(), "+Z");
    }

    #[test]
    fn encoding_h_names_gate_and_pauli() {
        let c = XyCircuit::from_circuit(&Circuit::parse("T 0\nH 0", Some(1)).unwrap()).unwrap();
        match xy_encode_circuit(&c) {
            Err(Error::NotXyPreserving { gate, input, image }) => {
                assert_eq!((gate.as_str(), input.as_str(), image.as_str()), ("H 0", "+X", "+Z"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn from_images_validates() {
        let p = |s: &str| s.parse::<PauliString>().unwrap();
        assert!(LocalClifford::from_images("ok", vec![0], vec![p("Y")], vec![p("Z")]).is_ok());
        assert!(LocalClifford::from_images("bad", vec![0], vec![p("Z")], vec![p("Z")]).is_err());
        assert!(LocalClifford::from_images("bad", vec![0], vec![p("iX")], vec![p("Z")]).is_err());
    }

    #[test]
    fn t_swap_circuits_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            for _ in 0..15 {
                let kinds: &[GateKind] = if n == 1 { &[GateKind::T] } else { &[GateKind::T, GateKind::SWAP, GateKind::TDG] };
                let c = random_gates(n, 4 * n + 3, kinds, &mut rng).unwrap();
                let xc = XyCircuit::from_circuit(&c).unwrap();
                for _ in 0..6 {
                    let letters: Vec<Pauli> = (0..n).map(|_| [Pauli::X, Pauli::Y][rng.random_range(0..2)]).collect();
                    let mut f = PauliString::from_letters(&letters);
                    if rng.random_bool(0.3) {
                        f.set_phase(2);
                    }
                    let a = xy_simulate(n, &xc, &f).unwrap();
                    let b = dense_value(&c, &f);
                    assert!((a - b).abs() < 1e-10, "n={n} {f}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn preserving_cliffords_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kinds = [GateKind::T, GateKind::SWAP, GateKind::S, GateKind::CZ, GateKind::SDG, GateKind::Y, GateKind::TDG];
        for n in 2..=4 {
            for _ in 0..10 {
                let c = random_gates(n, 5 * n, &kinds, &mut rng).unwrap();
                let xc = XyCircuit::from_circuit(&c).unwrap();
                for f in 0..1usize << n {
                    let letters: Vec<Pauli> = (0..n).map(|q| if (f >> q) & 1 == 1 { Pauli::Y } else { Pauli::X }).collect();
                    let p = PauliString::from_letters(&letters);
                    let a = xy_simulate(n, &xc, &p).unwrap();
                    assert!((a - dense_value(&c, &p)).abs() < 1e-10);
                }
                let z = PauliString::from_letters(&vec![Pauli::Z; n]);
                assert_eq!(xy_simulate(n, &xc, &z).unwrap(), 0.0);
                assert!(dense_value(&c, &z).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn custom_three_qubit_tableau() {
        // CZ(0,1)·CZ(1,2)·S(2) written as generator images
        let c = Circuit::parse("CZ 0 1\nCZ 1 2\nS 2", Some(3)).unwrap();
        let img = |l: Pauli, t: usize| {
            let mut p = PauliString::single(3, t, l);
            for g in c.gates.iter() {
                p.conjugate_by(g).unwrap();
            }
            p
        };
        let gate = LocalClifford::from_images(
            "C3",
            vec![2, 0, 1],
            (0..3).map(|t| img(Pauli::X, t)).collect(),
            (0..3).map(|t| img(Pauli::Z, t)).collect(),
        )
        .unwrap();
        assert!(check_xy_preserving(&gate));
        let mut xc = XyCircuit::new(3);
        for g in [XyGate::T(0), XyGate::T(1), XyGate::Clifford(gate), XyGate::Tdg(2), XyGate::T(0)] {
            xc.push(g).unwrap();
        }
        // dense version: local qubit t sits on global qubit [2,0,1][t]
        let map = [2usize, 0, 1];
        let mut dc = Circuit::parse("T 0\nT 1", Some(3)).unwrap();
        for g in &c.gates {
            let qs: Vec<usize> = g.qubits().iter().map(|&q| map[q]).collect();
            dc.push(Gate::new(g.kind(), &qs).unwrap()).unwrap();
        }
        dc.gates.extend(Circuit::parse("TDG 2\nT 0", Some(3)).unwrap().gates);
        for f in 0..8usize {
            let letters: Vec<Pauli> = (0..3).map(|q| if (f >> q) & 1 == 1 { Pauli::Y } else { Pauli::X }).collect();
            let p = PauliString::from_letters(&letters);
            assert!((xy_simulate(3, &xc, &p).unwrap() - dense_value(&dc, &p)).abs() < 1e-10);
        }
    }
}
