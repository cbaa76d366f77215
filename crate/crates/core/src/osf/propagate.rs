//! Sparse Pauli-basis representation of an operator and its evolution
//! under Clifford+T circuits.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::pauli::PauliString;
use crate::circuits::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::numkit::{self, Pauli};
use crate::opspace::DenseOperator;
use crate::resources::{self, Spectrum};

/// Coefficients at or below this magnitude are dropped after merging.
pub const PRUNE: f64 = 1e-14;

/// `O = 2^{-n/2} Σ_P c_P P` over Hermitian Pauli strings `P`, kept sorted
/// by string.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(PauliString, C64)>,
}

fn digit_string(n: usize, mut idx: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set_letter(q, Pauli::from_digit(idx & 3));
        idx >>= 2;
    }
    p
}

impl PauliSum {
    /// Absorbs each string's prefactor into its coefficient, merges equal
    /// strings and prunes.
    pub fn from_terms(n: usize, terms: Vec<(PauliString, C64)>) -> Result<Self> {
        if let Some((p, _)) = terms.iter().find(|(p, _)| p.m() != n) {
            return Err(Error::invalid(format!("term {p} is not on {n} qubits")));
        }
        let terms = terms
            .into_iter()
            .map(|(p, c)| (p.unsigned(), c * p.prefactor()))
            .collect();
        let mut s = Self { n, terms };
        s.canonicalize();
        Ok(s)
    }

    pub fn from_dense(o: &DenseOperator) -> Result<Self> {
        let b = numkit::pauli_coefficients(o.matrix(), o.n())?;
        let terms = b
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > PRUNE)
            .map(|(i, &c)| (digit_string(o.n(), i), c))
            .collect();
        Ok(Self { n: o.n(), terms })
    }

    /// `X^{⊗s}⊗|0⟩⟨0|^{⊗(n−s)}` normalized, `X` on qubits `0..s`; its
    /// expansion is `X^{⊗s}` times every `{I, Z}` string on the rest.
    pub fn x_then_zero(n: usize, s: usize) -> Result<Self> {
        if s > n || n == 0 {
            return Err(Error::invalid(format!("need 0 ≤ s ≤ n, n ≥ 1 (got s={s}, n={n})")));
        }
        let rest = n - s;
        if rest > 30 {
            return Err(Error::invalid("too many |0⟩⟨0| factors for an explicit expansion"));
        }
        let c = C64::new((0.5f64).powf(rest as f64 / 2.0), 0.0);
        let terms = (0..1usize << rest)
            .map(|mask| {
                let mut p = PauliString::identity(n);
                for q in 0..s {
                    p.set_letter(q, Pauli::X);
                }
                for t in 0..rest {
                    if (mask >> t) & 1 == 1 {
                        p.set_letter(s + t, Pauli::Z);
                    }
                }
                (p, c)
            })
            .collect();
        let mut sum = Self { n, terms };
        sum.canonicalize();
        Ok(sum)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(PauliString, C64)] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn coefficient(&self, p: &PauliString) -> C64 {
        let key = p.unsigned();
        match self.terms.binary_search_by(|(q, _)| q.cmp(&key)) {
            Ok(i) => self.terms[i].1 * p.prefactor().conj(),
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(PauliString, C64)> = Vec::with_capacity(self.terms.len());
        for (p, c) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((q, acc)) if *q == p => *acc += c,
                _ => merged.push((p, c)),
            }
        }
        merged.retain(|(_, c)| c.norm() > PRUNE);
        self.terms = merged;
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        if self.n > 12 {
            return Err(Error::invalid("dense reassembly limited to 12 qubits"));
        }
        let mut b = vec![C64::new(0.0, 0.0); 1usize << (2 * self.n)];
        for (p, c) in &self.terms {
            let idx = (0..self.n).fold(0usize, |acc, q| acc | (p.letter(q).digit() << (2 * q)));
            b[idx] += c;
        }
        DenseOperator::new_unnormalized(self.n, numkit::from_pauli_coefficients(&b, self.n)?)
    }

    /// `|c_P|²` distribution.
    pub fn bbc_spectrum(&self) -> Result<Spectrum> {
        Spectrum::from_weights(self.terms.iter().map(|(_, c)| c.norm_sqr()).collect())
    }

    /// Operator Schmidt weights across `cut`. Pauli strings factor across
    /// any cut, so the realigned coefficient matrix is indexed by the
    /// letters on each side.
    pub fn se_spectrum(&self, cut: &[usize]) -> Result<Spectrum> {
        let rest = numkit::cut_complement(self.n, cut)?;
        let key = |p: &PauliString, qs: &[usize]| -> u64 {
            qs.iter()
                .enumerate()
                .fold(0u64, |acc, (t, &q)| acc | ((p.letter(q).digit() as u64) << (2 * t)))
        };
        if cut.len() > 32 || rest.len() > 32 {
            return Err(Error::invalid("cut side too wide for packed keys"));
        }
        let entries: Vec<(u64, u64, C64)> = self
            .terms
            .iter()
            .map(|(p, c)| (key(p, cut), key(p, &rest), *c))
            .collect();
        resources::sparse_schmidt_spectrum(&entries)
    }

    fn apply_clifford(&mut self, g: &Gate) -> Result<()> {
        for (p, c) in &mut self.terms {
            p.conjugate_by(g)?;
            if p.phase() == 2 {
                *c = -*c;
            }
            p.set_phase(0);
        }
        Ok(())
    }

    /// Splits every term with an X or Y on the target of a `T`/`T†`.
    fn apply_t(&mut self, q: usize, dagger: bool) {
        let r = FRAC_1_SQRT_2;
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for (p, c) in self.terms.drain(..) {
            let letter = p.letter(q);
            if !matches!(letter, Pauli::X | Pauli::Y) {
                out.push((p, c));
                continue;
            }
            // T: X ↦ (X+Y)/√2, Y ↦ (−X+Y)/√2; T†: X ↦ (X−Y)/√2, Y ↦ (X+Y)/√2
            let (cx, cy) = match (letter, dagger) {
                (Pauli::X, false) => (1.0, 1.0),
                (Pauli::Y, false) => (-1.0, 1.0),
                (Pauli::X, true) => (1.0, -1.0),
                _ => (1.0, 1.0),
            };
            let mut px = p.clone();
            px.set_letter(q, Pauli::X);
            let mut py = p;
            py.set_letter(q, Pauli::Y);
            out.push((px, c * (cx * r)));
            out.push((py, c * (cy * r)));
        }
        self.terms = out;
        self.canonicalize();
    }

    /// Number of terms a `T` on `q` would produce before merging.
    fn split_count(&self, q: usize) -> usize {
        self.terms
            .iter()
            .map(|(p, _)| if p.x_bit(q) { 2 } else { 1 })
            .sum()
    }
}

/// Evolves `O ↦ U·O·U†` term by term. Clifford gates permute and re-sign
/// strings; each `T`/`T†` splits strings carrying X or Y on its target.
/// Fails with a resource-limit error once the term count would pass
/// `max_terms`, and rejects `CCX`.
pub fn heisenberg_propagate(p: &PauliSum, c: &Circuit, max_terms: usize) -> Result<PauliSum> {
    if c.n != p.n {
        return Err(Error::invalid(format!(
            "circuit acts on {} qubits, operator has {}",
            c.n, p.n
        )));
    }
    let mut out = p.clone();
    let mut t_applied = 0;
    for (gi, g) in c.gates.iter().enumerate() {
        match g.kind() {
            GateKind::T | GateKind::TDG => {
                let q = g.qubits()[0];
                let would = out.split_count(q);
                if would > max_terms {
                    return Err(Error::ResourceLimit {
                        terms: would,
                        limit: max_terms,
                        gates_applied: gi,
                        t_applied,
                    });
                }
                out.apply_t(q, g.kind() == GateKind::TDG);
                t_applied += 1;
            }
            GateKind::CCX => {
                return Err(Error::UnsupportedGate {
                    gate: g.to_string(),
                    context: "Pauli-sum propagation",
                })
            }
            _ => out.apply_clifford(g)?,
        }
    }
    out.canonicalize();
    Ok(out)
}
