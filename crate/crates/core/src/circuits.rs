//! Gate and circuit representation, conjugation `U·O·U†`, gate census,
//! free-family classification and seeded random circuit generation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix};
use crate::opspace::DenseOperator;
use crate::resources::{self, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    SDG,
    T,
    TDG,
    CX,
    CZ,
    SWAP,
    CCX,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::SDG,
        GateKind::T,
        GateKind::TDG,
        GateKind::CX,
        GateKind::CZ,
        GateKind::SWAP,
        GateKind::CCX,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::SWAP => 2,
            GateKind::CCX => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::SDG => "SDG",
            GateKind::T => "T",
            GateKind::TDG => "TDG",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
            GateKind::CCX => "CCX",
        }
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::T | GateKind::TDG | GateKind::CCX)
    }

    /// Maps basis states to phased basis states (no `H`).
    pub fn is_monomial(self) -> bool {
        self != GateKind::H
    }

    /// Local matrix, local index bit `t` on `qubits[t]`. `CX` is
    /// (control, target), `CCX` is (control, control, target).
    pub fn matrix(self) -> ComplexMatrix {
        let dim = 1usize << self.arity();
        if self == GateKind::H {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            return ComplexMatrix::from_fn(2, 2, |i, j| {
                C64::new(if i & j == 1 { -r } else { r }, 0.0)
            });
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (out, phase) = self.monomial_action(b);
            m[(out, b)] = phase;
        }
        m
    }

    /// Image `phase·|out⟩` of the local basis state `|bits⟩` under a
    /// monomial gate. Panics for `H`.
    pub fn monomial_action(self, bits: usize) -> (usize, C64) {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let b0 = bits & 1;
        match self {
            GateKind::I => (bits, one),
            GateKind::X => (bits ^ 1, one),
            GateKind::Y => (bits ^ 1, if b0 == 0 { i } else { -i }),
            GateKind::Z => (bits, if b0 == 0 { one } else { -one }),
            GateKind::S => (bits, if b0 == 0 { one } else { i }),
            GateKind::SDG => (bits, if b0 == 0 { one } else { -i }),
            GateKind::T => (bits, if b0 == 0 { one } else { C64::from_polar(1.0, std::f64::consts::FRAC_PI_4) }),
            GateKind::TDG => (bits, if b0 == 0 { one } else { C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4) }),
            GateKind::CX => (bits ^ ((bits & 1) << 1), one),
            GateKind::CZ => (bits, if bits == 3 { -one } else { one }),
            GateKind::SWAP => (((bits & 1) << 1) | ((bits >> 1) & 1), one),
            GateKind::CCX => (if bits & 3 == 3 { bits ^ 4 } else { bits }, one),
            GateKind::H => panic!("H is not monomial"),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        let k = match up.as_str() {
            "SDAG" | "SDG" => GateKind::SDG,
            "TDAG" | "TDG" => GateKind::TDG,
            "CNOT" | "CX" => GateKind::CX,
            "TOFFOLI" | "CCX" => GateKind::CCX,
            other => *GateKind::ALL
                .iter()
                .find(|k| k.name() == other)
                .ok_or_else(|| Error::invalid(format!("unknown gate kind {s:?}")))?,
        };
        Ok(k)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 3],
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::invalid(format!(
                "{kind} takes {} qubits, got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        for (a, &q) in qubits.iter().enumerate() {
            if qubits[..a].contains(&q) {
                return Err(Error::invalid(format!("{kind} has repeated qubit {q}")));
            }
        }
        let mut arr = [0; 3];
        arr[..qubits.len()].copy_from_slice(qubits);
        Ok(Self { kind, qubits: arr })
    }

    pub fn one(kind: GateKind, q: usize) -> Self {
        Self::new(kind, &[q]).expect("single-qubit kind")
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        Self::new(kind, &[a, b]).expect("two-qubit kind with distinct qubits")
    }

    #[inline]
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    #[inline]
    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn max_qubit(&self) -> usize {
        *self.qubits().iter().max().unwrap()
    }

    /// Gathers the local index of `basis` on this gate's qubits.
    #[inline]
    pub fn local_bits(&self, basis: usize) -> usize {
        numkit::gather_bits(basis, self.qubits())
    }

    /// Writes local bits back into `basis`.
    #[inline]
    pub fn scatter_bits(&self, basis: usize, local: usize) -> usize {
        self.qubits()
            .iter()
            .enumerate()
            .fold(basis, |acc, (t, &q)| (acc & !(1 << q)) | (((local >> t) & 1) << q))
    }

    /// Image `phase·|out⟩` of a full basis state under a monomial gate.
    #[inline]
    pub fn monomial_apply(&self, basis: usize) -> (usize, C64) {
        let (out, phase) = self.kind.monomial_action(self.local_bits(basis));
        (self.scatter_bits(basis, out), phase)
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
    /// Seed the circuit was generated from, if any.
    pub seed: Option<u64>,
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if let Some(g) = gates.iter().find(|g| g.max_qubit() >= n) {
            return Err(Error::invalid(format!("gate {g} out of range for {n} qubits")));
        }
        Ok(Self { n, gates, seed: None })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if g.max_qubit() >= self.n {
            return Err(Error::invalid(format!("gate {g} out of range for {} qubits", self.n)));
        }
        self.gates.push(g);
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.n != other.n {
            return Err(Error::invalid("cannot concatenate circuits of different width"));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Ok(Circuit {
            n: self.n,
            gates,
            seed: None,
        })
    }

    /// Parses the line format `KIND q0 [q1 [q2]]` with `#` comments. When `n`
    /// is `None` the width is one more than the largest qubit index.
    pub fn parse(text: &str, n: Option<usize>) -> Result<Self> {
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: lineno + 1, msg };
            let mut toks = line.split_whitespace();
            let kind: GateKind = toks.next().unwrap().parse().map_err(|e: Error| perr(e.to_string()))?;
            let qubits = toks
                .map(|t| t.parse::<usize>().map_err(|_| perr(format!("bad qubit index {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            gates.push(Gate::new(kind, &qubits).map_err(|e| perr(e.to_string()))?);
        }
        let width = gates.iter().map(|g| g.max_qubit() + 1).max().unwrap_or(0);
        let n = n.unwrap_or(width.max(1));
        Circuit::new(n, gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} qubits", self.n)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Circuit::parse(s, None)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateCensus {
    pub counts: BTreeMap<GateKind, usize>,
}

impl GateCensus {
    pub fn count(&self, k: GateKind) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn n_h(&self) -> usize {
        self.count(GateKind::H)
    }

    /// `T` and `T†` together.
    pub fn n_t(&self) -> usize {
        self.count(GateKind::T) + self.count(GateKind::TDG)
    }

    pub fn n_ccx(&self) -> usize {
        self.count(GateKind::CCX)
    }
}

pub fn census(c: &Circuit) -> GateCensus {
    let mut counts = BTreeMap::new();
    for g in &c.gates {
        *counts.entry(g.kind()).or_insert(0) += 1;
    }
    GateCensus { counts }
}

/// Free circuit families, decided syntactically by gate kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "F_zero")]
    Zero,
    #[serde(rename = "F_CBC")]
    Cbc,
    #[serde(rename = "F_BBC")]
    Bbc,
    #[serde(rename = "general")]
    General,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Zero => "F_zero",
            Family::Cbc => "F_CBC",
            Family::Bbc => "F_BBC",
            Family::General => "general",
        }
    }

    /// Generators used by [`random_family`].
    pub fn generators(self) -> &'static [GateKind] {
        match self {
            Family::Zero => &[GateKind::S, GateKind::CX],
            Family::Cbc => &[GateKind::CCX, GateKind::S, GateKind::CX],
            Family::Bbc => &[GateKind::H, GateKind::S, GateKind::CX],
            Family::General => &[],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f_zero" | "zero" => Ok(Family::Zero),
            "f_cbc" | "cbc" => Ok(Family::Cbc),
            "f_bbc" | "bbc" => Ok(Family::Bbc),
            "general" => Ok(Family::General),
            _ => Err(Error::invalid(format!("unknown family {s:?}"))),
        }
    }
}

fn in_zero_set(k: GateKind) -> bool {
    use GateKind::*;
    matches!(k, S | SDG | CX | CZ | SWAP | X | Y | Z | I)
}

pub fn family_of(c: &Circuit) -> Family {
    use GateKind::*;
    let kinds: Vec<GateKind> = c.gates.iter().map(|g| g.kind()).collect();
    if kinds.iter().all(|&k| in_zero_set(k)) {
        Family::Zero
    } else if kinds.iter().all(|&k| in_zero_set(k) || matches!(k, T | TDG | CCX)) {
        Family::Cbc
    } else if kinds.iter().all(|&k| in_zero_set(k) || k == H) {
        Family::Bbc
    } else {
        Family::General
    }
}

fn check_width(o_n: usize, c: &Circuit) -> Result<()> {
    if o_n != c.n {
        return Err(Error::invalid(format!(
            "circuit acts on {} qubits, operator has {o_n}",
            c.n
        )));
    }
    Ok(())
}

/// Applies the local matrix `g` (or its conjugate) to every strided vector
/// `buf[offset + stride·k]`, `k ∈ 0..dim`, for each offset in `offsets`.
fn apply_local(buf: &mut [C64], dim: usize, stride: usize, offsets: usize, gate: &Gate, g: &ComplexMatrix, conj: bool) {
    let k = gate.qubits().len();
    let ldim = 1usize << k;
    let mask: usize = gate.qubits().iter().map(|q| 1usize << q).sum();
    let local_offsets: Vec<usize> = (0..ldim).map(|l| gate.scatter_bits(0, l)).collect();
    let entries: Vec<C64> = g
        .as_slice()
        .iter()
        .map(|z| if conj { z.conj() } else { *z })
        .collect();
    let mut gathered = [C64::new(0.0, 0.0); 8];
    for base in 0..dim {
        if base & mask != 0 {
            continue;
        }
        for off in 0..offsets {
            let at = |l: usize| off + stride * (base | local_offsets[l]);
            for l in 0..ldim {
                gathered[l] = buf[at(l)];
            }
            for r in 0..ldim {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..ldim {
                    let e = entries[r * ldim + c];
                    if e.re != 0.0 || e.im != 0.0 {
                        acc += e * gathered[c];
                    }
                }
                buf[at(r)] = acc;
            }
        }
    }
}

/// Conjugates a full matrix in place by one gate: rows by `g`, columns by `g†`.
pub(crate) fn conjugate_in_place(m: &mut ComplexMatrix, gate: &Gate) {
    let dim = m.rows();
    let g = gate.kind().matrix();
    let buf = m.as_mut_slice();
    // U·O acts on the row index: stride `dim`, one pass per column
    apply_local(buf, dim, dim, dim, gate, &g, false);
    // (O·U†)_{ij} = Σ_k O_ik conj(U_jk): conj(U) on each row's column index
    for row in buf.chunks_mut(dim) {
        apply_local(row, dim, 1, 1, gate, &g, true);
    }
}

/// `U·O·U†`.
pub fn apply_circuit(o: &DenseOperator, c: &Circuit) -> Result<DenseOperator> {
    check_width(o.n(), c)?;
    let mut out = o.clone();
    for g in &c.gates {
        conjugate_in_place(out.matrix_mut(), g);
    }
    Ok(out)
}

/// Dense unitary of the whole circuit.
pub fn circuit_unitary(c: &Circuit) -> ComplexMatrix {
    let dim = 1usize << c.n;
    let mut u = ComplexMatrix::identity(dim);
    for g in &c.gates {
        let gm = g.kind().matrix();
        apply_local(u.as_mut_slice(), dim, dim, dim, g, &gm, false);
    }
    u
}

/// Operator kept as a list of nonzero matrix elements. Monomial gates map
/// each element to exactly one element, so the list length never grows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOperator {
    pub fn from_dense(o: &DenseOperator) -> Self {
        let dim = o.dim();
        let m = o.matrix();
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if m[(i, j)].norm_sqr() > 0.0 {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Self { n: o.n(), entries }
    }

    /// Builds from element triples. Duplicate positions are rejected.
    pub fn from_entries(n: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::invalid(format!("qubit count {n} outside 1..=63")));
        }
        let dim = 1usize << n;
        if entries.iter().any(|e| e.0 >= dim || e.1 >= dim) {
            return Err(Error::invalid("sparse entry index out of range"));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        if entries.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::invalid("duplicate sparse entry"));
        }
        Ok(Self { n, entries })
    }

    /// `X^{⊗s}⊗|0⟩⟨0|^{⊗(n−s)}` normalized, `X` on qubits `0..s`, without
    /// building the dense matrix.
    pub fn x_then_zero(n: usize, s: usize) -> Result<Self> {
        if s > n {
            return Err(Error::invalid(format!("s = {s} exceeds n = {n}")));
        }
        let amp = C64::new((0.5f64).powf(s as f64 / 2.0), 0.0);
        let full = (1usize << s) - 1;
        let entries = (0..1usize << s).map(|i| (i, i ^ full, amp)).collect();
        Self::from_entries(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if !g.kind().is_monomial() {
            return Err(Error::UnsupportedGate {
                gate: g.to_string(),
                context: "sparse monomial propagation",
            });
        }
        if g.max_qubit() >= self.n {
            return Err(Error::invalid(format!("gate {g} out of range for {} qubits", self.n)));
        }
        for e in &mut self.entries {
            let (i, pi) = g.monomial_apply(e.0);
            let (j, pj) = g.monomial_apply(e.1);
            *e = (i, j, e.2 * pi * pj.conj());
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        check_width(self.n, c)?;
        for g in &c.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        let dim = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for &(i, j, z) in &self.entries {
            m[(i, j)] += z;
        }
        DenseOperator::new_unnormalized(self.n, m)
    }

    /// Operator Schmidt weights across `cut` without densifying.
    pub fn se_spectrum(&self, cut: &[usize]) -> Result<Spectrum> {
        let rest = numkit::cut_complement(self.n, cut)?;
        let (na, nb) = (cut.len(), rest.len());
        let entries: Vec<(u64, u64, C64)> = self
            .entries
            .iter()
            .map(|&(i, j, z)| {
                let r = numkit::gather_bits(i, cut) | numkit::gather_bits(j, cut) << na;
                let c = numkit::gather_bits(i, &rest) | numkit::gather_bits(j, &rest) << nb;
                (r as u64, c as u64, z)
            })
            .collect();
        resources::sparse_schmidt_spectrum(&entries)
    }
}

/// ChaCha8 stream for one layer of one circuit.
fn layer_rng(seed: u64, layer: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(layer as u64);
    rng
}

/// Appends gates of the drawn kinds on random distinct qubits until every
/// qubit has been touched.
fn fill_layer<R: Rng>(n: usize, rng: &mut R, gates: &mut Vec<Gate>, mut draw_kind: impl FnMut(&mut R) -> GateKind) {
    let mut touched = vec![false; n];
    let mut left = n;
    while left > 0 {
        let kind = draw_kind(rng);
        let qs: Vec<usize> = sample(rng, n, kind.arity()).into_vec();
        for &q in &qs {
            if !std::mem::replace(&mut touched[q], true) {
                left -= 1;
            }
        }
        gates.push(Gate::new(kind, &qs).expect("distinct sampled qubits"));
    }
}

/// Kind probabilities for one draw of [`random_layered`]: CCX with `p_ccx`,
/// H with `p_h`, the remainder split evenly between CX and S. Kinds wider
/// than the register are dropped and the rest renormalized.
pub fn layered_kind_weights(n: usize, p_ccx: f64, p_h: f64) -> Vec<(GateKind, f64)> {
    let rest = (1.0 - p_ccx - p_h).max(0.0) / 2.0;
    let all = [
        (GateKind::CCX, p_ccx),
        (GateKind::H, p_h),
        (GateKind::CX, rest),
        (GateKind::S, rest),
    ];
    let kept: Vec<(GateKind, f64)> = all
        .into_iter()
        .filter(|&(k, p)| k.arity() <= n && p > 0.0)
        .collect();
    let total: f64 = kept.iter().map(|k| k.1).sum();
    if total <= 0.0 {
        return vec![(GateKind::S, 1.0)];
    }
    kept.into_iter().map(|(k, p)| (k, p / total)).collect()
}

fn draw_weighted<R: Rng>(rng: &mut R, weights: &[(GateKind, f64)]) -> GateKind {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(k, p) in weights {
        acc += p;
        if u < acc {
            return k;
        }
    }
    weights.last().unwrap().0
}

/// Layered random circuit over {CX, H, CCX, S}. Layer `ℓ` draws from its own
/// ChaCha8 stream, so the result depends only on `(n, depth, rates, seed)`.
pub fn random_layered(n: usize, depth: usize, p_ccx: f64, p_h: f64, seed: u64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::invalid("random circuit needs at least one qubit"));
    }
    if !(p_ccx >= 0.0 && p_h >= 0.0 && p_ccx + p_h <= 1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "rates must satisfy p_ccx, p_h ≥ 0 and p_ccx + p_h ≤ 1 (got {p_ccx}, {p_h})"
        )));
    }
    let weights = layered_kind_weights(n, p_ccx, p_h);
    let mut gates = Vec::new();
    for layer in 0..depth {
        let mut rng = layer_rng(seed, layer);
        fill_layer(n, &mut rng, &mut gates, |r| draw_weighted(r, &weights));
    }
    Ok(Circuit {
        n,
        gates,
        seed: Some(seed),
    })
}

/// Layered random circuit over the generators of `family`, kinds uniform.
pub fn random_family(family: Family, n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    if family == Family::General {
        return Err(Error::invalid("no generator set for the general family"));
    }
    if n == 0 {
        return Err(Error::invalid("random circuit needs at least one qubit"));
    }
    let kinds: Vec<GateKind> = family
        .generators()
        .iter()
        .copied()
        .filter(|k| k.arity() <= n)
        .collect();
    let mut gates = Vec::new();
    for layer in 0..depth {
        let mut rng = layer_rng(seed, layer);
        fill_layer(n, &mut rng, &mut gates, |r| kinds[r.random_range(0..kinds.len())]);
    }
    Ok(Circuit {
        n,
        gates,
        seed: Some(seed),
    })
}

/// Uniform random gates over `kinds` (no layer structure).
pub fn random_gates<R: Rng>(n: usize, count: usize, kinds: &[GateKind], rng: &mut R) -> Result<Circuit> {
    let kinds: Vec<GateKind> = kinds.iter().copied().filter(|k| k.arity() <= n).collect();
    if kinds.is_empty() {
        return Err(Error::invalid("no gate kind fits the register"));
    }
    let gates = (0..count)
        .map(|_| {
            let k = kinds[rng.random_range(0..kinds.len())];
            Gate::new(k, &sample(rng, n, k.arity()).into_vec()).expect("distinct qubits")
        })
        .collect();
    Circuit::new(n, gates)
}
