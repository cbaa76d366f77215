//! Dense complex linear algebra and the fast transforms used by the resource
//! measures.
//!
//! The SVD is a one-sided (Hestenes) Jacobi iteration on complex columns. It
//! is slower than bidiagonalization for large matrices, but its singular
//! values carry high relative accuracy, which is what the rank-counting
//! (`α = 0`) entropies need. Sizes in this crate stay at or below 1024 per side.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are exact zeros for
/// rank counting.
pub const RANK_CUTOFF: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 60;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data has {} entries, expected {rows}×{cols}",
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other` in the usual (left factor is the
    /// high-order index) layout.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn column_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.data[i * self.cols + j]);
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}×{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Thin SVD `a = left · diag(singular_values) · right_adjoint`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right_adjoint: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let mut scaled = self.left.clone();
        for i in 0..scaled.rows() {
            for j in 0..k {
                scaled[(i, j)] *= self.singular_values[j];
            }
        }
        scaled.matmul(&self.right_adjoint)
    }

    /// Number of singular values above `RANK_CUTOFF` times the largest.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values)
    }
}

pub fn numerical_rank(singular_values: &[f64]) -> usize {
    let max = singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > RANK_CUTOFF * max).count()
}

#[inline]
fn dot(a: &[C64], b: &[C64]) -> C64 {
    // a† b
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

#[inline]
fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.re * z.re + z.im * z.im).sum()
}

/// Applies `(a_p, a_q) ← (c·a_p − s·e^{-iφ}·a_q, s·a_p + c·e^{-iφ}·a_q)`.
#[inline]
fn rotate(ap: &mut [C64], aq: &mut [C64], c: f64, s: f64, phase: C64) {
    for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
        let yt = *y * phase;
        let xp = *x * c - yt * s;
        let yp = *x * s + yt * c;
        *x = xp;
        *y = yp;
    }
}

fn pair_mut(buf: &mut [C64], len: usize, p: usize, q: usize) -> (&mut [C64], &mut [C64]) {
    debug_assert!(p < q);
    let (lo, hi) = buf.split_at_mut(q * len);
    (&mut lo[p * len..(p + 1) * len], &mut hi[..len])
}

/// One-sided Jacobi on the columns of a column-major `m × n` matrix with
/// `n ≤ m`. Accumulates the right rotations into `v` (column-major `n × n`)
/// when given. Returns the number of sweeps performed.
fn hestenes(work: &mut [C64], m: usize, n: usize, mut v: Option<&mut Vec<C64>>) -> usize {
    let total: f64 = norm_sqr(work);
    if total == 0.0 {
        return 0;
    }
    // columns this small relative to the whole matrix are numerically zero
    let negligible = total * (f64::EPSILON * f64::EPSILON) * 1e-4;
    let mut norms: Vec<f64> = (0..n).map(|j| norm_sqr(&work[j * m..(j + 1) * m])).collect();

    for sweep in 1..=JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&work[p * m..(p + 1) * m], &work[q * m..(q + 1) * m]);
                let g = gamma.norm();
                if g <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // e^{-iφ} with γ = |γ| e^{iφ}; makes a_p† (e^{-iφ} a_q) real
                let phase = (gamma / g).conj();
                let (ap, aq) = pair_mut(work, m, p, q);
                rotate(ap, aq, c, s, phase);
                norms[p] = alpha - t * g;
                norms[q] = beta + t * g;
                if let Some(v) = v.as_deref_mut() {
                    let (vp, vq) = pair_mut(v, n, p, q);
                    rotate(vp, vq, c, s, phase);
                }
            }
        }
        if !rotated {
            return sweep;
        }
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = norm_sqr(&work[j * m..(j + 1) * m]);
        }
    }
    JACOBI_MAX_SWEEPS
}

fn check_svd_input(a: &ComplexMatrix) -> Result<()> {
    if a.rows == 0 || a.cols == 0 {
        return Err(Error::invalid("svd of an empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::invalid("svd input has non-finite entries"));
    }
    Ok(())
}

/// Singular values only, sorted nonincreasing. Cheaper than [`svd`] since no
/// rotations are accumulated.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_svd_input(a)?;
    let tall = if a.rows >= a.cols { a.clone() } else { a.adjoint() };
    let (m, n) = (tall.rows, tall.cols);
    let mut work = tall.column_major();
    hestenes(&mut work, m, n, None);
    let mut sv: Vec<f64> = (0..n).map(|j| norm_sqr(&work[j * m..(j + 1) * m]).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Full thin SVD.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    check_svd_input(a)?;
    if a.rows < a.cols {
        let SvdResult {
            left,
            singular_values,
            right_adjoint,
        } = svd(&a.adjoint())?;
        return Ok(SvdResult {
            left: right_adjoint.adjoint(),
            singular_values,
            right_adjoint: left.adjoint(),
        });
    }
    let (m, n) = (a.rows, a.cols);
    let mut work = a.column_major();
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        v[j * n + j] = C64::new(1.0, 0.0);
    }
    hestenes(&mut work, m, n, Some(&mut v));

    let norms: Vec<f64> = (0..n).map(|j| norm_sqr(&work[j * m..(j + 1) * m]).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigma_max = norms[order[0]];
    let floor = sigma_max * f64::EPSILON * (m.max(n) as f64);

    let mut left_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut singular = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular.push(s);
        if s > floor && s > 0.0 {
            left_cols.push(work[j * m..(j + 1) * m].iter().map(|z| z / s).collect());
        } else {
            left_cols.push(Vec::new());
            pending.push(k);
        }
    }
    // complete the left basis for numerically zero singular values
    let mut candidate = 0usize;
    for k in pending {
        loop {
            assert!(candidate < m, "failed to complete orthonormal basis");
            let mut u = vec![C64::new(0.0, 0.0); m];
            u[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for other in left_cols.iter().filter(|c| !c.is_empty()) {
                    let proj = dot(other, &u);
                    for (x, o) in u.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let nrm = norm_sqr(&u).sqrt();
            if nrm > 1e-6 {
                left_cols[k] = u.into_iter().map(|z| z / nrm).collect();
                break;
            }
        }
    }

    let left = ComplexMatrix::from_fn(m, n, |i, k| left_cols[k][i]);
    let right_adjoint = ComplexMatrix::from_fn(n, n, |k, c| v[order[k] * n + c].conj());
    Ok(SvdResult {
        left,
        singular_values: singular,
        right_adjoint,
    })
}

fn validate_cut(n: usize, cut: &[usize]) -> Result<()> {
    if cut.is_empty() || cut.len() >= n {
        return Err(Error::InvalidCut(format!(
            "cut {cut:?} must be a nonempty proper subset of 0..{n}"
        )));
    }
    let mut seen = vec![false; n];
    for &q in cut {
        if q >= n {
            return Err(Error::InvalidCut(format!("qubit {q} out of range 0..{n}")));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::InvalidCut(format!("qubit {q} repeated in cut")));
        }
    }
    Ok(())
}

/// Complement of `cut` in `0..n`, in increasing order. The cut itself is
/// validated first.
pub fn cut_complement(n: usize, cut: &[usize]) -> Result<Vec<usize>> {
    validate_cut(n, cut)?;
    Ok((0..n).filter(|q| !cut.contains(q)).collect())
}

/// Gathers the bits of `index` at positions `qubits` into a packed integer
/// (bit `k` of the result is bit `qubits[k]` of `index`).
#[inline]
pub fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// Reshuffles `o_{(i_A i_B),(j_A j_B)}` into the matrix indexed by
/// `(i_A j_A) × (i_B j_B)`, whose singular values are the operator Schmidt
/// coefficients across the cut `A | B`.
///
/// Row index is `i_A + 2^{|A|}·j_A`, column index `i_B + 2^{|B|}·j_B`.
pub fn realign(o: &ComplexMatrix, n: usize, cut: &[usize]) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    if o.rows() != dim || o.cols() != dim {
        return Err(Error::invalid(format!(
            "realign: expected {dim}×{dim} operator, got {}×{}",
            o.rows(),
            o.cols()
        )));
    }
    let rest = cut_complement(n, cut)?;
    let (na, nb) = (cut.len(), rest.len());
    let mut out = ComplexMatrix::zeros(1 << (2 * na), 1 << (2 * nb));
    for i in 0..dim {
        let (ia, ib) = (gather_bits(i, cut), gather_bits(i, &rest));
        for j in 0..dim {
            let (ja, jb) = (gather_bits(j, cut), gather_bits(j, &rest));
            out[(ia | (ja << na), ib | (jb << nb))] = o[(i, j)];
        }
    }
    Ok(out)
}

/// Unnormalized in-place Walsh–Hadamard butterfly.
pub fn walsh_hadamard_in_place(v: &mut [f64]) -> Result<()> {
    let len = v.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!(
            "walsh_hadamard: length {len} is not a power of two"
        )));
    }
    let mut half = 1;
    while half < len {
        for block in v.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
    Ok(())
}

pub fn walsh_hadamard(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    walsh_hadamard_in_place(&mut out)?;
    Ok(out)
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Base-4 digit used in Pauli indexing.
    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn from_digit(d: usize) -> Pauli {
        Self::ALL[d & 3]
    }

    /// Symplectic bits `(x, z)`; `Y` is `(1, 1)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let data = match self {
            Pauli::I => vec![l, o, o, l],
            Pauli::X => vec![o, l, l, o],
            Pauli::Y => vec![o, -i, i, o],
            Pauli::Z => vec![l, o, o, -l],
        };
        ComplexMatrix { rows: 2, cols: 2, data }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

// per-qubit map from local entries (o00, o10, o01, o11), local index
// i + 2j, to Pauli coefficients (I, X, Y, Z), each scaled by 1/√2
fn local_to_pauli(e: [C64; 4]) -> [C64; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let [o00, o10, o01, o11] = e;
    [
        (o00 + o11) * r,
        (o01 + o10) * r,
        (o01 - o10) * i * r,
        (o00 - o11) * r,
    ]
}

fn pauli_to_local(b: [C64; 4]) -> [C64; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let [bi, bx, by, bz] = b;
    [
        (bi + bz) * r,
        (bx + i * by) * r,
        (bx - i * by) * r,
        (bi - bz) * r,
    ]
}

fn apply_per_digit(w: &mut [C64], n: usize, f: fn([C64; 4]) -> [C64; 4]) {
    for k in 0..n {
        let stride = 1usize << (2 * k);
        for base in 0..w.len() {
            if (base / stride) % 4 != 0 {
                continue;
            }
            let idx = [base, base + stride, base + 2 * stride, base + 3 * stride];
            let out = f([w[idx[0]], w[idx[1]], w[idx[2]], w[idx[3]]]);
            for (slot, v) in idx.iter().zip(out) {
                w[*slot] = v;
            }
        }
    }
}

fn interleave_index(i: usize, j: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, k| {
        let d = ((i >> k) & 1) | (((j >> k) & 1) << 1);
        acc | (d << (2 * k))
    })
}

/// Pauli-basis coefficients `b_P = 2^{-n/2} Tr(P† O)` for all `4^n` strings.
///
/// Index digit `k` (base 4) is the letter on qubit `k`.
pub fn pauli_coefficients(o: &ComplexMatrix, n: usize) -> Result<Vec<C64>> {
    let dim = 1usize << n;
    if o.rows() != dim || o.cols() != dim {
        return Err(Error::invalid(format!(
            "pauli_coefficients: expected {dim}×{dim}, got {}×{}",
            o.rows(),
            o.cols()
        )));
    }
    let mut w = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            w[interleave_index(i, j, n)] = o[(i, j)];
        }
    }
    apply_per_digit(&mut w, n, local_to_pauli);
    Ok(w)
}

/// Inverse of [`pauli_coefficients`]: `O = 2^{-n/2} Σ b_P P`.
pub fn from_pauli_coefficients(b: &[C64], n: usize) -> Result<ComplexMatrix> {
    let dim = 1usize << n;
    if b.len() != dim * dim {
        return Err(Error::invalid(format!(
            "from_pauli_coefficients: expected {} coefficients, got {}",
            dim * dim,
            b.len()
        )));
    }
    let mut w = b.to_vec();
    apply_per_digit(&mut w, n, pauli_to_local);
    let mut o = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            o[(i, j)] = w[interleave_index(i, j, n)];
        }
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn orthonormality_error(cols_of: &ComplexMatrix) -> f64 {
        let gram = cols_of.adjoint().matmul(cols_of);
        gram.max_abs_diff(&ComplexMatrix::identity(gram.rows()))
    }

    fn check_svd(a: &ComplexMatrix) {
        let r = svd(a).unwrap();
        let resid = r.reconstruct().sub(a).frobenius_norm();
        assert!(resid < 1e-10 * a.frobenius_norm().max(1e-300), "residual {resid}");
        assert!(orthonormality_error(&r.left) < 1e-10);
        assert!(orthonormality_error(&r.right_adjoint.adjoint()) < 1e-10);
        assert!(r.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(r.singular_values.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let r = svd(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(r.singular_values, vec![1.0, 1.0]);
        let d = ComplexMatrix::diag(&[c(3.0, 0.0), c(4.0, 0.0)]);
        let r = svd(&d).unwrap();
        assert_abs_diff_eq!(r.singular_values[0], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.singular_values[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn svd_random_square_and_rectangular() {
        check_svd(&random_matrix(8, 8, 1));
        check_svd(&random_matrix(13, 5, 2));
        check_svd(&random_matrix(4, 11, 3));
        check_svd(&random_matrix(1, 1, 4));
        check_svd(&random_matrix(1, 6, 5));
    }

    #[test]
    fn svd_rank_deficient() {
        // rank 2 matrix built from outer products
        let u = random_matrix(9, 2, 7);
        let v = random_matrix(2, 6, 8);
        let a = u.matmul(&v);
        check_svd(&a);
        let r = svd(&a).unwrap();
        assert_eq!(r.rank(), 2);
        check_svd(&ComplexMatrix::zeros(3, 4));
    }

    #[test]
    fn svd_is_deterministic() {
        let a = random_matrix(16, 16, 9);
        let r1 = svd(&a).unwrap();
        let r2 = svd(&a).unwrap();
        assert_eq!(r1.singular_values, r2.singular_values);
        assert_eq!(r1.left, r2.left);
    }

    #[test]
    fn svd_rejects_nonfinite() {
        let mut a = ComplexMatrix::identity(2);
        a.as_mut_slice()[1] = c(f64::NAN, 0.0);
        assert!(matches!(svd(&a), Err(Error::InvalidInput(_))));
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::INFINITY, 0.0)]).is_err());
    }

    #[test]
    fn singular_values_match_full_svd() {
        let a = random_matrix(20, 12, 10);
        let s1 = singular_values(&a).unwrap();
        let s2 = svd(&a).unwrap().singular_values;
        for (x, y) in s1.iter().zip(&s2) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn svd_medium_random() {
        check_svd(&random_matrix(128, 128, 11));
    }

    // One-sided Jacobi at full size takes minutes on one core.
    #[test]
    #[ignore]
    fn svd_large_random() {
        check_svd(&random_matrix(1024, 1024, 12));
    }

    #[test]
    fn realign_bell_projector() {
        // |Φ+⟩⟨Φ+| with |Φ+⟩ = (|00⟩ + |11⟩)/√2
        let mut o = ComplexMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                o[(i, j)] = c(0.5, 0.0);
            }
        }
        let r = realign(&o, 2, &[0]).unwrap();
        assert_eq!((r.rows(), r.cols()), (4, 4));
        let sv = singular_values(&r).unwrap();
        for s in sv {
            assert_abs_diff_eq!(s, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn realign_product_operator() {
        let a = random_matrix(2, 2, 20);
        let b = random_matrix(4, 4, 21);
        // kron puts `b` on the low qubits {0,1}, `a` on qubit 2
        let o = a.kron(&b);
        let sv = singular_values(&realign(&o, 3, &[0, 1]).unwrap()).unwrap();
        assert_abs_diff_eq!(sv[0], a.frobenius_norm() * b.frobenius_norm(), epsilon = 1e-12);
        assert!(sv[1..].iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn realign_preserves_norm_and_entries() {
        let o = random_matrix(8, 8, 22);
        let r = realign(&o, 3, &[1]).unwrap();
        assert_eq!((r.rows(), r.cols()), (4, 16));
        assert_abs_diff_eq!(r.frobenius_norm(), o.frobenius_norm(), epsilon = 1e-12);
        let sv = singular_values(&r).unwrap();
        let s2: f64 = sv.iter().map(|s| s * s).sum();
        assert_abs_diff_eq!(s2, o.frobenius_norm_sqr(), epsilon = 1e-12);
        // same entry multiset with swapped roles
        let r2 = realign(&o, 3, &[0, 2]).unwrap();
        let key = |m: &ComplexMatrix| {
            let mut v: Vec<(u64, u64)> =
                m.as_slice().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
            v.sort();
            v
        };
        assert_eq!(key(&r), key(&r2));
        assert_eq!(key(&r), key(&o));
    }

    /// Brute-force operator Schmidt decomposition: expand `O` in the
    /// product basis `E_a ⊗ F_b` of matrix units and take the singular values
    /// of the coefficient matrix. Independent of `realign`'s index shuffling.
    #[test]
    fn realign_matches_bruteforce_schmidt() {
        let o = random_matrix(4, 4, 23);
        let unit = |i: usize, j: usize| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(i, j)] = c(1.0, 0.0);
            m
        };
        let basis: Vec<ComplexMatrix> = (0..4).map(|k| unit(k / 2, k % 2)).collect();
        // qubit 1 is the high factor of kron, qubit 0 the low
        let mut coeff = ComplexMatrix::zeros(4, 4);
        for (a, ea) in basis.iter().enumerate() {
            for (b, fb) in basis.iter().enumerate() {
                let p = fb.kron(ea); // qubit1 ⊗ qubit0, cut A = {0}
                let t = p.adjoint().matmul(&o).trace();
                coeff[(a, b)] = t;
            }
        }
        let brute = singular_values(&coeff).unwrap();
        let fast = singular_values(&realign(&o, 2, &[0]).unwrap()).unwrap();
        for (x, y) in brute.iter().zip(&fast) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn realign_rejects_bad_cuts() {
        let o = ComplexMatrix::identity(4);
        assert!(matches!(realign(&o, 2, &[]), Err(Error::InvalidCut(_))));
        assert!(matches!(realign(&o, 2, &[0, 1]), Err(Error::InvalidCut(_))));
        assert!(matches!(realign(&o, 2, &[2]), Err(Error::InvalidCut(_))));
    }

    #[test]
    fn walsh_hadamard_small_cases() {
        assert_eq!(walsh_hadamard(&[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(walsh_hadamard(&[1.0, 1.0]).unwrap(), vec![2.0, 0.0]);
        assert!(walsh_hadamard(&[1.0, 2.0, 3.0]).is_err());
        assert!(walsh_hadamard(&[]).is_err());
    }

    #[test]
    fn walsh_hadamard_involution_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let v: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
        let once = walsh_hadamard(&v).unwrap();
        let twice = walsh_hadamard(&once).unwrap();
        for (a, b) in twice.iter().zip(&v) {
            assert_abs_diff_eq!(*a, 8.0 * b, epsilon = 1e-12);
        }
        let e0: f64 = v.iter().map(|x| x * x).sum();
        let e1: f64 = once.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(e1, 8.0 * e0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_coefficients_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let x = Pauli::X.matrix().scale(c(r, 0.0));
        let b = pauli_coefficients(&x, 1).unwrap();
        let expect = [0.0, 1.0, 0.0, 0.0];
        for (z, e) in b.iter().zip(expect) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        let mut p0 = ComplexMatrix::zeros(2, 2);
        p0[(0, 0)] = c(1.0, 0.0);
        let b = pauli_coefficients(&p0, 1).unwrap();
        let expect = [r, 0.0, 0.0, r];
        for (z, e) in b.iter().zip(expect) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    /// Direct oracle: `Tr(P_i O)` for every Pauli string built by explicit
    /// Kronecker products.
    #[test]
    fn pauli_coefficients_match_direct_traces() {
        let n = 3;
        let o = random_matrix(8, 8, 31);
        let fast = pauli_coefficients(&o, n).unwrap();
        for idx in 0..64usize {
            // kron with qubit n-1 leftmost
            let mut p = ComplexMatrix::identity(1);
            for k in (0..n).rev() {
                p = p.kron(&Pauli::from_digit(idx >> (2 * k)).matrix());
            }
            let direct = p.adjoint().matmul(&o).trace() / (8f64).sqrt();
            assert!((direct - fast[idx]).norm() < 1e-12, "index {idx}");
        }
        let norm: f64 = fast.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, o.frobenius_norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn pauli_round_trip() {
        let o = random_matrix(16, 16, 32);
        let b = pauli_coefficients(&o, 4).unwrap();
        let back = from_pauli_coefficients(&b, 4).unwrap();
        assert!(back.max_abs_diff(&o) < 1e-12);
        assert!(pauli_coefficients(&o, 3).is_err());
    }
}
