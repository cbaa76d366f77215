//! Operators, their vectorizations, tensor assembly from single-qubit factors
//! and the density-matrix encoding.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, Pauli};

/// Tolerance on `‖O − O†‖_max` accepted by [`encode_density`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// An `n`-qubit operator with unit Frobenius norm.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    matrix: ComplexMatrix,
}

impl DenseOperator {
    /// Wraps `matrix` and rescales it to unit Frobenius norm. The phase is
    /// left untouched.
    pub fn new(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        let op = Self::new_unnormalized(n, matrix)?;
        op.normalized()
    }

    /// Wraps `matrix` as is. Entropy routines assume unit norm, so prefer
    /// [`DenseOperator::new`] unless the norm is already known to be 1.
    pub fn new_unnormalized(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        if n == 0 || n > 12 {
            return Err(Error::invalid(format!("qubit count {n} outside 1..=12")));
        }
        let dim = 1usize << n;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::invalid(format!(
                "{n}-qubit operator must be {dim}×{dim}, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::invalid("operator has non-finite entries"));
        }
        Ok(Self { n, matrix })
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.matrix.frobenius_norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize the zero operator"));
        }
        Ok(Self {
            n: self.n,
            matrix: self.matrix.scale(C64::new(1.0 / norm, 0.0)),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.matrix
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `Tr(self† · other)`.
    pub fn overlap(&self, other: &Self) -> C64 {
        self.matrix
            .as_slice()
            .iter()
            .zip(other.matrix.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.max_abs_diff(&self.matrix.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Normalized `2^{-n/2} P`.
    pub fn pauli(letters: &[Pauli]) -> Result<Self> {
        from_factors(&FactorSpec(letters.iter().map(|&p| Factor::Pauli(p)).collect()))
    }

    /// `|i⟩⟨j|` with bit `k` of each index on qubit `k`.
    pub fn ketbra(n: usize, i: usize, j: usize) -> Result<Self> {
        let dim = 1usize << n;
        if i >= dim || j >= dim {
            return Err(Error::invalid(format!("ketbra index out of range for n={n}")));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(i, j)] = C64::new(1.0, 0.0);
        Self::new_unnormalized(n, m)
    }
}

/// The vectorized operator `|O⟩` as a `4^n` amplitude vector, index
/// `i + 2^n·j` for `|i⟩|j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct VecState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl VecState {
    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1usize << (2 * n) {
            return Err(Error::invalid(format!(
                "vectorized {n}-qubit operator needs {} amplitudes, got {}",
                1usize << (2 * n),
                amplitudes.len()
            )));
        }
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub fn vectorize(o: &DenseOperator) -> VecState {
    let dim = o.dim();
    let m = o.matrix();
    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            amps[i + dim * j] = m[(i, j)];
        }
    }
    VecState {
        n: o.n(),
        amplitudes: amps,
    }
}

pub fn devectorize(v: &VecState) -> Result<DenseOperator> {
    let dim = 1usize << v.n;
    let m = ComplexMatrix::from_fn(dim, dim, |i, j| v.amplitudes[i + dim * j]);
    DenseOperator::new_unnormalized(v.n, m)
}

/// Single-qubit factor of a product operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `|i⟩⟨j|`
    KetBra(u8, u8),
    Pauli(Pauli),
    /// Row-major 2×2 matrix, rescaled to unit norm on assembly.
    Custom([C64; 4]),
}

impl Factor {
    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            Factor::KetBra(i, j) => {
                let mut m = ComplexMatrix::zeros(2, 2);
                m[(i as usize, j as usize)] = C64::new(1.0, 0.0);
                m
            }
            Factor::Pauli(p) => p.matrix().scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)),
            Factor::Custom(e) => ComplexMatrix::from_fn(2, 2, |i, j| e[2 * i + j]),
        }
    }

    fn token(&self) -> String {
        match self {
            Factor::KetBra(i, j) => format!("k{i}{j}"),
            Factor::Pauli(p) => p.letter().to_string(),
            Factor::Custom(_) => "custom".to_string(),
        }
    }
}

/// Per-qubit factor list; entry `k` acts on qubit `k`.
///
/// Parses three textual forms:
///
/// - comma-separated tokens `X|Y|Z|I|k00|k01|k10|k11`, e.g. `X,X,k00`;
/// - `pauli:XXY`, one letter per qubit;
/// - `ketbra:01,10` for `|i⟩⟨j|` with one bit character per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpec(pub Vec<Factor>);

impl FactorSpec {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    /// `X` on the first `s` qubits and `|0⟩⟨0|` on the remaining `n − s`.
    pub fn x_then_zero(n: usize, s: usize) -> Self {
        assert!(s <= n);
        Self(
            (0..n)
                .map(|k| if k < s { Factor::Pauli(Pauli::X) } else { Factor::KetBra(0, 0) })
                .collect(),
        )
    }

    pub fn uniform(n: usize, f: Factor) -> Self {
        Self(vec![f; n])
    }
}

impl FromStr for FactorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("pauli:") {
            let factors = rest
                .chars()
                .map(|c| {
                    Pauli::from_letter(c)
                        .map(Factor::Pauli)
                        .ok_or_else(|| Error::invalid(format!("bad Pauli letter {c:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return nonempty(factors, s);
        }
        if let Some(rest) = s.strip_prefix("ketbra:") {
            let (i, j) = rest
                .split_once(',')
                .ok_or_else(|| Error::invalid(format!("expected ketbra:I,J in {s:?}")))?;
            if i.len() != j.len() {
                return Err(Error::invalid(format!("ketbra bit strings differ in length: {s:?}")));
            }
            let bit = |c: char| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::invalid(format!("bad bit {c:?} in {s:?}"))),
            };
            let factors = i
                .chars()
                .zip(j.chars())
                .map(|(a, b)| Ok(Factor::KetBra(bit(a)?, bit(b)?)))
                .collect::<Result<Vec<_>>>()?;
            return nonempty(factors, s);
        }
        let factors = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                match tok {
                    "k00" => Ok(Factor::KetBra(0, 0)),
                    "k01" => Ok(Factor::KetBra(0, 1)),
                    "k10" => Ok(Factor::KetBra(1, 0)),
                    "k11" => Ok(Factor::KetBra(1, 1)),
                    _ => {
                        let mut chars = tok.chars();
                        match (chars.next().and_then(Pauli::from_letter), chars.next()) {
                            (Some(p), None) => Ok(Factor::Pauli(p)),
                            _ => Err(Error::invalid(format!("unknown factor token {tok:?}"))),
                        }
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        nonempty(factors, s)
    }
}

fn nonempty(factors: Vec<Factor>, s: &str) -> Result<FactorSpec> {
    if factors.is_empty() {
        return Err(Error::invalid(format!("empty operator spec {s:?}")));
    }
    Ok(FactorSpec(factors))
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.0.iter().map(Factor::token).collect();
        write!(f, "{}", toks.join(","))
    }
}

/// Tensor product of the normalized factors, factor `k` on qubit `k`.
pub fn from_factors(spec: &FactorSpec) -> Result<DenseOperator> {
    if spec.0.is_empty() {
        return Err(Error::invalid("empty factor list"));
    }
    let mut m = ComplexMatrix::identity(1);
    for f in &spec.0 {
        let mut fm = f.matrix();
        let norm = fm.frobenius_norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("custom factor has zero or non-finite norm"));
        }
        fm = fm.scale(C64::new(1.0 / norm, 0.0));
        // later factors sit on higher qubits, i.e. to the left in kron
        m = fm.kron(&m);
    }
    DenseOperator::new(spec.0.len(), m)
}

/// Smallest eigenvalue of a Hermitian matrix. Shifting by `c ≥ ‖O‖₂` makes
/// `O + cI` positive semidefinite, so its singular values are its
/// eigenvalues.
fn hermitian_min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let c = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let shifted = m.add(&ComplexMatrix::identity(m.rows()).scale(C64::new(c, 0.0)));
    let sv = numkit::singular_values(&shifted)?;
    Ok(sv[sv.len() - 1] - c)
}

/// Density-matrix encoding `ρ_O = x(yI + O)` with `y = |λ_min(O)|` and
/// `x = 1/(2^n·y + Tr O)`.
pub fn encode_density(o: &DenseOperator) -> Result<ComplexMatrix> {
    let herr = o.hermiticity_error();
    if herr > HERMITIAN_TOL {
        return Err(Error::invalid(format!(
            "density encoding needs a Hermitian operator (‖O − O†‖_max = {herr:e})"
        )));
    }
    let y = hermitian_min_eigenvalue(o.matrix())?.abs();
    let denom = o.dim() as f64 * y + o.matrix().trace().re;
    if denom <= 1e-12 {
        return Err(Error::DegenerateEncoding { denominator: denom });
    }
    let x = 1.0 / denom;
    let shifted = o
        .matrix()
        .add(&ComplexMatrix::identity(o.dim()).scale(C64::new(y, 0.0)));
    let rho = shifted.scale(C64::new(x, 0.0));
    // symmetrize away the sub-tolerance anti-Hermitian part
    let half = C64::new(0.5, 0.0);
    Ok(rho.add(&rho.adjoint()).scale(half))
}

/// Random operators used by tests and the verification harness.
pub mod random {
    use super::*;

    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    /// Entries i.i.d. complex Gaussian.
    pub fn gaussian_operator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseOperator {
        let dim = 1 << n;
        let m = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        DenseOperator::new(n, m).expect("gaussian matrix is nonzero")
    }

    pub fn hermitian_operator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseOperator {
        let g = gaussian_operator(n, rng);
        let h = g.matrix().add(&g.matrix().adjoint());
        DenseOperator::new(n, h).expect("hermitian part is nonzero")
    }

    /// Operator with `k` nonzero matrix elements at random positions.
    pub fn sparse_operator<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DenseOperator {
        let dim = 1 << n;
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(rng.random_range(0..dim), rng.random_range(0..dim))] = gaussian(rng);
        for _ in 1..k {
            m[(rng.random_range(0..dim), rng.random_range(0..dim))] = gaussian(rng);
        }
        DenseOperator::new(n, m).unwrap_or_else(|_| DenseOperator::ketbra(n, 0, 0).unwrap())
    }

    /// Sum of `rank` random outer products.
    pub fn low_rank_operator<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DenseOperator {
        let dim = 1 << n;
        let a = ComplexMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
        let b = ComplexMatrix::from_fn(rank.max(1), dim, |_, _| gaussian(rng));
        DenseOperator::new(n, a.matmul(&b)).expect("random low-rank product is nonzero")
    }

    /// Combination of `k` random Pauli strings with Gaussian coefficients.
    pub fn pauli_sparse_operator<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DenseOperator {
        let total = 1usize << (2 * n);
        let mut b = vec![C64::new(0.0, 0.0); total];
        b[rng.random_range(0..total)] = gaussian(rng);
        for _ in 1..k {
            b[rng.random_range(0..total)] = gaussian(rng);
        }
        let m = numkit::from_pauli_coefficients(&b, n).expect("length matches");
        DenseOperator::new(n, m).expect("nonzero coefficient present")
    }

    /// Product of random ket-bra and Pauli factors.
    pub fn product_spec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> FactorSpec {
        FactorSpec(
            (0..n)
                .map(|_| {
                    let d = rng.random_range(0..8u8);
                    if d < 4 {
                        Factor::KetBra(d >> 1, d & 1)
                    } else {
                        Factor::Pauli(Pauli::from_digit((d - 4) as usize))
                    }
                })
                .collect(),
        )
    }

    pub fn product_operator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseOperator {
        from_factors(&product_spec(n, rng)).expect("product factors are nonzero")
    }

    /// Draws from a mix of the generators above so that tests see dense,
    /// Hermitian, sparse, low-rank, Pauli-sparse and product operators.
    pub fn mixed_operator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseOperator {
        let dim = 1usize << n;
        match rng.random_range(0..6) {
            0 => gaussian_operator(n, rng),
            1 => hermitian_operator(n, rng),
            2 => {
                let k = rng.random_range(1..=2 * dim);
                sparse_operator(n, k, rng)
            }
            3 => product_operator(n, rng),
            4 => {
                let r = rng.random_range(1..=dim.min(4));
                low_rank_operator(n, r, rng)
            }
            _ => {
                let k = rng.random_range(1..=2 * dim);
                pauli_sparse_operator(n, k, rng)
            }
        }
    }
}
