//! Rényi entropies of the five vectorization-space spectra and the
//! predicates built on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkit::{self, ComplexMatrix, RANK_CUTOFF};
use crate::opspace::DenseOperator;

/// Weights at or below this fraction of the largest weight are dropped from
/// `α < 1` sums, including the support count at `α = 0`.
pub const WEIGHT_CUTOFF: f64 = 1e-12;

/// Default tolerance for [`is_te_matching`].
pub const TE_MATCHING_TOL: f64 = 1e-7;

/// A probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    weights: Vec<f64>,
}

impl Spectrum {
    /// Clamps tiny negatives to zero and rescales to unit sum.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("empty spectrum"));
        }
        for w in &mut weights {
            if !w.is_finite() || *w < -1e-14 {
                return Err(Error::invalid(format!("invalid spectrum weight {w}")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("spectrum has zero total weight"));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self { weights })
    }

    /// Squared magnitudes of `amps`.
    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        Self::from_weights(amps.iter().map(|z| z.norm_sqr()).collect())
    }

    /// Squares of singular values, with those below `RANK_CUTOFF` of the
    /// largest set to exactly zero.
    pub fn from_singular_values(sv: &[f64]) -> Result<Self> {
        let max = sv.iter().cloned().fold(0.0, f64::max);
        Self::from_weights(
            sv.iter()
                .map(|&s| if s > RANK_CUTOFF * max { s * s } else { 0.0 })
                .collect(),
        )
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    /// Number of weights above the relative cutoff.
    pub fn support(&self) -> usize {
        let floor = WEIGHT_CUTOFF * self.max_weight();
        self.weights.iter().filter(|&&w| w > floor).count()
    }

    /// Weights sorted nonincreasing.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        w
    }
}

/// Rényi entropy in bits. `alpha` may be `f64::INFINITY`.
pub fn renyi(p: &Spectrum, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::invalid(format!("Rényi order must be ≥ 0, got {alpha}")));
    }
    let max = p.max_weight();
    let h = if alpha == 0.0 {
        (p.support() as f64).log2()
    } else if alpha == 1.0 {
        -p.weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * w.log2())
            .sum::<f64>()
    } else if alpha.is_infinite() {
        -max.log2()
    } else {
        let floor = if alpha < 1.0 { WEIGHT_CUTOFF * max } else { 0.0 };
        // factor out the max weight to keep large α finite
        let s: f64 = p
            .weights
            .iter()
            .filter(|&&w| w > floor)
            .map(|&w| (w / max).powf(alpha))
            .sum();
        (alpha * max.log2() + s.log2()) / (1.0 - alpha)
    };
    // −0.0 and sub-ulp negatives from rounding
    Ok(if h <= 0.0 && h > -1e-12 { 0.0 } else { h })
}

/// Parses a Rényi order: a decimal, a fraction like `1/2`, or `inf`/`∞`.
pub fn parse_alpha(s: &str) -> Result<f64> {
    let t = s.trim();
    let a = match t {
        "inf" | "Inf" | "infinity" | "∞" => f64::INFINITY,
        _ => {
            if let Some((num, den)) = t.split_once('/') {
                let num: f64 = num.trim().parse().map_err(|_| Error::invalid(format!("bad order {t:?}")))?;
                let den: f64 = den.trim().parse().map_err(|_| Error::invalid(format!("bad order {t:?}")))?;
                num / den
            } else {
                t.parse().map_err(|_| Error::invalid(format!("bad order {t:?}")))?
            }
        }
    };
    if a.is_nan() || a < 0.0 {
        return Err(Error::invalid(format!("Rényi order must be ≥ 0, got {t:?}")));
    }
    Ok(a)
}

/// The first `⌊n/2⌋` qubits.
pub fn default_cut(n: usize) -> Vec<usize> {
    (0..n / 2).collect()
}

/// Largest possible SE across `cut`: `2·min(|A|, |B|)` bits.
pub fn se_cap(n: usize, cut: &[usize]) -> f64 {
    2.0 * cut.len().min(n - cut.len()) as f64
}

pub fn se_spectrum(o: &DenseOperator, cut: &[usize]) -> Result<Spectrum> {
    let r = numkit::realign(o.matrix(), o.n(), cut)?;
    Spectrum::from_singular_values(&numkit::singular_values(&r)?)
}

pub fn se_entropy(o: &DenseOperator, alpha: f64, cut: &[usize]) -> Result<f64> {
    renyi(&se_spectrum(o, cut)?, alpha)
}

pub fn te_spectrum(o: &DenseOperator) -> Result<Spectrum> {
    Spectrum::from_singular_values(&numkit::singular_values(o.matrix())?)
}

pub fn te_entropy(o: &DenseOperator, alpha: f64) -> Result<f64> {
    renyi(&te_spectrum(o)?, alpha)
}

/// `λ² = |WHT(γ)|² / 2^n` with `γ` the singular values in nonincreasing
/// order at indices `0..2^n`.
pub fn fte_spectrum(o: &DenseOperator) -> Result<Spectrum> {
    let mut gamma = numkit::singular_values(o.matrix())?;
    let max = gamma[0];
    for g in &mut gamma {
        if *g <= RANK_CUTOFF * max {
            *g = 0.0;
        }
    }
    numkit::walsh_hadamard_in_place(&mut gamma)?;
    let scale = 1.0 / o.dim() as f64;
    Spectrum::from_weights(gamma.iter().map(|l| l * l * scale).collect())
}

pub fn fte_entropy(o: &DenseOperator, alpha: f64) -> Result<f64> {
    renyi(&fte_spectrum(o)?, alpha)
}

pub fn cbc_spectrum(o: &DenseOperator) -> Result<Spectrum> {
    Spectrum::from_amplitudes(o.matrix().as_slice())
}

pub fn cbc_entropy(o: &DenseOperator, alpha: f64) -> Result<f64> {
    renyi(&cbc_spectrum(o)?, alpha)
}

pub fn bbc_spectrum(o: &DenseOperator) -> Result<Spectrum> {
    Spectrum::from_amplitudes(&numkit::pauli_coefficients(o.matrix(), o.n())?)
}

pub fn bbc_entropy(o: &DenseOperator, alpha: f64) -> Result<f64> {
    renyi(&bbc_spectrum(o)?, alpha)
}

/// Operator Schmidt weights of a sparse coefficient list.
///
/// Each entry `(row, col, c)` places `c` at position `(row, col)` of the
/// realigned coefficient matrix. The matrix is split into the connected
/// components of its row/column incidence graph and each block is
/// decomposed separately, so operators with few nonzeros in a product basis
/// (e.g. monomial-evolved ket-bras in the computational basis, or
/// Clifford-evolved Paulis in the Pauli basis) stay cheap at large `n`.
pub fn sparse_schmidt_spectrum(entries: &[(u64, u64, C64)]) -> Result<Spectrum> {
    let entries: Vec<_> = entries.iter().filter(|e| e.2.norm_sqr() > 0.0).copied().collect();
    if entries.is_empty() {
        return Err(Error::invalid("sparse coefficient list is empty"));
    }
    let mut row_id: HashMap<u64, usize> = HashMap::new();
    let mut col_id: HashMap<u64, usize> = HashMap::new();
    for &(r, c, _) in &entries {
        let next = row_id.len();
        row_id.entry(r).or_insert(next);
        let next = col_id.len();
        col_id.entry(c).or_insert(next);
    }
    let nr = row_id.len();
    let mut uf = UnionFind::new(nr + col_id.len());
    for &(r, c, _) in &entries {
        uf.union(row_id[&r], nr + col_id[&c]);
    }

    // group entries by component, keep deterministic block order
    let mut blocks: BTreeMap<usize, Vec<(usize, usize, C64)>> = BTreeMap::new();
    for &(r, c, z) in &entries {
        let (ri, ci) = (row_id[&r], col_id[&c]);
        blocks.entry(uf.find(ri)).or_default().push((ri, ci, z));
    }

    let mut sv = Vec::new();
    for (_, block) in blocks {
        let mut rmap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cmap: BTreeMap<usize, usize> = BTreeMap::new();
        for &(r, c, _) in &block {
            let k = rmap.len();
            rmap.entry(r).or_insert(k);
            let k = cmap.len();
            cmap.entry(c).or_insert(k);
        }
        let mut m = ComplexMatrix::zeros(rmap.len(), cmap.len());
        for &(r, c, z) in &block {
            m[(rmap[&r], cmap[&c])] += z;
        }
        if m.rows() == 1 || m.cols() == 1 {
            sv.push(m.frobenius_norm());
        } else {
            sv.extend(numkit::singular_values(&m)?);
        }
    }
    Spectrum::from_singular_values(&sv)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Se,
    Te,
    Fte,
    Cbc,
    Bbc,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::Se, Measure::Te, Measure::Fte, Measure::Cbc, Measure::Bbc];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Se => "SE",
            Measure::Te => "TE",
            Measure::Fte => "FTE",
            Measure::Cbc => "CBC",
            Measure::Bbc => "BBC",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// All five entropies of one operator at a list of orders.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceProfile {
    pub n: usize,
    /// Empty when `n = 1`, in which case no SE values are reported.
    pub cut: Vec<usize>,
    pub values: BTreeMap<Measure, Vec<(f64, f64)>>,
}

impl ResourceProfile {
    pub fn get(&self, m: Measure, alpha: f64) -> Option<f64> {
        self.values
            .get(&m)?
            .iter()
            .find(|(a, _)| *a == alpha)
            .map(|&(_, v)| v)
    }
}

/// Computes every measure at every order in `alphas`. With `cut = None` the
/// default cut is used.
pub fn resource_profile(o: &DenseOperator, alphas: &[f64], cut: Option<&[usize]>) -> Result<ResourceProfile> {
    let n = o.n();
    let cut: Vec<usize> = match cut {
        Some(c) => {
            numkit::cut_complement(n, c)?;
            c.to_vec()
        }
        None => default_cut(n),
    };
    let mut spectra: Vec<(Measure, Spectrum)> = Vec::with_capacity(5);
    if !cut.is_empty() {
        spectra.push((Measure::Se, se_spectrum(o, &cut)?));
    }
    spectra.push((Measure::Te, te_spectrum(o)?));
    spectra.push((Measure::Fte, fte_spectrum(o)?));
    spectra.push((Measure::Cbc, cbc_spectrum(o)?));
    spectra.push((Measure::Bbc, bbc_spectrum(o)?));
    let mut values = BTreeMap::new();
    for (m, sp) in spectra {
        let vals = alphas
            .iter()
            .map(|&a| Ok((a, renyi(&sp, a)?)))
            .collect::<Result<Vec<_>>>()?;
        values.insert(m, vals);
    }
    Ok(ResourceProfile { n, cut, values })
}

/// Both sides of the TE-matching identity at `α = 1`:
/// `(H_CBC + H_BBC, 2n − H_TE,½ − H_FTE,½)`.
pub fn te_matching_sides(o: &DenseOperator) -> Result<(f64, f64)> {
    let lhs = cbc_entropy(o, 1.0)? + bbc_entropy(o, 1.0)?;
    let rhs = 2.0 * o.n() as f64 - te_entropy(o, 0.5)? - fte_entropy(o, 0.5)?;
    Ok((lhs, rhs))
}

pub fn is_te_matching(o: &DenseOperator, tol: f64) -> Result<bool> {
    let (lhs, rhs) = te_matching_sides(o)?;
    Ok((lhs - rhs).abs() <= tol)
}

/// True iff `p` majorizes `q`: every partial sum of `p` sorted nonincreasing
/// dominates the matching partial sum of `q` (shorter vector padded with
/// zeros).
pub fn majorizes(p: &Spectrum, q: &Spectrum) -> bool {
    let (a, b) = (p.sorted_desc(), q.sorted_desc());
    let len = a.len().max(b.len());
    let (mut sa, mut sb) = (0.0, 0.0);
    for k in 0..len {
        sa += a.get(k).copied().unwrap_or(0.0);
        sb += b.get(k).copied().unwrap_or(0.0);
        if sa < sb - 1e-12 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::Pauli;
    use crate::opspace::{from_factors, random, FactorSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ALPHAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];
    const PAIRS: [(f64, f64); 5] = [
        (0.5, f64::INFINITY),
        (2.0 / 3.0, 2.0),
        (1.0, 1.0),
        (2.0, 2.0 / 3.0),
        (f64::INFINITY, 0.5),
    ];

    fn spec(s: &str) -> DenseOperator {
        from_factors(&s.parse::<FactorSpec>().unwrap()).unwrap()
    }

    fn sp(w: &[f64]) -> Spectrum {
        Spectrum::from_weights(w.to_vec()).unwrap()
    }

    fn bell_projector() -> DenseOperator {
        let mut m = ComplexMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = C64::new(0.5, 0.0);
            }
        }
        DenseOperator::new(2, m).unwrap()
    }

    #[test]
    fn renyi_examples() {
        for a in ALPHAS {
            assert_eq!(renyi(&sp(&[1.0]), a).unwrap(), 0.0);
            assert_abs_diff_eq!(renyi(&sp(&[0.25; 4]), a).unwrap(), 2.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(renyi(&sp(&[0.5, 0.5, 0.0, 0.0]), 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(renyi(&sp(&[1.0]), -0.5).is_err());
        // 1e-20 is below the support cutoff
        assert_eq!(renyi(&sp(&[1.0, 1e-20]), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn renyi_large_alpha_stays_finite() {
        let p = sp(&[0.7, 0.2, 0.1]);
        let h = renyi(&p, 500.0).unwrap();
        assert!(h.is_finite());
        assert!(h >= renyi(&p, f64::INFINITY).unwrap() - 1e-12);
    }

    #[test]
    fn parse_alpha_forms() {
        assert_eq!(parse_alpha("1/2").unwrap(), 0.5);
        assert_eq!(parse_alpha("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_alpha("2").unwrap(), 2.0);
        assert!(parse_alpha("-1").is_err());
        assert!(parse_alpha("x").is_err());
    }

    #[test]
    fn se_examples() {
        assert_abs_diff_eq!(se_entropy(&bell_projector(), 1.0, &[0]).unwrap(), 2.0, epsilon = 1e-12);
        let prod = spec("X,k01,Y");
        for a in ALPHAS {
            assert_abs_diff_eq!(se_entropy(&prod, a, &[0]).unwrap(), 0.0, epsilon = 1e-12);
        }
        let zero4 = spec("k00,k00,k00,k00");
        for cut in [vec![0], vec![1, 3], vec![0, 1, 2]] {
            assert_eq!(se_entropy(&zero4, 1.0, &cut).unwrap(), 0.0);
        }
        assert!(matches!(se_entropy(&zero4, 1.0, &[]), Err(Error::InvalidCut(_))));
    }

    #[test]
    fn te_fte_examples() {
        assert_eq!(te_entropy(&spec("k01,k10,k11"), 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(fte_entropy(&spec("k01,k10,k11"), 1.0).unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(te_entropy(&spec("X,Y,Z"), 1.0).unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fte_entropy(&spec("X,Y,Z"), 1.0).unwrap(), 0.0, epsilon = 1e-12);

        // γ = (1, 0) → λ = (1/√2, 1/√2) from the definition
        let p0 = spec("k00");
        let lam = fte_spectrum(&p0).unwrap();
        assert_abs_diff_eq!(lam.weights()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(lam.weights()[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(fte_entropy(&p0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fte_weights_sum_to_one_before_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 1..=4 {
            let o = random::gaussian_operator(n, &mut rng);
            let mut g = numkit::singular_values(o.matrix()).unwrap();
            numkit::walsh_hadamard_in_place(&mut g).unwrap();
            let total: f64 = g.iter().map(|l| l * l).sum::<f64>() / o.dim() as f64;
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(cbc_entropy(&spec("k00,k00,k00"), 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(cbc_entropy(&spec("X,Z,Y"), 1.0).unwrap(), 3.0, epsilon = 1e-12);
        let plus = DenseOperator::new(1, ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0))).unwrap();
        assert_abs_diff_eq!(cbc_entropy(&plus, 1.0).unwrap(), 2.0, epsilon = 1e-12);

        assert_abs_diff_eq!(bbc_entropy(&spec("X,Z,Y"), 1.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bbc_entropy(&spec("k00,k00,k00"), 1.0).unwrap(), 3.0, epsilon = 1e-12);
        // T|0⟩⟨0|T† = |0⟩⟨0|
        assert_abs_diff_eq!(bbc_entropy(&spec("k00"), 1.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn profile_extremes() {
        let x2 = resource_profile(&spec("X,X"), &[1.0], None).unwrap();
        let expect = [(Measure::Te, 2.0), (Measure::Fte, 0.0), (Measure::Cbc, 2.0), (Measure::Bbc, 0.0), (Measure::Se, 0.0)];
        for (m, v) in expect {
            assert_abs_diff_eq!(x2.get(m, 1.0).unwrap(), v, epsilon = 1e-12);
        }
        let z2 = resource_profile(&spec("k00,k00"), &[1.0], None).unwrap();
        let expect = [(Measure::Te, 0.0), (Measure::Fte, 2.0), (Measure::Cbc, 0.0), (Measure::Bbc, 2.0), (Measure::Se, 0.0)];
        for (m, v) in expect {
            assert_abs_diff_eq!(z2.get(m, 1.0).unwrap(), v, epsilon = 1e-12);
        }
    }

    #[test]
    fn profile_matches_standalone_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let o = random::gaussian_operator(3, &mut rng);
        let prof = resource_profile(&o, &ALPHAS, Some(&[1])).unwrap();
        for a in ALPHAS {
            assert_eq!(prof.get(Measure::Se, a).unwrap(), se_entropy(&o, a, &[1]).unwrap());
            assert_eq!(prof.get(Measure::Te, a).unwrap(), te_entropy(&o, a).unwrap());
            assert_eq!(prof.get(Measure::Fte, a).unwrap(), fte_entropy(&o, a).unwrap());
            assert_eq!(prof.get(Measure::Cbc, a).unwrap(), cbc_entropy(&o, a).unwrap());
            assert_eq!(prof.get(Measure::Bbc, a).unwrap(), bbc_entropy(&o, a).unwrap());
        }
        let single = resource_profile(&spec("X"), &[1.0], None).unwrap();
        assert!(single.cut.is_empty() && single.get(Measure::Se, 1.0).is_none());
    }

    #[test]
    fn te_matching_examples() {
        assert!(is_te_matching(&spec("X,k00"), TE_MATCHING_TOL).unwrap());
        assert!(is_te_matching(&spec("I"), TE_MATCHING_TOL).unwrap());
        let plus = DenseOperator::new(1, ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0))).unwrap();
        let (lhs, rhs) = te_matching_sides(&plus).unwrap();
        // CBC = 2, BBC = 1 (I and X halves); TE = 0, FTE = 1
        assert_abs_diff_eq!(lhs, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rhs, 1.0, epsilon = 1e-12);
        assert!(!is_te_matching(&plus, TE_MATCHING_TOL).unwrap());
    }

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&sp(&[1.0, 0.0]), &sp(&[0.5, 0.5])));
        assert!(!majorizes(&sp(&[0.5, 0.5]), &sp(&[1.0, 0.0])));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let o = random::gaussian_operator(3, &mut rng);
            let se = se_spectrum(&o, &[0]).unwrap();
            assert!(majorizes(&se, &cbc_spectrum(&o).unwrap()));
            assert!(majorizes(&se, &bbc_spectrum(&o).unwrap()));
        }
    }

    #[test]
    fn sparse_schmidt_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 4;
        let cut = [0usize, 2];
        let rest = [1usize, 3];
        for k in [1usize, 3, 8, 40] {
            let o = random::sparse_operator(n, k, &mut rng);
            let mut entries = Vec::new();
            for i in 0..16 {
                for j in 0..16 {
                    let z = o.matrix()[(i, j)];
                    if z.norm_sqr() > 0.0 {
                        let r = numkit::gather_bits(i, &cut) | numkit::gather_bits(j, &cut) << 2;
                        let c = numkit::gather_bits(i, &rest) | numkit::gather_bits(j, &rest) << 2;
                        entries.push((r as u64, c as u64, z));
                    }
                }
            }
            let sparse = sparse_schmidt_spectrum(&entries).unwrap();
            let dense = se_spectrum(&o, &cut).unwrap();
            for a in ALPHAS {
                assert_abs_diff_eq!(renyi(&sparse, a).unwrap(), renyi(&dense, a).unwrap(), epsilon = 1e-10);
            }
        }
    }

    fn balanced_cuts(n: usize) -> Vec<Vec<usize>> {
        let k = n / 2;
        (0usize..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|q| m >> q & 1 == 1).collect())
            .collect()
    }

    fn alpha_strategy() -> impl Strategy<Value = f64> {
        prop::sample::select(ALPHAS.to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn coherence_bounds_space_entanglement(seed in any::<u64>(), n in 2usize..=5, alpha in alpha_strategy()) {
            let o = random::mixed_operator(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let cbc = cbc_entropy(&o, alpha).unwrap();
            let bbc = bbc_entropy(&o, alpha).unwrap();
            for cut in balanced_cuts(n) {
                let se = se_entropy(&o, alpha, &cut).unwrap();
                prop_assert!(cbc >= se - 1e-9, "cbc {cbc} < se {se}");
                prop_assert!(bbc >= se - 1e-9, "bbc {bbc} < se {se}");
                prop_assert!(se <= se_cap(n, &cut) + 1e-9);
            }
        }

        #[test]
        fn coherence_lower_bounds(seed in any::<u64>(), n in 2usize..=5, alpha in alpha_strategy()) {
            let o = random::mixed_operator(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let nf = n as f64;
            let cbc = cbc_entropy(&o, alpha).unwrap();
            let bbc = bbc_entropy(&o, alpha).unwrap();
            prop_assert!(cbc >= nf - fte_entropy(&o, 0.5).unwrap() - 1e-9);
            prop_assert!(bbc >= nf - te_entropy(&o, 0.5).unwrap() - 1e-9);
            prop_assert!(cbc <= 2.0 * nf + 1e-9 && bbc <= 2.0 * nf + 1e-9);
        }

        #[test]
        fn uncertainty_relations(seed in any::<u64>(), n in 2usize..=5) {
            let o = random::mixed_operator(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let nf = n as f64;
            for (a, b) in PAIRS {
                let cb = cbc_entropy(&o, a).unwrap() + bbc_entropy(&o, b).unwrap();
                let tf = te_entropy(&o, a).unwrap() + fte_entropy(&o, b).unwrap();
                prop_assert!(cb >= nf - 1e-9, "({a},{b}): {cb}");
                prop_assert!(tf >= nf - 1e-9, "({a},{b}): {tf}");
            }
        }

        #[test]
        fn te_matching_products_saturate(seed in any::<u64>(), n in 1usize..=5, alpha in alpha_strategy()) {
            let o = random::product_operator(n, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert!(is_te_matching(&o, TE_MATCHING_TOL).unwrap());
            let total = cbc_entropy(&o, alpha).unwrap() + bbc_entropy(&o, alpha).unwrap();
            prop_assert!((total - n as f64).abs() < 1e-7, "{total}");
        }

        #[test]
        fn renyi_is_monotone(seed in any::<u64>(), n in 1usize..=4) {
            let o = random::mixed_operator(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut spectra = vec![te_spectrum(&o).unwrap(), fte_spectrum(&o).unwrap(),
                                   cbc_spectrum(&o).unwrap(), bbc_spectrum(&o).unwrap()];
            if n > 1 {
                spectra.push(se_spectrum(&o, &default_cut(n)).unwrap());
            }
            let orders = [0.0, 0.25, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0, 5.0, f64::INFINITY];
            for s in &spectra {
                let h: Vec<f64> = orders.iter().map(|&a| renyi(s, a).unwrap()).collect();
                for w in h.windows(2) {
                    prop_assert!(w[1] <= w[0] + 1e-9, "{h:?}");
                }
            }
        }
    }

    #[test]
    fn pauli_letters_stay_bbc_free() {
        let o = DenseOperator::pauli(&[Pauli::Y, Pauli::I]).unwrap();
        assert_abs_diff_eq!(bbc_entropy(&o, 0.0).unwrap(), 0.0, epsilon = 1e-12);
    }
}
