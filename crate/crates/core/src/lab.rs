//! Experiment harness: inequality verification on random instances, the
//! SE sweeps over gate rates and over TE-matching operators, and dense
//! cross-checks of the stabilizer paths.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{
    apply_circuit, census, random_family, random_gates, random_layered, Circuit, Family, Gate, GateKind,
    SparseOperator,
};
use crate::error::{Error, Result};
use crate::numkit::Pauli;
use crate::opspace::{from_factors, random, vectorize, Factor, FactorSpec};
use crate::osf::{self, PauliSum};
use crate::resources::{self, Spectrum};

/// Slack below `−INEQUALITY_TOL` counts as a violation.
pub const INEQUALITY_TOL: f64 = 1e-7;
/// SE of operators that must stay product across the cut.
pub const ZERO_TOL: f64 = 1e-9;
pub const TE_INVARIANCE_TOL: f64 = 1e-9;
pub const OVERLAP_TOL: f64 = 1e-10;
pub const PROPAGATION_TOL: f64 = 1e-9;

/// Conjugate orders `1/α + 1/β = 2` used for the uncertainty relations.
pub const CONJUGATE_PAIRS: [(f64, f64); 5] = [
    (0.5, f64::INFINITY),
    (f64::INFINITY, 0.5),
    (1.0, 1.0),
    (2.0, 2.0 / 3.0),
    (2.0 / 3.0, 2.0),
];

pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Fig3a,
    Fig3b,
    Verify,
    Crosscheck,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Fig3a => "fig3a",
            ExperimentKind::Fig3b => "fig3b",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Crosscheck => "crosscheck",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateGrid {
    pub p_ccx: Vec<f64>,
    pub p_h: Vec<f64>,
}

/// A Rényi order in JSON: a number, or a string such as `"inf"` or `"1/2"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Number(f64),
    Text(String),
}

impl AlphaSpec {
    pub fn value(&self) -> Result<f64> {
        match self {
            AlphaSpec::Number(a) => resources::parse_alpha(&a.to_string()),
            AlphaSpec::Text(s) => resources::parse_alpha(s),
        }
    }
}

impl From<f64> for AlphaSpec {
    fn from(a: f64) -> Self {
        if a.is_infinite() {
            AlphaSpec::Text("inf".into())
        } else {
            AlphaSpec::Number(a)
        }
    }
}

fn default_samples() -> usize {
    5
}

fn default_alphas() -> Vec<AlphaSpec> {
    vec![AlphaSpec::Number(1.0)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    /// Circuit layers; defaults to `20n` for sweeps and `4n` for verification.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub grid: Option<RateGrid>,
    /// Inclusive `[lo, hi]` range of `s`; defaults to `[0, n]`.
    #[serde(default)]
    pub s_range: Option<[usize; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<AlphaSpec>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Operator specs for the rate sweep; defaults to `X^{⊗n}`,
    /// `|0⟩⟨0|^{⊗n}` and `X^{⊗⌊n/2⌋}⊗|0⟩⟨0|^{⊗⌈n/2⌉}`.
    #[serde(default)]
    pub operators: Option<Vec<String>>,
    /// Families for the TE-matching sweep; defaults to all three.
    #[serde(default)]
    pub families: Option<Vec<Family>>,
    /// Circuits drawn per family and operator during verification.
    #[serde(default)]
    pub circuits_per_operator: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, n: usize) -> Self {
        Self {
            experiment,
            n,
            depth: None,
            grid: None,
            s_range: None,
            samples: default_samples(),
            seed: 0,
            alphas: default_alphas(),
            out: None,
            operators: None,
            families: None,
            circuits_per_operator: None,
        }
    }

    /// Rate sweep over `{0, 0.1, …, 0.5}²` at the given size.
    pub fn fig3a_preset(n: usize) -> Self {
        let rates: Vec<f64> = (0..=5).map(|k| k as f64 / 10.0).collect();
        Self {
            grid: Some(RateGrid { p_ccx: rates.clone(), p_h: rates }),
            depth: Some(20 * n),
            ..Self::new(ExperimentKind::Fig3a, n)
        }
    }

    /// TE-matching sweep over every `s` and all three families.
    pub fn fig3b_preset(n: usize) -> Self {
        Self {
            depth: Some(20 * n),
            ..Self::new(ExperimentKind::Fig3b, n)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.alphas.is_empty() {
            return bad("alpha list is empty".into());
        }
        for a in &self.alphas {
            a.value().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.circuits_per_operator == Some(0) {
            return bad("circuits_per_operator must be at least 1".into());
        }
        let max_n = match self.experiment {
            ExperimentKind::Fig3a => 10,
            ExperimentKind::Fig3b => 16,
            ExperimentKind::Verify => 8,
            ExperimentKind::Crosscheck => 5,
        };
        if self.n > max_n {
            return bad(format!("{} supports n ≤ {max_n}, got {}", self.experiment, self.n));
        }
        if self.experiment == ExperimentKind::Fig3a {
            let Some(grid) = &self.grid else {
                return bad("fig3a needs a grid {p_ccx: [..], p_h: [..]}".into());
            };
            if grid.p_ccx.is_empty() || grid.p_h.is_empty() {
                return bad("grid must be nonempty".into());
            }
            for &a in &grid.p_ccx {
                for &b in &grid.p_h {
                    if !(a >= 0.0 && b >= 0.0 && a + b <= 1.0 + 1e-12) {
                        return bad(format!("rates ({a}, {b}) must be ≥ 0 with sum ≤ 1"));
                    }
                }
            }
            for spec in self.operators.iter().flatten() {
                let parsed: FactorSpec = spec.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
                if parsed.n() != self.n {
                    return bad(format!("operator {spec:?} has {} factors, expected {}", parsed.n(), self.n));
                }
            }
        }
        if self.experiment == ExperimentKind::Fig3b {
            let [lo, hi] = self.s_range();
            if lo > hi || hi > self.n {
                return bad(format!("s_range [{lo}, {hi}] must satisfy lo ≤ hi ≤ n"));
            }
            if self.families.as_ref().is_some_and(|f| f.is_empty() || f.contains(&Family::General)) {
                return bad("families must be a nonempty subset of F_zero, F_CBC, F_BBC".into());
            }
        }
        Ok(())
    }

    pub fn alpha_values(&self) -> Result<Vec<f64>> {
        self.alphas.iter().map(AlphaSpec::value).collect()
    }

    pub fn sweep_depth(&self) -> usize {
        self.depth.unwrap_or(20 * self.n)
    }

    pub fn s_range(&self) -> [usize; 2] {
        self.s_range.unwrap_or([0, self.n])
    }

    fn fig3a_operators(&self) -> Result<Vec<FactorSpec>> {
        match &self.operators {
            Some(list) => list.iter().map(|s| s.parse()).collect(),
            None => {
                let n = self.n;
                Ok(vec![
                    FactorSpec::uniform(n, Factor::Pauli(Pauli::X)),
                    FactorSpec::uniform(n, Factor::KetBra(0, 0)),
                    FactorSpec::x_then_zero(n, n / 2),
                ])
            }
        }
    }

    fn fig3b_families(&self) -> Vec<Family> {
        self.families.clone().unwrap_or(vec![Family::Zero, Family::Cbc, Family::Bbc])
    }
}

/// Seed for task `index` under `tag`, independent of scheduling.
pub fn task_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

/// One checked inequality `lhs ≤ rhs`, with `slack = rhs − lhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub operator: String,
    pub circuit_seed: Option<u64>,
    pub alpha: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub id: String,
    pub statement: String,
    pub tolerance: f64,
    pub instances: usize,
    pub violations: usize,
    pub worst_slack: f64,
    pub records: Vec<InstanceRecord>,
}

impl TheoremReport {
    pub fn new(id: &str, statement: &str, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            statement: statement.into(),
            tolerance,
            instances: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: InstanceRecord) {
        self.instances += 1;
        // NaN slack counts as a violation
        if !(r.slack >= -self.tolerance) {
            self.violations += 1;
        }
        if !(r.slack >= self.worst_slack) {
            self.worst_slack = r.slack;
        }
        self.records.push(r);
    }

    pub fn check(&mut self, operator: &str, circuit_seed: Option<u64>, alpha: Option<f64>, lhs: f64, rhs: f64) {
        self.push(InstanceRecord {
            operator: operator.into(),
            circuit_seed,
            alpha,
            lhs,
            rhs,
            slack: rhs - lhs,
        });
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn absorb(&mut self, other: TheoremReport) {
        for r in other.records {
            self.push(r);
        }
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:>7} instances  {:>5} violations  worst slack {:>12}  {}",
            self.id,
            self.instances,
            self.violations,
            fmt_sig12(self.worst_slack),
            self.statement
        )
    }
}

/// Collects reports with identical ids from independent tasks, keeping
/// the order in which ids first appear.
fn merge_reports(parts: Vec<Vec<TheoremReport>>) -> Vec<TheoremReport> {
    let mut out: Vec<TheoremReport> = Vec::new();
    for part in parts {
        for r in part {
            match out.iter_mut().find(|o| o.id == r.id) {
                Some(o) => o.absorb(r),
                None => out.push(r),
            }
        }
    }
    out
}

fn report<'a>(reports: &'a mut [TheoremReport], id: &str) -> &'a mut TheoremReport {
    reports.iter_mut().find(|r| r.id == id).expect("report declared up front")
}

fn entropies(p: &Spectrum, alphas: &[f64]) -> Result<Vec<f64>> {
    alphas.iter().map(|&a| resources::renyi(p, a)).collect()
}

fn new_verify_reports() -> Vec<TheoremReport> {
    let t = INEQUALITY_TOL;
    vec![
        TheoremReport::new("se<=cbc", "H_SE,α ≤ H_CBC,α", t),
        TheoremReport::new("se<=bbc", "H_SE,α ≤ H_BBC,α", t),
        TheoremReport::new("g-zero", "H_SE,α(U O U†) ≤ min{cap, H_CBC,α, H_BBC,α}(O), U ∈ F_zero", t),
        TheoremReport::new("g-cbc", "H_SE,α(U O U†) ≤ min{cap, H_CBC,α}(O), U ∈ F_CBC", t),
        TheoremReport::new("g-bbc", "H_SE,α(U O U†) ≤ min{cap, H_BBC,α}(O), U ∈ F_BBC", t),
        TheoremReport::new("cbc>=n-fte", "n − H_FTE,1/2 ≤ H_CBC,α", t),
        TheoremReport::new("bbc>=n-te", "n − H_TE,1/2 ≤ H_BBC,α", t),
        TheoremReport::new("cbc+bbc>=n", "n ≤ H_CBC,α + H_BBC,β, 1/α + 1/β = 2", t),
        TheoremReport::new("te+fte>=n", "n ≤ H_TE,α + H_FTE,β, 1/α + 1/β = 2", t),
        TheoremReport::new("cbc0-growth", "ΔH_CBC,0 ≤ 2·N_H", t),
        TheoremReport::new("bbc0-growth", "ΔH_BBC,0 ≤ N_T", t),
        TheoremReport::new("te-invariance", "‖γ(U O U†) − γ(O)‖∞ and ‖λ(U O U†) − λ(O)‖∞ ≤ 1e-9", 0.0),
        TheoremReport::new("zero-state-cbc", "H_SE,α(U |0⟩⟨0|^n U†) = 0, U ∈ F_CBC", 0.0),
        TheoremReport::new("pauli-bbc", "H_SE,α(U X^n U†) = 0, U ∈ F_BBC", 0.0),
    ]
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Checks every per-operator inequality and, over sampled circuits from
/// each free family, the SE generation bounds, the coherence counting
/// bounds and TE invariance. `samples` random operators are drawn.
/// Violations are reported as data.
pub fn verify_theorems(cfg: &ExperimentConfig) -> Result<Vec<TheoremReport>> {
    let n = cfg.n;
    if n == 0 || n > 8 {
        return Err(Error::Config(format!("verification runs densely and needs 1 ≤ n ≤ 8, got {n}")));
    }
    let alphas = cfg.alpha_values()?;
    let depth = cfg.depth.unwrap_or(4 * n);
    let circuits = cfg.circuits_per_operator.unwrap_or(10);
    let cut = resources::default_cut(n);
    let cap = resources::se_cap(n, &cut);
    let nf = n as f64;

    let parts: Vec<Vec<TheoremReport>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| -> Result<Vec<TheoremReport>> {
            let mut reps = new_verify_reports();
            let op_seed = task_seed(cfg.seed, 1, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(op_seed);
            let o = random::mixed_operator(n, &mut rng);
            let label = format!("mixed@{op_seed}");
            let label = label.as_str();

            let cbc = resources::cbc_spectrum(&o)?;
            let bbc = resources::bbc_spectrum(&o)?;
            let te = resources::te_spectrum(&o)?;
            let fte = resources::fte_spectrum(&o)?;
            let te_half = resources::renyi(&te, 0.5)?;
            let fte_half = resources::renyi(&fte, 0.5)?;
            let cbc_h = entropies(&cbc, &alphas)?;
            let bbc_h = entropies(&bbc, &alphas)?;
            let se_h = if n >= 2 { Some(entropies(&resources::se_spectrum(&o, &cut)?, &alphas)?) } else { None };

            for (k, &a) in alphas.iter().enumerate() {
                if let Some(se) = &se_h {
                    report(&mut reps, "se<=cbc").check(label, None, Some(a), se[k], cbc_h[k]);
                    report(&mut reps, "se<=bbc").check(label, None, Some(a), se[k], bbc_h[k]);
                }
                report(&mut reps, "cbc>=n-fte").check(label, None, Some(a), nf - fte_half, cbc_h[k]);
                report(&mut reps, "bbc>=n-te").check(label, None, Some(a), nf - te_half, bbc_h[k]);
            }
            for (a, b) in CONJUGATE_PAIRS {
                let s = resources::renyi(&cbc, a)? + resources::renyi(&bbc, b)?;
                report(&mut reps, "cbc+bbc>=n").check(label, None, Some(a), nf, s);
                let s = resources::renyi(&te, a)? + resources::renyi(&fte, b)?;
                report(&mut reps, "te+fte>=n").check(label, None, Some(a), nf, s);
            }

            let zero = from_factors(&FactorSpec::uniform(n, Factor::KetBra(0, 0)))?;
            let xs = from_factors(&FactorSpec::uniform(n, Factor::Pauli(Pauli::X)))?;
            for c in 0..circuits {
                let cseed = task_seed(op_seed, 2, c as u64);
                if n >= 2 {
                    for (fam, id) in [(Family::Zero, "g-zero"), (Family::Cbc, "g-cbc"), (Family::Bbc, "g-bbc")] {
                        let u = random_family(fam, n, depth, cseed)?;
                        let after = entropies(&resources::se_spectrum(&apply_circuit(&o, &u)?, &cut)?, &alphas)?;
                        for (k, &a) in alphas.iter().enumerate() {
                            let bound = match fam {
                                Family::Zero => cap.min(cbc_h[k]).min(bbc_h[k]),
                                Family::Cbc => cap.min(cbc_h[k]),
                                _ => cap.min(bbc_h[k]),
                            };
                            report(&mut reps, id).check(label, Some(cseed), Some(a), after[k], bound);
                        }
                        let corner = match fam {
                            Family::Cbc => Some((&zero, "zero-state-cbc", "k00^n")),
                            Family::Bbc => Some((&xs, "pauli-bbc", "X^n")),
                            _ => None,
                        };
                        if let Some((op, id, name)) = corner {
                            let se = entropies(&resources::se_spectrum(&apply_circuit(op, &u)?, &cut)?, &alphas)?;
                            for (k, &a) in alphas.iter().enumerate() {
                                report(&mut reps, id).check(name, Some(cseed), Some(a), se[k], ZERO_TOL);
                            }
                        }
                    }
                }

                let mut crng = ChaCha8Rng::seed_from_u64(cseed);
                let kinds = [GateKind::H, GateKind::S, GateKind::T, GateKind::CX, GateKind::CCX];
                let u = random_gates(n, 4 * n, &kinds, &mut crng)?;
                let after = apply_circuit(&o, &u)?;
                let c0 = resources::renyi(&resources::cbc_spectrum(&after)?, 0.0)? - resources::renyi(&cbc, 0.0)?;
                report(&mut reps, "cbc0-growth").check(label, Some(cseed), Some(0.0), c0, 2.0 * census(&u).n_h() as f64);
                let u = random_gates(n, 4 * n, &[GateKind::H, GateKind::S, GateKind::T, GateKind::TDG, GateKind::CX], &mut crng)?;
                let after = apply_circuit(&o, &u)?;
                let b0 = resources::renyi(&resources::bbc_spectrum(&after)?, 0.0)? - resources::renyi(&bbc, 0.0)?;
                report(&mut reps, "bbc0-growth").check(label, Some(cseed), Some(0.0), b0, census(&u).n_t() as f64);

                let u = random_gates(n, 100, &kinds, &mut crng)?;
                let after = apply_circuit(&o, &u)?;
                let dte = linf(&resources::te_spectrum(&after)?.sorted_desc(), &te.sorted_desc());
                let dfte = linf(&resources::fte_spectrum(&after)?.weights().to_vec(), fte.weights());
                report(&mut reps, "te-invariance").check(label, Some(cseed), None, dte.max(dfte), TE_INVARIANCE_TOL);
            }
            Ok(reps)
        })
        .collect::<Result<_>>()?;
    let mut out = merge_reports(parts);
    out.retain(|r| r.instances > 0);
    Ok(out)
}

/// One aggregated sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub p_ccx: Option<f64>,
    pub p_h: Option<f64>,
    pub s: Option<usize>,
    pub family: Option<Family>,
    pub operator: String,
    pub alpha: f64,
    pub se_mean: f64,
    pub se_std: f64,
    pub se_max: f64,
    pub cap: f64,
    pub samples: usize,
    pub depth: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub rows: Vec<SweepRow>,
}

/// `%.12g`-style formatting; `inf` for infinities.
pub fn fmt_sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        trim(&format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{}", trim(mant), exp)
    }
}

impl SweepResult {
    /// Rows whose maximum exceeds the cap by more than the inequality
    /// tolerance.
    pub fn cap_violations(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| !(r.se_max <= r.cap + INEQUALITY_TOL)).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let f = fmt_sig12;
        match self.experiment {
            ExperimentKind::Fig3b => {
                wr.write_record(["s", "family", "alpha", "se_mean", "se_std", "se_max", "cap", "samples", "depth", "seed"])?;
                for r in &self.rows {
                    wr.write_record([
                        r.s.map_or(String::new(), |s| s.to_string()),
                        r.family.map_or(String::new(), |x| x.name().to_string()),
                        f(r.alpha),
                        f(r.se_mean),
                        f(r.se_std),
                        f(r.se_max),
                        f(r.cap),
                        r.samples.to_string(),
                        r.depth.to_string(),
                        r.seed.to_string(),
                    ])?;
                }
            }
            _ => {
                wr.write_record([
                    "p_ccx", "p_h", "operator", "alpha", "se_mean", "se_std", "se_max", "cap", "samples", "depth", "seed",
                ])?;
                for r in &self.rows {
                    wr.write_record([
                        r.p_ccx.map_or(String::new(), f),
                        r.p_h.map_or(String::new(), f),
                        r.operator.clone(),
                        f(r.alpha),
                        f(r.se_mean),
                        f(r.se_std),
                        f(r.se_max),
                        f(r.cap),
                        r.samples.to_string(),
                        r.depth.to_string(),
                        r.seed.to_string(),
                    ])?;
                }
            }
        }
        wr.flush().map_err(|source| Error::Io { path: PathBuf::from("<csv>"), source })?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Mean, sample standard deviation and maximum.
fn aggregate(xs: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, std, max)
}

/// SE of `U O U†` at each order, picking the cheapest exact simulator for
/// the gates present.
fn evolved_se(spec: &FactorSpec, u: &Circuit, cut: &[usize], alphas: &[f64]) -> Result<Vec<f64>> {
    let kinds = census(u);
    let spectrum = if kinds.n_h() == 0 {
        let mut s = SparseOperator::from_dense(&from_factors(spec)?);
        s.apply_circuit(u)?;
        s.se_spectrum(cut)?
    } else if kinds.n_t() == 0 && kinds.n_ccx() == 0 {
        let p = PauliSum::from_dense(&from_factors(spec)?)?;
        osf::heisenberg_propagate(&p, u, usize::MAX)?.se_spectrum(cut)?
    } else {
        resources::se_spectrum(&apply_circuit(&from_factors(spec)?, u)?, cut)?
    };
    entropies(&spectrum, alphas)
}

/// SE of random layered circuits applied to each operator over a grid of
/// CCX and H rates. The cap column is the SE generation bound for the
/// family the rates confine the circuits to.
pub fn run_fig3a(cfg: &ExperimentConfig) -> Result<SweepResult> {
    if cfg.experiment != ExperimentKind::Fig3a {
        return Err(Error::Config(format!("expected a fig3a config, got {}", cfg.experiment)));
    }
    cfg.validate()?;
    let n = cfg.n;
    if n < 2 {
        return Err(Error::Config("SE needs at least two qubits".into()));
    }
    let grid = cfg.grid.as_ref().expect("validated");
    let alphas = cfg.alpha_values()?;
    let depth = cfg.sweep_depth();
    let cut = resources::default_cut(n);
    let full_cap = resources::se_cap(n, &cut);
    let ops = cfg.fig3a_operators()?;

    let points: Vec<(usize, f64, f64)> = grid
        .p_ccx
        .iter()
        .flat_map(|&a| grid.p_h.iter().map(move |&b| (a, b)))
        .enumerate()
        .map(|(i, (a, b))| (i, a, b))
        .collect();
    let mut tasks = Vec::new();
    for &(pi, a, b) in &points {
        for (oi, spec) in ops.iter().enumerate() {
            for k in 0..cfg.samples {
                tasks.push((pi, a, b, oi, spec, k));
            }
        }
    }
    let values: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(pi, a, b, _, spec, k)| {
            let seed = task_seed(cfg.seed, 3 + pi as u64, k as u64);
            let u = random_layered(n, depth, a, b, seed)?;
            evolved_se(spec, &u, &cut, &alphas)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut chunks = values.chunks(cfg.samples);
    for &(_, a, b) in &points {
        for spec in &ops {
            let chunk = chunks.next().expect("one chunk per (point, operator)");
            let o = from_factors(spec)?;
            for (ai, &alpha) in alphas.iter().enumerate() {
                let xs: Vec<f64> = chunk.iter().map(|v| v[ai]).collect();
                let (mean, std, max) = aggregate(&xs);
                let cbc = resources::cbc_entropy(&o, alpha)?;
                let bbc = resources::bbc_entropy(&o, alpha)?;
                let cap = match (a > 0.0, b > 0.0) {
                    (false, false) => full_cap.min(cbc).min(bbc),
                    (true, false) => full_cap.min(cbc),
                    (false, true) => full_cap.min(bbc),
                    (true, true) => full_cap,
                };
                rows.push(SweepRow {
                    p_ccx: Some(a),
                    p_h: Some(b),
                    s: None,
                    family: None,
                    operator: spec.to_string(),
                    alpha,
                    se_mean: mean,
                    se_std: std,
                    se_max: max,
                    cap,
                    samples: cfg.samples,
                    depth,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(SweepResult { experiment: ExperimentKind::Fig3a, n, rows })
}

/// SE of `X^{⊗s}⊗|0⟩⟨0|^{⊗(n−s)}` after random circuits from each free
/// family. `F_zero`/`F_CBC` circuits run on the sparse matrix, `F_BBC`
/// circuits on the Pauli expansion, so `n = 10` needs no dense matrices.
pub fn run_fig3b(cfg: &ExperimentConfig) -> Result<SweepResult> {
    if cfg.experiment != ExperimentKind::Fig3b {
        return Err(Error::Config(format!("expected a fig3b config, got {}", cfg.experiment)));
    }
    cfg.validate()?;
    let n = cfg.n;
    if n < 2 {
        return Err(Error::Config("SE needs at least two qubits".into()));
    }
    let alphas = cfg.alpha_values()?;
    let depth = cfg.sweep_depth();
    let cut = resources::default_cut(n);
    let full_cap = resources::se_cap(n, &cut);
    let families = cfg.fig3b_families();
    let [lo, hi] = cfg.s_range();

    let mut tasks = Vec::new();
    for s in lo..=hi {
        for &fam in &families {
            for k in 0..cfg.samples {
                tasks.push((s, fam, k));
            }
        }
    }
    let values: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&(s, fam, k)| {
            let seed = task_seed(cfg.seed, 100 + fam as u64, k as u64);
            let u = random_family(fam, n, depth, seed)?;
            let spectrum = match fam {
                Family::Bbc => {
                    let p = PauliSum::x_then_zero(n, s)?;
                    osf::heisenberg_propagate(&p, &u, usize::MAX)?.se_spectrum(&cut)?
                }
                _ => {
                    let mut o = SparseOperator::x_then_zero(n, s)?;
                    o.apply_circuit(&u)?;
                    o.se_spectrum(&cut)?
                }
            };
            entropies(&spectrum, &alphas)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut chunks = values.chunks(cfg.samples);
    for s in lo..=hi {
        for &fam in &families {
            let chunk = chunks.next().expect("one chunk per (s, family)");
            let cap = match fam {
                Family::Cbc => s as f64,
                Family::Bbc => (n - s) as f64,
                _ => s.min(n - s) as f64,
            }
            .min(full_cap);
            for (ai, &alpha) in alphas.iter().enumerate() {
                let xs: Vec<f64> = chunk.iter().map(|v| v[ai]).collect();
                let (mean, std, max) = aggregate(&xs);
                rows.push(SweepRow {
                    p_ccx: None,
                    p_h: None,
                    s: Some(s),
                    family: Some(fam),
                    operator: FactorSpec::x_then_zero(n, s).to_string(),
                    alpha,
                    se_mean: mean,
                    se_std: std,
                    se_max: max,
                    cap,
                    samples: cfg.samples,
                    depth,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(SweepResult { experiment: ExperimentKind::Fig3b, n, rows })
}

const CLIFFORD_KINDS: [GateKind; 7] = [
    GateKind::H,
    GateKind::S,
    GateKind::SDG,
    GateKind::CX,
    GateKind::CZ,
    GateKind::SWAP,
    GateKind::Y,
];

/// Tableau overlaps `⟨A|U⊗U*|B⟩` for random ket-bra/Pauli products
/// against the dense inner product.
pub fn crosscheck_overlaps(n: usize, count: usize, seed: u64) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new("osf-overlap", "|tableau − dense| overlap deviation ≤ 1e-10", 0.0);
    let rows: Vec<(String, u64, f64)> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<(String, u64, f64)> {
            let s = task_seed(seed, 200, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let a = random::product_spec(n, &mut rng);
            let b = if rng.random_bool(0.5) { a.clone() } else { random::product_spec(n, &mut rng) };
            let u = random_gates(n, 6 * n, &CLIFFORD_KINDS, &mut rng)?;
            let sa = osf::stab_from_basis_operator(&a)?;
            let mut sb = osf::stab_from_basis_operator(&b)?;
            for g in &u.gates {
                sb.apply_doubled_gate(g)?;
            }
            let fast = osf::inner_product(&sa, &sb)?;
            let dense = vectorize(&from_factors(&a)?).inner(&vectorize(&apply_circuit(&from_factors(&b)?, &u)?));
            Ok((format!("{a} | {b}"), s, (fast - dense).norm()))
        })
        .collect::<Result<_>>()?;
    for (label, s, dev) in rows {
        rep.check(&label, Some(s), None, dev, OVERLAP_TOL);
    }
    Ok(rep)
}

/// Pauli-sum propagation through Clifford circuits with `t_count` T/T†
/// gates against dense conjugation. Returns the deviation report and the
/// term-count report (`terms ≤ 2^{t_count}·initial`).
pub fn crosscheck_propagation(n: usize, count: usize, t_count: usize, seed: u64) -> Result<(TheoremReport, TheoremReport)> {
    let mut dev_rep = TheoremReport::new("osf-paulisum", "|Pauli-sum − dense| max entry deviation ≤ 1e-9", 0.0);
    let mut term_rep = TheoremReport::new("osf-terms", "terms ≤ 2^{N_T}·initial terms", 0.0);
    let rows: Vec<(u64, f64, usize, usize)> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<(u64, f64, usize, usize)> {
            let s = task_seed(seed, 201, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let o = random::mixed_operator(n, &mut rng);
            let mut u = Circuit::empty(n);
            for _ in 0..t_count {
                u.gates.extend(random_gates(n, 3 * n, &CLIFFORD_KINDS, &mut rng)?.gates);
                let kind = if rng.random_bool(0.5) { GateKind::T } else { GateKind::TDG };
                u.push(Gate::one(kind, rng.random_range(0..n)))?;
            }
            u.gates.extend(random_gates(n, 3 * n, &CLIFFORD_KINDS, &mut rng)?.gates);
            let start = PauliSum::from_dense(&o)?;
            let out = osf::heisenberg_propagate(&start, &u, usize::MAX)?;
            let dense = apply_circuit(&o, &u)?;
            let dev = out.to_dense()?.matrix().max_abs_diff(dense.matrix());
            Ok((s, dev, out.len(), start.len()))
        })
        .collect::<Result<_>>()?;
    for (s, dev, terms, initial) in rows {
        dev_rep.check("mixed", Some(s), None, dev, PROPAGATION_TOL);
        term_rep.check("mixed", Some(s), None, terms as f64, (initial << t_count) as f64);
    }
    Ok((dev_rep, term_rep))
}

/// Magic-IQP tableau values against the dense unitary.
pub fn crosscheck_magic_iqp(n: usize, count: usize, seed: u64) -> Result<TheoremReport> {
    let mut rep = TheoremReport::new("osf-magic-iqp", "|tableau − dense| magic-IQP deviation ≤ 1e-10", 0.0);
    let rows: Vec<(u64, f64)> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<(u64, f64)> {
            let s = task_seed(seed, 202, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let uc = random_gates(n, 6 * n, &CLIFFORD_KINDS, &mut rng)?;
            let fast = osf::magic_iqp_value(n, &uc)?;
            let dense = osf::magic_iqp_dense(n, &uc)?;
            Ok((s, (fast - dense).abs()))
        })
        .collect::<Result<_>>()?;
    for (s, dev) in rows {
        rep.check(&format!("X^{n}"), Some(s), None, dev, OVERLAP_TOL);
    }
    Ok(rep)
}

/// All stabilizer-path cross-checks at size `n` with `samples` instances
/// each; magic-IQP runs at every size `1..=n`.
pub fn crosscheck_osf(cfg: &ExperimentConfig) -> Result<Vec<TheoremReport>> {
    let n = cfg.n;
    if n == 0 || n > 5 {
        return Err(Error::Config(format!("cross-checks run densely and need 1 ≤ n ≤ 5, got {n}")));
    }
    let (dev, terms) = crosscheck_propagation(n, cfg.samples, 3, cfg.seed)?;
    let mut magic = TheoremReport::new("osf-magic-iqp", "|tableau − dense| magic-IQP deviation ≤ 1e-10", 0.0);
    for m in 1..=n {
        magic.absorb(crosscheck_magic_iqp(m, cfg.samples, task_seed(cfg.seed, 203, m as u64))?);
    }
    Ok(vec![crosscheck_overlaps(n, cfg.samples, cfg.seed)?, dev, terms, magic])
}
