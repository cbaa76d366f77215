use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use choilab::circuits::Circuit;
use choilab::lab::{self, AlphaSpec, ExperimentConfig, ExperimentKind};
use choilab::opspace::{from_factors, FactorSpec};
use choilab::osf::{self, PauliString, XyCircuit};
use choilab::resources::{self, Measure};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "choilab", version, about = "Resource measures and simulation of operator conjugation U·O·U†")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Base seed; overrides the seed in a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// SE, TE, FTE, CBC and BBC of a product operator.
    Entropy {
        /// e.g. `pauli:XXY`, `ketbra:01,10` or `X,k00,Z`.
        #[arg(long)]
        operator: String,
        /// Comma-separated orders, e.g. `0,1/2,1,2,inf`.
        #[arg(long, default_value = "1")]
        alpha: String,
        /// Comma-separated qubits on one side of the space cut.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Checks the entropy inequalities on random operators and circuits.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        circuits: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "0,1/2,1,2,inf")]
        alpha: String,
        /// Print every failing instance.
        #[arg(long)]
        verbose: bool,
    },
    /// Runs an SE sweep from a JSON config and writes CSV.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense cross-checks of the stabilizer paths.
    Crosscheck {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Stabilizer-formalism computations.
    Osf {
        #[command(subcommand)]
        command: OsfCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Fig3a,
    Fig3b,
}

#[derive(Subcommand)]
enum OsfCommand {
    /// ⟨⟨A| U⊗U* |B⟩⟩ for ket-bra/Pauli products and a Clifford circuit.
    Overlap {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// 2^{-n} Tr(X^n U X^n U†) with U = T^n·U_c·T^n and Clifford U_c.
    MagicIqp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        circuit: PathBuf,
    },
    /// 2^{-n} Tr(F U X^n U†) for an X/Y-preserving circuit.
    Xy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        circuit: PathBuf,
        /// Final Pauli string, e.g. `XYX` or `-YYX`.
        #[arg(long = "final")]
        final_pauli: String,
    },
}

fn parse_alphas(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|t| resources::parse_alpha(t).map_err(Into::into))
        .collect()
}

fn parse_cut(list: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad qubit index {t:?}")))
        .collect()
}

fn read_circuit(path: &Path, n: Option<usize>) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Circuit::parse(&text, n)?)
}

fn alpha_label(a: f64) -> String {
    lab::fmt_sig12(a)
}

fn entropy(operator: &str, alpha: &str, cut: Option<&str>) -> Result<()> {
    let spec: FactorSpec = operator.parse()?;
    let o = from_factors(&spec)?;
    let alphas = parse_alphas(alpha)?;
    let cut = cut.map(parse_cut).transpose()?;
    let profile = resources::resource_profile(&o, &alphas, cut.as_deref())?;
    println!("operator {spec}  n={}  cut {:?}", profile.n, profile.cut);
    println!("{:<8}{:>8}{:>20}", "measure", "alpha", "bits");
    for m in Measure::ALL {
        for &a in &alphas {
            if let Some(v) = profile.get(m, a) {
                println!("{:<8}{:>8}{:>20}", m.name(), alpha_label(a), lab::fmt_sig12(v));
            }
        }
    }
    Ok(())
}

fn print_reports(reports: &[lab::TheoremReport], verbose: bool) -> bool {
    let mut ok = true;
    for r in reports {
        println!("{} {r}", if r.passed() { "PASS" } else { "FAIL" });
        ok &= r.passed();
        if verbose {
            for rec in r.records.iter().filter(|x| !(x.slack >= -r.tolerance)) {
                println!(
                    "    {} seed={:?} alpha={:?} lhs={} rhs={} slack={}",
                    rec.operator,
                    rec.circuit_seed,
                    rec.alpha,
                    lab::fmt_sig12(rec.lhs),
                    lab::fmt_sig12(rec.rhs),
                    lab::fmt_sig12(rec.slack)
                );
            }
        }
    }
    ok
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Entropy { operator, alpha, cut } => entropy(&operator, &alpha, cut.as_deref())?,
        Command::Verify { n, samples, circuits, depth, alpha, verbose } => {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Verify, n);
            cfg.samples = samples;
            cfg.seed = seed.unwrap_or(0);
            cfg.depth = depth;
            cfg.circuits_per_operator = circuits;
            cfg.alphas = parse_alphas(&alpha)?.into_iter().map(AlphaSpec::from).collect();
            cfg.validate()?;
            return Ok(print_reports(&lab::verify_theorems(&cfg)?, verbose));
        }
        Command::Sweep { kind, config, out } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            let expected = match kind {
                SweepKind::Fig3a => ExperimentKind::Fig3a,
                SweepKind::Fig3b => ExperimentKind::Fig3b,
            };
            if cfg.experiment != expected {
                bail!("config {} describes a {} experiment, not {expected}", config.display(), cfg.experiment);
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let result = match kind {
                SweepKind::Fig3a => lab::run_fig3a(&cfg)?,
                SweepKind::Fig3b => lab::run_fig3b(&cfg)?,
            };
            match out.or(cfg.out.clone()) {
                Some(path) => {
                    result.save(&path)?;
                    eprintln!("wrote {} rows to {}", result.rows.len(), path.display());
                }
                None => print!("{}", result.to_csv_string()?),
            }
            let bad = result.cap_violations();
            for r in &bad {
                eprintln!("cap exceeded: {r:?}");
            }
            return Ok(bad.is_empty());
        }
        Command::Crosscheck { n, samples } => {
            let mut cfg = ExperimentConfig::new(ExperimentKind::Crosscheck, n);
            cfg.samples = samples;
            cfg.seed = seed.unwrap_or(0);
            cfg.validate()?;
            return Ok(print_reports(&lab::crosscheck_osf(&cfg)?, false));
        }
        Command::Osf { command } => match command {
            OsfCommand::Overlap { a, b, circuit } => {
                let a: FactorSpec = a.parse()?;
                let b: FactorSpec = b.parse()?;
                if a.n() != b.n() {
                    bail!("operators act on {} and {} qubits", a.n(), b.n());
                }
                let sa = osf::stab_from_basis_operator(&a)?;
                let mut sb = osf::stab_from_basis_operator(&b)?;
                if let Some(path) = circuit {
                    for g in &read_circuit(&path, Some(a.n()))?.gates {
                        sb.apply_doubled_gate(g)?;
                    }
                }
                let v = osf::inner_product_exact(&sa, &sb)?;
                let c = v.to_c64();
                println!("{v}  ({} {:+}i)", lab::fmt_sig12(c.re), lab::fmt_sig12(c.im));
            }
            OsfCommand::MagicIqp { n, circuit } => {
                let uc = read_circuit(&circuit, Some(n))?;
                let v = osf::magic_iqp_exact(n, &uc)?;
                println!("{v}  ({})", lab::fmt_sig12(v.to_c64().re));
            }
            OsfCommand::Xy { n, circuit, final_pauli } => {
                let c = XyCircuit::from_circuit(&read_circuit(&circuit, Some(n))?)?;
                let f: PauliString = final_pauli.parse()?;
                let v = osf::xy_simulate_exact(n, &c, &f)?;
                println!("{v}  ({})", lab::fmt_sig12(v.to_c64().re));
            }
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
