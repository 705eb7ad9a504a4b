//! Command-line interface: tensor I/O, subcommand dispatch, and
//! machine-readable JSON reports for the spectral analysis library.

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use tenspec::perron::SolverOptions;
use tenspec::tensor::DenseTensor;
use tenspec::TenspecError;

/// Registry of which library module each subcommand exercises; the coverage
/// test asserts every public module is reachable from exactly one
/// subcommand.
pub const MODULE_REGISTRY: &[(&str, &str)] = &[
    ("structure", "structure"),
    ("spectral", "perron"),
    ("perturb", "perron"),
    ("scale", "perron"),
    ("entropy", "entropy"),
    ("tropical", "tropical"),
    ("norm", "norm"),
    ("audit", "report"),
    ("gen", "ensemble"),
];

#[derive(Parser)]
#[command(
    name = "tenspec",
    version,
    about = "Perron, tropical, and entropic spectral analysis of nonnegative tensors"
)]
struct Cli {
    /// Render reports as human-readable text instead of compact JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a tensor: weak irreducibility, irreducibility, weak
    /// indecomposability, indecomposability.
    Structure { file: PathBuf },
    /// Spectral radius with certified Collatz-Wielandt bounds and left/right
    /// eigendata.
    Spectral {
        file: PathBuf,
        /// Certified-gap tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Iteration budget.
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// First-order response of the spectral radius to a perturbation
    /// direction.
    Perturb {
        file: PathBuf,
        direction: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Diagonal equivalence scaling to prescribed right/left eigendata.
    Scale {
        file: PathBuf,
        /// JSON file holding the target right vector u.
        #[arg(long)]
        u: PathBuf,
        /// JSON file holding the target left vector w (u.w must be 1).
        #[arg(long)]
        w: PathBuf,
    },
    /// Entropy objective of an occupation measure, or of the optimal one.
    Entropy {
        file: PathBuf,
        /// JSON tensor file holding a candidate occupation measure.
        #[arg(long)]
        measure: Option<PathBuf>,
        /// Evaluate the optimal occupation measure built from the eigendata.
        #[arg(long)]
        optimal: bool,
    },
    /// Tropical (max-times) eigenvalue by one or all of the three solvers.
    Tropical {
        file: PathBuf,
        /// km, policy, cycles, or all.
        #[arg(long, default_value = "policy")]
        method: String,
        /// Write the primal LP here and the dual LP next to it (.dual.lp).
        #[arg(long)]
        emit_lp: Option<PathBuf>,
    },
    /// Spectral norm lower bound by alternating maximization.
    Norm {
        file: PathBuf,
        /// Number of random restarts beyond the deterministic starts.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Run an audit suite and emit a pass/fail report with margins.
    Audit {
        file: PathBuf,
        /// structure, perron, entropy, tropical, norms, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Ensemble seed (TENSPEC_SEED overrides).
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Generate a seeded random weakly irreducible tensor.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Target density of positive entries before tail symmetrization.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Ensemble seed (TENSPEC_SEED overrides).
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Emit sparse support format instead of dense.
        #[arg(long)]
        sparse: bool,
        /// Output path; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// Environment override for every seeded subcommand.
fn effective_seed(flag: u64) -> u64 {
    match std::env::var("TENSPEC_SEED") {
        Ok(s) => s.parse().unwrap_or(flag),
        Err(_) => flag,
    }
}

fn load_dense(path: &PathBuf) -> anyhow::Result<DenseTensor> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let loaded = tenspec::io::parse_tensor_json(&text)?;
    let t = loaded.to_dense();
    if t.shape().len() > 10_000_000 {
        eprintln!(
            "warning: tensor has {} entries; desk-scale algorithms may be slow",
            t.shape().len()
        );
    }
    Ok(t)
}

fn load_vector(path: &PathBuf) -> anyhow::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(tenspec::io::parse_vector(&text)?)
}

fn print_json<T: Serialize>(value: &T, pretty: bool) -> anyhow::Result<()> {
    if pretty {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        println!("{}", serde_json::to_string(value)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectralOut {
    rho: f64,
    u: Option<Vec<f64>>,
    u_last_one: Option<Vec<f64>>,
    w: Option<Vec<f64>>,
    cw_lower: f64,
    cw_upper: f64,
    iterations: usize,
    residual: f64,
    regularized: bool,
}

#[derive(Serialize)]
struct EntropyOut {
    /// None encodes minus infinity (mass on a zero entry).
    objective: Option<f64>,
    log_rho: f64,
    balance_residual: f64,
    optimal: bool,
}

#[derive(Serialize)]
struct TropicalOut {
    method: String,
    rho_trop: f64,
    log_rho: f64,
    v: Vec<f64>,
    log_residual: f64,
}

#[derive(Serialize)]
struct NormOut {
    value: f64,
    maximizers: Vec<Vec<f64>>,
    restarts: usize,
    is_lower_bound: bool,
    cross_start_spread: f64,
}

fn render_audit_table(report: &tenspec::report::AuditReport) {
    println!(
        "suite {}  seed {}  version {}  digest {}",
        report.suite, report.seed, report.version, report.input_digest
    );
    for r in &report.records {
        let status = match r.status {
            tenspec::report::CheckStatus::Pass => "pass",
            tenspec::report::CheckStatus::Fail => "FAIL",
            tenspec::report::CheckStatus::Inconclusive => "inconclusive",
        };
        println!(
            "{status:>12}  {:<28} margin {:>12.3e}  tol {:>8.1e}  {}",
            r.id, r.margin, r.tolerance, r.reference
        );
    }
    println!("{}", if report.passed { "PASSED" } else { "FAILED" });
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Structure { file } => {
            let t = load_dense(&file)?;
            let report = tenspec::structure::analyze(&t)?;
            print_json(&report, cli.pretty)?;
        }
        Command::Spectral { file, tol, max_iter } => {
            let t = load_dense(&file)?;
            let opts = SolverOptions { tol, max_iter };
            let cert = tenspec::perron::spectral_radius(&t, &opts)?;
            print_json(
                &SpectralOut {
                    rho: cert.rho,
                    u: cert.u.clone(),
                    u_last_one: cert.u_last_one.clone(),
                    w: cert.w.clone(),
                    cw_lower: cert.cw_lower,
                    cw_upper: cert.cw_upper,
                    iterations: cert.iterations,
                    residual: cert.residual,
                    regularized: cert.regularized,
                },
                cli.pretty,
            )?;
        }
        Command::Perturb { file, direction, tol } => {
            let t = load_dense(&file)?;
            let s = load_dense(&direction)?;
            let opts = SolverOptions { tol, max_iter: 100_000 };
            let cert = tenspec::perron::spectral_radius(&t, &opts)?;
            let coefficient = tenspec::perron::perturbation_coefficient(&t, &s, &cert)?;
            print_json(
                &serde_json::json!({ "rho": cert.rho, "coefficient": coefficient }),
                cli.pretty,
            )?;
        }
        Command::Scale { file, u, w } => {
            let t = load_dense(&file)?;
            let uv = load_vector(&u)?;
            let wv = load_vector(&w)?;
            let cert =
                tenspec::perron::diagonal_equivalence(&t, &uv, &wv, &SolverOptions::default())?;
            print_json(
                &serde_json::json!({
                    "b": cert.b,
                    "c": cert.c,
                    "objective_gradient_norm": cert.objective_gradient_norm,
                    "iterations": cert.iterations,
                }),
                cli.pretty,
            )?;
        }
        Command::Entropy { file, measure, optimal } => {
            let t = load_dense(&file)?;
            let cert = tenspec::perron::spectral_radius(&t, &SolverOptions::default())?;
            if cert.rho <= 0.0 {
                return Err(TenspecError::Domain("zero tensor has no entropy certificate".into()).into());
            }
            let log_rho = cert.rho.ln();
            let m = match (&measure, optimal) {
                (Some(path), false) => {
                    let mu = load_dense(path)?;
                    let mu = if mu.partially_symmetric { mu } else { mu.symmetrize_tail() };
                    tenspec::entropy::TensorOccupationMeasure::new(mu)?
                }
                (None, _) => tenspec::entropy::optimal_tensor_measure(&t, &cert)?,
                (Some(_), true) => {
                    return Err(TenspecError::Domain(
                        "--measure and --optimal are mutually exclusive".into(),
                    )
                    .into())
                }
            };
            let objective = tenspec::entropy::tensor_entropy_objective(&t, &m)?;
            print_json(
                &EntropyOut {
                    objective: objective.finite(),
                    log_rho,
                    balance_residual: m.balance_residual(),
                    optimal: measure.is_none(),
                },
                cli.pretty,
            )?;
        }
        Command::Tropical { file, method, emit_lp } => {
            let t = load_dense(&file)?;
            let ts = if t.partially_symmetric { t.clone() } else { t.symmetrize_tail() };
            let sparse = tenspec::tensor::SparseSupportTensor::from_dense(&ts)?;
            if let Some(path) = &emit_lp {
                let lp = tenspec::tropical::emit_lp(&sparse)?;
                std::fs::write(path, &lp.primal)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                let dual_path = path.with_extension("dual.lp");
                std::fs::write(&dual_path, &lp.dual)
                    .with_context(|| format!("cannot write {}", dual_path.display()))?;
            }
            let mut outs = Vec::new();
            let wanted: Vec<&str> = match method.as_str() {
                "all" => vec!["km", "policy", "cycles"],
                m @ ("km" | "policy" | "cycles") => vec![m],
                other => {
                    return Err(TenspecError::Domain(format!(
                        "unknown method '{other}' (expected km, policy, cycles, or all)"
                    ))
                    .into())
                }
            };
            for m in wanted {
                let pair = match m {
                    "km" => tenspec::tropical::tropical_eigenpair_km(&sparse, 1e-12, 200_000)?,
                    "policy" => tenspec::tropical::tropical_eigenpair_policy(&sparse)?,
                    _ => tenspec::tropical::tropical_radius_by_cycles(&sparse)?,
                };
                outs.push(TropicalOut {
                    method: m.to_string(),
                    rho_trop: pair.rho_trop,
                    log_rho: pair.log_rho,
                    log_residual: pair.log_residual(&sparse),
                    v: pair.v,
                });
            }
            print_json(&outs, cli.pretty)?;
        }
        Command::Norm { file, restarts } => {
            let t = load_dense(&file)?;
            let cert = tenspec::norm::spectral_norm(&t, restarts, 1e-12)?;
            print_json(
                &NormOut {
                    value: cert.value,
                    maximizers: cert.maximizers,
                    restarts: cert.restarts,
                    is_lower_bound: cert.is_lower_bound,
                    cross_start_spread: cert.cross_start_spread,
                },
                cli.pretty,
            )?;
        }
        Command::Audit { file, suite, seed } => {
            let t = load_dense(&file)?;
            let report = tenspec::report::audit(&suite, &t, effective_seed(seed))?;
            if cli.pretty {
                render_audit_table(&report);
            } else {
                println!("{}", serde_json::to_string(&report)?);
            }
            if !report.passed {
                return Ok(1);
            }
        }
        Command::Gen { n, d, density, seed, sparse, out } => {
            let mut rng = tenspec::ensemble::rng_from_seed(effective_seed(seed));
            let t = tenspec::ensemble::random_weakly_irreducible(n, d, density, &mut rng)?;
            let text = if sparse {
                let s = tenspec::tensor::SparseSupportTensor::from_dense(&t.symmetrize_tail())?;
                tenspec::io::sparse_to_json(&s)?
            } else {
                tenspec::io::dense_to_json(&t)?
            };
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => println!("{text}"),
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
