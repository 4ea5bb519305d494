//! Command-line front end: ingest a generator (built-in model or JSON file),
//! run spectrum / nash / mixing analyses, emit JSON or CSV reports.
//!
//! Exit codes: 0 success, 2 input or structure errors, 3 falsified
//! certificate.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nash_mixer::io::{self, ErrorObject, MatrixJson, SCHEMA_VERSION};
use nash_mixer::lp::FullRankState;
use nash_mixer::models;
use nash_mixer::nash::{self, NashCertificate, NashKind};
use nash_mixer::semigroup::Semigroup;
use nash_mixer::LindbladGenerator;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

/// Default RNG seed; runs are reproducible unless overridden via --seed or
/// NASH_MIXER_SEED.
const DEFAULT_SEED: u64 = 0x4e41_5348; // "NASH"

#[derive(Parser)]
#[command(name = "nash-mixer", version, about = "Mixing analysis of reversible quantum dynamical semigroups via Nash inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    cert: CertOpts,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of −L, spectral gap, counting function and ζ(t)
    Spectrum {
        #[command(subcommand)]
        source: Source,
    },
    /// Verify (or fit) a Nash certificate and derive its bounds
    Nash {
        #[command(subcommand)]
        source: Source,
    },
    /// Mixing-time bounds and the exact mixing curve ξ(t)
    Mixing {
        #[command(subcommand)]
        source: Source,
    },
}

#[derive(Subcommand)]
enum Source {
    /// Built-in model family
    Model {
        #[command(subcommand)]
        family: Family,
    },
    /// Generator from a JSON file (schema: dim, hamiltonian, lindblad_ops)
    File { path: PathBuf },
}

#[derive(Subcommand)]
enum Family {
    /// L(f) = γ(tr(ρf)·1 − f) toward a full-rank target
    Depolarizing {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Dimension of the maximally mixed target (ignored with --target-state)
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// JSON file holding the target density matrix as [re,im] arrays
        #[arg(long)]
        target_state: Option<PathBuf>,
    },
    /// Unital qubit semigroup with Pauli transfer decay rates l1,l2,l3
    Qubit {
        #[arg(long, value_delimiter = ',', num_args = 1..=3, required = true)]
        rates: Vec<f64>,
    },
    /// Dissipative nearest-neighbour hopping on a ring
    Ring {
        #[arg(long)]
        sites: usize,
        /// Optional coherent part from a JSON matrix file (analyses requiring
        /// reversibility reject generators with a Hamiltonian)
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    #[arg(long, global = true, env = "NASH_MIXER_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Detailed-balance / structure tolerance
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Mixing accuracy target
    #[arg(long, global = true, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, global = true)]
    t_min: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true, default_value_t = 25)]
    t_points: usize,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out_file: Option<PathBuf>,
}

#[derive(Args)]
struct CertOpts {
    /// Certificate kind (defaults to the model's analytic certificate)
    #[arg(long, global = true)]
    kind: Option<CertKind>,
    #[arg(long, global = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    c: Option<f64>,
    #[arg(long, global = true)]
    t_cutoff: Option<f64>,
    /// Fit the smallest C consistent with the sample set instead of
    /// verifying a fixed constant
    #[arg(long, global = true, default_value_t = false)]
    fit: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertKind {
    I,
    Ii,
}

struct CliFailure {
    code: u8,
    error: ErrorObject,
}

impl CliFailure {
    fn input(kind: &str, message: impl Into<String>) -> Self {
        Self {
            code: 2,
            error: ErrorObject::new(kind, message),
        }
    }
}

impl From<io::IoError> for CliFailure {
    fn from(e: io::IoError) -> Self {
        Self {
            code: 2,
            error: ErrorObject::from_io_error(&e),
        }
    }
}

impl From<nash_mixer::semigroup::SemigroupError> for CliFailure {
    fn from(e: nash_mixer::semigroup::SemigroupError) -> Self {
        CliFailure::input("SemigroupError", e.to_string())
    }
}

impl From<nash_mixer::nash::NashError> for CliFailure {
    fn from(e: nash_mixer::nash::NashError) -> Self {
        CliFailure::input("NashError", e.to_string())
    }
}

impl From<nash_mixer::lindblad::LindbladError> for CliFailure {
    fn from(e: nash_mixer::lindblad::LindbladError) -> Self {
        CliFailure::input("GeneratorError", e.to_string())
    }
}

impl From<nash_mixer::lp::LpError> for CliFailure {
    fn from(e: nash_mixer::lp::LpError) -> Self {
        CliFailure::input("StateError", e.to_string())
    }
}

/// The generator plus everything the commands derive from the source.
struct Problem {
    gen: LindbladGenerator,
    rho: FullRankState,
    default_cert: Option<NashCertificate>,
}

fn build_problem(source: &Source) -> Result<Problem, CliFailure> {
    match source {
        Source::Model { family } => match family {
            Family::Depolarizing {
                gamma,
                dim,
                target_state,
            } => {
                if !(*gamma > 0.0) {
                    return Err(CliFailure::input("ModelError", "gamma must be positive"));
                }
                let target = match target_state {
                    Some(path) => {
                        let text = std::fs::read_to_string(path).map_err(io::IoError::Io)?;
                        let json: MatrixJson =
                            serde_json::from_str(&text).map_err(|e| {
                                CliFailure::input("ParseError", e.to_string())
                            })?;
                        FullRankState::new(io::matrix_from_json(&json)?)?
                    }
                    None => FullRankState::maximally_mixed(*dim),
                };
                let spec = models::DepolarizingSpec {
                    gamma: *gamma,
                    target: target.clone(),
                };
                let gen = models::build_depolarizing(&spec);
                let cert = models::depolarizing_nash_certificate(&spec, 2.0);
                Ok(Problem {
                    gen,
                    rho: target,
                    default_cert: Some(cert),
                })
            }
            Family::Qubit { rates } => {
                if rates.len() != 3 {
                    return Err(CliFailure::input(
                        "ModelError",
                        "--rates needs exactly three values l1,l2,l3",
                    ));
                }
                let spec = models::QubitUnitalSpec::new(rates[0], rates[1], rates[2]);
                let gen = models::build_qubit_unital(&spec)
                    .map_err(|e| CliFailure::input("ModelError", e.to_string()))?;
                Ok(Problem {
                    gen,
                    rho: FullRankState::maximally_mixed(2),
                    default_cert: Some(models::qubit_nash_certificate(&spec)),
                })
            }
            Family::Ring { sites, hamiltonian } => {
                let mut spec = models::RingSpec::new(*sites);
                if let Some(path) = hamiltonian {
                    let text = std::fs::read_to_string(path).map_err(io::IoError::Io)?;
                    let json: MatrixJson = serde_json::from_str(&text)
                        .map_err(|e| CliFailure::input("ParseError", e.to_string()))?;
                    spec = spec.with_hamiltonian(io::matrix_from_json(&json)?);
                }
                let gen = models::build_ring(&spec)
                    .map_err(|e| CliFailure::input("ModelError", e.to_string()))?;
                Ok(Problem {
                    gen,
                    rho: FullRankState::maximally_mixed(*sites),
                    default_cert: Some(models::ring_nash_certificate(&spec).as_printed),
                })
            }
        },
        Source::File { path } => {
            let gen = io::load_generator(path)?;
            let rho = gen.stationary_state()?;
            Ok(Problem {
                gen,
                rho,
                default_cert: None,
            })
        }
    }
}

fn resolve_certificate(
    problem: &Problem,
    cert: &CertOpts,
) -> Result<Option<NashCertificate>, CliFailure> {
    if cert.kind.is_none() && cert.nu.is_none() && cert.c.is_none() {
        return Ok(problem.default_cert);
    }
    let base = problem.default_cert.unwrap_or(NashCertificate {
        kind: NashKind::I,
        nu: 1.0,
        c: 1.0,
        t_cutoff: None,
    });
    let kind = match cert.kind {
        Some(CertKind::I) => NashKind::I,
        Some(CertKind::Ii) => NashKind::II,
        None => base.kind,
    };
    let out = NashCertificate {
        kind,
        nu: cert.nu.unwrap_or(base.nu),
        c: cert.c.unwrap_or(base.c),
        t_cutoff: cert.t_cutoff.or(base.t_cutoff).filter(|_| kind == NashKind::II),
    };
    out.validate()
        .map_err(|e| CliFailure::input("CertificateError", e.to_string()))?;
    Ok(Some(out))
}

fn t_grid(common: &CommonOpts, gap: f64) -> Vec<f64> {
    let lo = common.t_min.unwrap_or(1e-3 / gap).max(1e-300);
    let hi = common.t_max.unwrap_or(20.0 / gap).max(lo);
    let n = common.t_points.max(2);
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn emit(common: &CommonOpts, json: String, csv: impl FnOnce() -> (Vec<&'static str>, Vec<Vec<f64>>)) -> Result<(), CliFailure> {
    let payload = match common.output {
        OutputFormat::Json => json,
        OutputFormat::Csv => {
            let (header, rows) = csv();
            let mut buf = Vec::new();
            io::write_csv(&mut buf, &header, &rows)?;
            String::from_utf8(buf).expect("csv is utf8")
        }
    };
    match &common.out_file {
        Some(path) => std::fs::write(path, payload).map_err(io::IoError::Io)?,
        None => print!("{payload}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOutput {
    schema_version: u32,
    dim: usize,
    gap: f64,
    eigenvalues: Vec<f64>,
    /// (s, N(s)) at each distinct eigenvalue level
    counting_breakpoints: Vec<(f64, usize)>,
    /// (t, ζ(t)) on the time grid
    zeta_samples: Vec<(f64, f64)>,
}

fn cmd_spectrum(source: &Source, common: &CommonOpts) -> Result<u8, CliFailure> {
    let problem = build_problem(source)?;
    let sg = Semigroup::new(problem.gen, problem.rho)?;
    let report = sg.spectral_report();
    let mut breakpoints: Vec<(f64, usize)> = Vec::new();
    for &l in &report.eigenvalues {
        match breakpoints.last() {
            Some(&(s, _)) if (l - s).abs() <= 1e-9 => {
                let n = report.counting(l);
                breakpoints.last_mut().unwrap().1 = n;
            }
            _ => breakpoints.push((l, report.counting(l))),
        }
    }
    let zeta_samples: Vec<(f64, f64)> = t_grid(common, report.gap.max(1e-12))
        .into_iter()
        .map(|t| (t, report.zeta(t)))
        .collect();
    let out = SpectrumOutput {
        schema_version: SCHEMA_VERSION,
        dim: sg.dim(),
        gap: report.gap,
        eigenvalues: report.eigenvalues.clone(),
        counting_breakpoints: breakpoints,
        zeta_samples,
    };
    let json = serde_json::to_string_pretty(&out).expect("report serializes");
    emit(common, json, || {
        (
            vec!["index", "eigenvalue"],
            report
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, &l)| vec![i as f64, l])
                .collect(),
        )
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct NashOutput {
    schema_version: u32,
    kind: NashKind,
    nu: f64,
    c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_cutoff: Option<f64>,
    fitted: bool,
    report: NashReportJson,
    bounds: NashBoundsJson,
}

#[derive(Serialize)]
struct NashReportJson {
    n_samples: usize,
    worst_ratio: f64,
    passed: bool,
    witness: MatrixJson,
}

#[derive(Serialize)]
struct NashBoundsJson {
    spectral_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ls_lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ls_bound_note: Option<String>,
    /// (t, ultracontractive bound) samples
    ultracontractive_curve: Vec<(f64, f64)>,
    /// (s, counting bound) samples over the admissible range
    counting_curve: Vec<(f64, f64)>,
}

fn cmd_nash(source: &Source, common: &CommonOpts, cert_opts: &CertOpts) -> Result<u8, CliFailure> {
    let problem = build_problem(source)?;
    let mut cert = resolve_certificate(&problem, cert_opts)?.ok_or_else(|| {
        CliFailure::input(
            "CertificateError",
            "no certificate: provide --nu/--c (and --t-cutoff for kind II) or --fit",
        )
    })?;
    let fitted = cert_opts.fit;
    if fitted {
        cert.c = nash::fit_c(
            &problem.gen,
            &problem.rho,
            cert.kind,
            cert.nu,
            cert.t_cutoff,
            common.samples,
            common.seed,
        )?;
    }
    let report = nash::verify_nash(&problem.gen, &problem.rho, &cert, common.samples, common.seed)?;
    let sg = Semigroup::new(problem.gen.clone(), problem.rho.clone())?;
    let gap = sg.spectral_gap();
    let (ls, ls_note) = match nash::ls_lower_bound(&cert, gap, None) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let grid = t_grid(common, gap);
    let ultracontractive_curve = grid
        .iter()
        .filter_map(|&t| nash::ultracontractive_bound(&cert, t).ok().map(|b| (t, b)))
        .collect();
    let counting_curve = grid
        .iter()
        .filter_map(|&t| {
            let s = 1.0 / t;
            nash::counting_bound(&cert, s).ok().map(|b| (s, b))
        })
        .collect();
    let passed = report.passed;
    let out = NashOutput {
        schema_version: SCHEMA_VERSION,
        kind: cert.kind,
        nu: cert.nu,
        c: cert.c,
        t_cutoff: cert.t_cutoff,
        fitted,
        report: NashReportJson {
            n_samples: report.n_samples,
            worst_ratio: report.worst_ratio,
            passed,
            witness: io::matrix_to_json(report.witness.matrix()),
        },
        bounds: NashBoundsJson {
            spectral_gap: gap,
            ls_lower_bound: ls,
            ls_bound_note: ls_note,
            ultracontractive_curve,
            counting_curve,
        },
    };
    let json = serde_json::to_string_pretty(&out).expect("report serializes");
    let curve = out.bounds.ultracontractive_curve.clone();
    emit(common, json, || {
        (
            vec!["t", "ultracontractive_bound"],
            curve.iter().map(|&(t, b)| vec![t, b]).collect(),
        )
    })?;
    Ok(if passed { 0 } else { 3 })
}

#[derive(Serialize)]
struct MixingOutput {
    schema_version: u32,
    #[serde(flatten)]
    report: nash::MixingBoundReport,
    /// rows (t, xi_exact, bound_generic, bound_nash)
    curve: Vec<MixingCurveRow>,
    xi_at_t_generic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi_at_t_nash: Option<f64>,
}

#[derive(Serialize, Clone, Copy)]
struct MixingCurveRow {
    t: f64,
    xi_exact: f64,
    bound_generic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_nash: Option<f64>,
}

fn cmd_mixing(source: &Source, common: &CommonOpts, cert_opts: &CertOpts) -> Result<u8, CliFailure> {
    let problem = build_problem(source)?;
    let cert = resolve_certificate(&problem, cert_opts)?;
    let report = nash::mixing_time(&problem.gen, &problem.rho, common.epsilon, cert.as_ref())?;
    let sg = Semigroup::new(problem.gen.clone(), problem.rho.clone())?;
    let gap = report.gap;
    let prefactor = problem.rho.inv_op_norm().sqrt();
    let curve: Result<Vec<MixingCurveRow>, CliFailure> = t_grid(common, gap)
        .into_iter()
        .map(|t| {
            Ok(MixingCurveRow {
                t,
                xi_exact: sg.xi_exact(t)?,
                bound_generic: prefactor * (-gap * t).exp(),
                bound_nash: cert
                    .as_ref()
                    .map(|c| 2.0 * (-gap * (t - c.nu * c.c / 4.0)).exp()),
            })
        })
        .collect();
    let curve = curve?;
    let xi_at_t_generic = sg.xi_exact(report.t_generic)?;
    let xi_at_t_nash = match report.t_nash {
        Some(t) => Some(sg.xi_exact(t)?),
        None => None,
    };
    let out = MixingOutput {
        schema_version: SCHEMA_VERSION,
        report,
        curve: curve.clone(),
        xi_at_t_generic,
        xi_at_t_nash,
    };
    let json = serde_json::to_string_pretty(&out).expect("report serializes");
    emit(common, json, || {
        (
            vec!["t", "xi_exact", "bound_generic", "bound_nash"],
            curve
                .iter()
                .map(|r| vec![r.t, r.xi_exact, r.bound_generic, r.bound_nash.unwrap_or(f64::NAN)])
                .collect(),
        )
    })?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, CliFailure> {
    match &cli.command {
        Command::Spectrum { source } => cmd_spectrum(source, &cli.common),
        Command::Nash { source } => cmd_nash(source, &cli.common, &cli.cert),
        Command::Mixing { source } => cmd_mixing(source, &cli.common, &cli.cert),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!(
                "{}",
                serde_json::to_string(&failure.error).expect("error serializes")
            );
            ExitCode::from(failure.code)
        }
    }
}
