//! `coneray` command-line front end.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coneray::classifier::{classify, zero_det_sos, ClassifyOptions, InconclusiveReason, Verdict};
use coneray::convexity::{polyconvexity_test_with, quasiconvexity_test, PcVerdict, QcKind, QcOptions};
use coneray::extremality::{extremality_test, ExtremalKind, ExtremalityOptions};
use coneray::poly::json::poly_from_str;
use coneray::poly::perfect_square_test;
use coneray::suites::{lemma41_suite, mixed_det_suite, psd_dual_suite, SuiteReport};
use coneray::tensor::json::tensor_from_str;
use coneray::tensor::corpus::{corpus, corpus_names};
use coneray::tensor::{acoustic_tensor, symbolic_det_cof, MatrixRole};
use coneray::{ElastTensor, Error, RatPoly};

const EXIT_NOT_IN_CONE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_INCONSISTENT: u8 = 5;

#[derive(Parser)]
#[command(name = "coneray", version, about = "Classify quasiconvex quadratic forms on 3×3 matrices")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "CONERAY_SEED", default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for the numeric searches.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Human)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full classification report (`@name` selects a corpus tensor).
    Classify { tensor: String },
    /// Exact determinant of the acoustic tensor.
    Det { tensor: String },
    /// The form, its acoustic tensor and the cofactor matrix.
    Inspect { tensor: String },
    /// A single convexity verdict.
    Check {
        #[arg(value_enum)]
        property: Property,
        tensor: String,
    },
    /// Extremality of a nonnegative form among nonnegative forms.
    Extremal { poly: String },
    /// Exact square root of a form, if any.
    Square { poly: String },
    /// Sum-of-squares certificate for a polyconvex form.
    Sos { tensor: String },
    /// Named tensors.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Randomized property suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Matrix size for the lemma41 and psd-dual suites.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Random evaluation points per trial for mixed-det.
        #[arg(long, default_value_t = 20)]
        probes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Quasiconvex,
    Polyconvex,
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lemma41,
    MixedDet,
    PsdDual,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotInCone { .. } | Error::NotNonnegative(_) => EXIT_NOT_IN_CONE,
            Error::SolverStalled | Error::CertificateNotFound(_) => EXIT_INCONCLUSIVE,
            _ => EXIT_INPUT,
        };
        let message = match e {
            Error::UnsupportedDimension(d) if d >= 4 => format!(
                "unsupported dimension d = {d}: the determinant criteria only classify d = 3 \
                 (block counterexamples built from the Choi-Lam form break them for d ≥ 4)"
            ),
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

/// What a subcommand produced: JSON for `--output json`, text otherwise.
struct Emit {
    json: Value,
    human: String,
    code: u8,
}

fn read_source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
        Ok(s)
    } else if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::input(format!("{arg}: {e}")))
    }
}

fn load_tensor(arg: &str) -> Result<ElastTensor, Failure> {
    match arg.strip_prefix('@') {
        Some(name) => Ok(corpus(name)?),
        None => Ok(tensor_from_str(&read_source(arg)?)?),
    }
}

fn load_poly(arg: &str) -> Result<RatPoly, Failure> {
    Ok(poly_from_str(&read_source(arg)?)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn xi_names(d: usize) -> Vec<String> {
    (1..=d).flat_map(|i| (1..=d).map(move |j| format!("xi{i}{j}"))).collect()
}

fn classify_cmd(cli: &Cli, tensor: &str) -> Result<Emit, Failure> {
    let c = load_tensor(tensor)?;
    let mut opts = ClassifyOptions::with_seed(cli.seed);
    if let Some(t) = cli.tolerance {
        opts.tolerance = t;
        opts.qc.tolerance = t;
    }
    let report = classify(&c, &opts)?;
    let code = match (report.verdict, report.reason) {
        (Verdict::Inconclusive, Some(InconclusiveReason::InternalInconsistency)) => EXIT_INCONSISTENT,
        (Verdict::Inconclusive, _) => EXIT_INCONCLUSIVE,
        _ => 0,
    };
    let mut human = format!("verdict: {:?}\n", report.verdict);
    if let Some(r) = report.reason {
        human += &format!("reason: {r:?}\n");
    }
    human += &format!("det T(y) = {}\n", report.det_status.det);
    human += &format!("branch: {:?}\n", report.evidence.branch);
    if let Some(route) = report.evidence.sos_route {
        human += &format!("sos route: {route:?}\n");
    }
    if let Some(cert) = &report.certificate {
        human += &format!("certificate: {} squares, residual {:e}\n", cert.squares.len(), cert.residual);
    }
    human += &format!("input digest: {}", report.input_digest);
    Ok(Emit {
        json: to_json(&report),
        human,
        code,
    })
}

fn det_cmd(tensor: &str) -> Result<Emit, Failure> {
    let c = load_tensor(tensor)?;
    let (det, _) = symbolic_det_cof(&acoustic_tensor(&c, MatrixRole::YMatrix))?;
    Ok(Emit {
        json: to_json(&det),
        human: det.to_string(),
        code: 0,
    })
}

fn inspect_cmd(tensor: &str) -> Result<Emit, Failure> {
    let c = load_tensor(tensor)?;
    let f = c.quadratic_form();
    let t = acoustic_tensor(&c, MatrixRole::YMatrix);
    let (_, cof) = symbolic_det_cof(&t)?;
    let names = xi_names(c.dim());
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let rows = |m: &coneray::RatPolyMatrix| -> Value {
        Value::Array(m.entries().iter().map(|r| Value::Array(r.iter().map(to_json).collect())).collect())
    };
    Ok(Emit {
        json: json!({"form": f, "acoustic_tensor": rows(&t), "cofactor": rows(&cof)}),
        human: format!(
            "f = {}\n\nT(y) =\n{}\n\ncof T(y) =\n{}",
            f.display_with(&names),
            t.display_with(&[]),
            cof.display_with(&[])
        ),
        code: 0,
    })
}

fn check_cmd(cli: &Cli, property: Property, tensor: &str) -> Result<Emit, Failure> {
    let c = load_tensor(tensor)?;
    match property {
        Property::Quasiconvex => {
            let mut opts = QcOptions {
                seed: cli.seed,
                ..Default::default()
            };
            if let Some(t) = cli.tolerance {
                opts.tolerance = t;
            }
            let v = quasiconvexity_test(&c, opts)?;
            let (code, human) = match &v.kind {
                QcKind::CertifiedQuasiconvex { level } => (0, format!("quasiconvex (certified at level {level})")),
                QcKind::NumericQuasiconvex { min_value } => {
                    (0, format!("quasiconvex (numeric, minimum {min_value:e})"))
                }
                QcKind::NotQuasiconvex { x, y, exact_value, .. } => (
                    EXIT_NOT_IN_CONE,
                    format!("not quasiconvex: f(x⊗y) = {exact_value} at x = {x:?}, y = {y:?}"),
                ),
                QcKind::Inconclusive { min_value } => {
                    (EXIT_INCONCLUSIVE, format!("inconclusive (minimum {min_value:e})"))
                }
            };
            Ok(Emit {
                json: to_json(&v),
                human,
                code,
            })
        }
        Property::Polyconvex => {
            let v = polyconvexity_test_with(&c, cli.tolerance.unwrap_or(1e-7), cli.seed)?;
            let (code, human) = match &v {
                PcVerdict::Polyconvex { t_star, certificate } => (
                    0,
                    format!(
                        "polyconvex (t* = {t_star:e}, {} squares, residual {:e})",
                        certificate.squares.len(),
                        certificate.residual
                    ),
                ),
                PcVerdict::NotPolyconvex { t_star, normalized_t_star } => (
                    0,
                    format!("not polyconvex (t* = {t_star:e}, normalized {normalized_t_star:e})"),
                ),
                PcVerdict::Inconclusive { t_star, .. } => (EXIT_INCONCLUSIVE, format!("inconclusive (t* = {t_star:e})")),
            };
            Ok(Emit {
                json: to_json(&v),
                human,
                code,
            })
        }
    }
}

fn extremal_cmd(cli: &Cli, poly: &str) -> Result<Emit, Failure> {
    let p = load_poly(poly)?;
    let opts = ExtremalityOptions {
        seed: cli.seed,
        ..Default::default()
    };
    let v = extremality_test(&p, &opts)?;
    let (code, human) = match &v.kind {
        ExtremalKind::Extremal { kernel_dim } => (0, format!("extremal (kernel dimension {kernel_dim})")),
        ExtremalKind::ExtremalByPerfectSquare { root } => {
            (0, format!("extremal, square of {}", root.root_f64()))
        }
        ExtremalKind::NotExtremal { witness, scale } => {
            (0, format!("not extremal: p - {scale}·({witness}) is nonnegative"))
        }
        ExtremalKind::Inconclusive { kernel_dim } => {
            (EXIT_INCONCLUSIVE, format!("inconclusive (kernel dimension {kernel_dim})"))
        }
    };
    Ok(Emit {
        json: to_json(&v),
        human: format!("{human}\nzeros: {}", v.evidence.zero_count),
        code,
    })
}

fn square_cmd(poly: &str) -> Result<Emit, Failure> {
    let p = load_poly(poly)?;
    Ok(match perfect_square_test(&p) {
        Some(root) => Emit {
            human: format!("square of {}", root.root_f64()),
            json: to_json(&root),
            code: 0,
        },
        None => Emit {
            json: json!({"kind": "NotSquare"}),
            human: "not a perfect square".into(),
            code: 0,
        },
    })
}

fn sos_cmd(cli: &Cli, tensor: &str) -> Result<Emit, Failure> {
    let c = load_tensor(tensor)?;
    let zero_det = c.dim() == 3 && symbolic_det_cof(&acoustic_tensor(&c, MatrixRole::YMatrix))?.0.is_zero();
    let (cert, route) = if zero_det {
        let z = zero_det_sos(&c)?;
        (z.certificate, Some(z.route))
    } else {
        match polyconvexity_test_with(&c, cli.tolerance.unwrap_or(1e-7), cli.seed)? {
            PcVerdict::Polyconvex { certificate, .. } => (certificate, None),
            other => {
                return Err(Error::CertificateNotFound(format!(
                    "no PSD Gram matrix found (t_star = {:e})",
                    other.t_star()
                ))
                .into())
            }
        }
    };
    let mut human = format!("{} squares, residual {:e}", cert.squares.len(), cert.residual);
    if let Some(r) = route {
        human += &format!(" (route {r:?})");
    }
    Ok(Emit {
        json: to_json(&cert),
        human,
        code: 0,
    })
}

fn corpus_cmd() -> Emit {
    let names = corpus_names();
    Emit {
        json: Value::Array(names.iter().map(|(n, d)| json!({"name": n, "description": d})).collect()),
        human: names
            .iter()
            .map(|(n, d)| format!("@{n:<18} {d}"))
            .collect::<Vec<_>>()
            .join("\n"),
        code: 0,
    }
}

fn verify_cmd(cli: &Cli, suite: Suite, trials: usize, n: usize, probes: usize) -> Result<Emit, Failure> {
    if n < 2 {
        return Err(Failure::input("matrix size must be at least 2"));
    }
    let rep: SuiteReport = match suite {
        Suite::Lemma41 => lemma41_suite(n, trials, cli.seed),
        Suite::MixedDet => mixed_det_suite(trials, probes, cli.seed),
        Suite::PsdDual => psd_dual_suite(n, trials, cli.seed),
    };
    let code = if rep.all_passed() { 0 } else { EXIT_INCONSISTENT };
    Ok(Emit {
        human: format!("{}\n{}: worst relative slack {:e}", rep.summary(), rep.name, rep.worst_slack),
        json: to_json(&rep),
        code,
    })
}

fn run(cli: &Cli) -> Result<Emit, Failure> {
    if cli.tolerance.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        return Err(Failure::input("tolerance must be positive"));
    }
    match &cli.command {
        Command::Classify { tensor } => classify_cmd(cli, tensor),
        Command::Det { tensor } => det_cmd(tensor),
        Command::Inspect { tensor } => inspect_cmd(tensor),
        Command::Check { property, tensor } => check_cmd(cli, *property, tensor),
        Command::Extremal { poly } => extremal_cmd(cli, poly),
        Command::Square { poly } => square_cmd(poly),
        Command::Sos { tensor } => sos_cmd(cli, tensor),
        Command::Corpus { action: CorpusAction::List } => Ok(corpus_cmd()),
        Command::Verify { suite, trials, n, probes } => verify_cmd(cli, *suite, *trials, *n, *probes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.output {
                Output::Json => println!("{}", out.json),
                Output::Human => println!("{}", out.human),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            if cli.output == Output::Json {
                println!("{}", json!({"error": f.message, "exit_code": f.code}));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
