//! Command-line front end: object verbs over JSON files and the seeded
//! verification suites.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage or input error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use pcoset::building::{chi_graph_morphism_check, classify, continuity_check, neighbors_over};
use pcoset::charfn::{chi, chi_boundary, chi_sp, lambda_subspace, BoundaryValue};
use pcoset::verify::{run_suite, SuiteConfig, SUITES};
use pcoset::weil::{
    commutator_residual, heis_op, lambda_op, parity, projective_scalar, sl2_factor, theta_op,
    unitarity_residual, weil_diag, weil_fourier, weil_of, weil_upper, FiniteModel, HeisConvention,
};
use pcoset::{
    coset_mul, BlockElement, Error, Matrix, Module, ModuleJson, Prime, Rational, Relation,
    RelationJson, SpBlockElement, SymplecticForm,
};

#[derive(Parser)]
#[command(
    name = "pcoset",
    version,
    about = "Exact p-adic module calculus and double-coset characteristic functions"
)]
struct Cli {
    /// Prime (object verbs) or comma-separated primes (verify).
    #[arg(long, global = true, value_delimiter = ',')]
    p: Vec<u64>,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    /// One line per property (verify only; other verbs always emit JSON).
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical form of a module.
    Canon {
        module: PathBuf,
    },
    /// Whether two modules are equal.
    Eq {
        a: PathBuf,
        b: PathBuf,
    },
    /// Dual module under the standard form (or `--form`).
    Dual {
        module: PathBuf,
        #[arg(long)]
        form: Option<PathBuf>,
    },
    Intersect {
        a: PathBuf,
        b: PathBuf,
    },
    Sum {
        a: PathBuf,
        b: PathBuf,
    },
    /// `outer ∘ inner` for relations `inner: V ⇒ W`, `outer: W ⇒ Y`.
    Compose {
        outer: PathBuf,
        inner: PathBuf,
    },
    /// Double-coset product of two block elements.
    CosetMul {
        g: PathBuf,
        h: PathBuf,
    },
    /// Characteristic function `χ_g(Q, T)`.
    Chi(ChiArgs),
    /// `χ_g` on the graphs of symmetric matrices.
    ChiBoundary {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        kappa: PathBuf,
        #[arg(long)]
        tau: PathBuf,
    },
    /// The subspace `Λ(g)`.
    Lambda {
        #[arg(long)]
        g: PathBuf,
    },
    /// selfdual, almost_selfdual or neither under the standard form.
    Classify {
        module: PathBuf,
    },
    /// Almost self-dual modules between `O^{2n}` and `p^{-1}O^{2n}`.
    Neighbors {
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Graph-morphism check for an arrow `(Q,T) → (Q2,T2)`.
    MorphismCheck {
        #[arg(long)]
        g: PathBuf,
        #[arg(long = "Q")]
        q: PathBuf,
        #[arg(long = "T")]
        t: PathBuf,
        #[arg(long = "Q2")]
        q2: PathBuf,
        #[arg(long = "T2")]
        t2: PathBuf,
    },
    /// Continuity harness on a sequence file.
    Continuity {
        #[arg(long)]
        seq: PathBuf,
    },
    /// Finite-level Weil operators.
    Weil(WeilArgs),
    /// Run a verification suite.
    Verify {
        /// One of the suite names, or `all`.
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ChiArgs {
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long = "Q")]
    q: PathBuf,
    #[arg(long = "T")]
    t: PathBuf,
    /// Pad the representative to slot size M first.
    #[arg(long)]
    m: Option<usize>,
    /// Use a symplectic block element instead of `--g`.
    #[arg(long)]
    sp: Option<PathBuf>,
}

#[derive(Args)]
struct WeilArgs {
    #[arg(long = "N", default_value_t = 1)]
    depth: u32,
    #[command(subcommand)]
    op: WeilOp,
}

#[derive(Subcommand)]
enum WeilOp {
    Fourier,
    Diag {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    Upper {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Heis {
        #[arg(long, allow_hyphen_values = true)]
        vp: String,
        #[arg(long, allow_hyphen_values = true)]
        vm: String,
        #[arg(long, value_enum, default_value_t = Convention::Corrected)]
        convention: Convention,
    },
    /// Generator factorization of a 2x2 matrix.
    Factor {
        #[arg(long)]
        g: PathBuf,
    },
    /// `We(g)` for a 2x2 matrix of determinant 1.
    Of {
        #[arg(long)]
        g: PathBuf,
    },
    /// `λ` into the two-dimensional model.
    Lambda,
    /// `θ = λλ*` on the two-dimensional model.
    Theta,
    /// Unitarity, Fourier periodicity and the commutator phase on fixed inputs.
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    AsWritten,
    Corrected,
}

#[derive(Deserialize)]
struct SequenceFile {
    g: BlockElement,
    sequence: Vec<ModuleJson>,
    limit: ModuleJson,
    #[serde(rename = "T")]
    t: ModuleJson,
    #[serde(default = "default_depth")]
    depth: i64,
}

fn default_depth() -> i64 {
    4
}

enum Failure {
    Usage(String),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) | Error::SamplerExhausted(_) => Failure::Property(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Output plus whether the verb's property held.
struct Outcome {
    body: String,
    pass: bool,
}

impl Outcome {
    fn json(v: Value) -> Self {
        Outcome {
            body: serde_json::to_string_pretty(&v).expect("serializable"),
            pass: true,
        }
    }

    fn report(v: Value, pass: bool) -> Self {
        Outcome {
            pass,
            ..Self::json(v)
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn prime(cli: &Cli) -> CliResult<Prime> {
    match cli.p.as_slice() {
        [p] => Ok(Prime::new(*p)?),
        [] => Err(Failure::Usage("--p is required".into())),
        _ => Err(Failure::Usage("this verb takes a single prime".into())),
    }
}

fn module(path: &Path, p: Prime) -> CliResult<Module> {
    Ok(read_json::<ModuleJson>(path)?.into_module(p)?)
}

fn relation(path: &Path, p: Prime) -> CliResult<Relation> {
    Ok(read_json::<RelationJson>(path)?.into_relation(p)?)
}

fn standard_form(dim: usize) -> CliResult<SymplecticForm> {
    if !dim.is_multiple_of(2) {
        return Err(Failure::Usage(format!(
            "odd ambient dimension {dim} has no standard form"
        )));
    }
    Ok(SymplecticForm::standard(dim / 2))
}

fn mj(m: &Module) -> Value {
    json!(ModuleJson::from(m))
}

fn rj(r: &Relation) -> Value {
    json!(RelationJson::from(r))
}

fn rational(s: &str) -> CliResult<Rational> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    Ok(match &cli.cmd {
        Cmd::Canon { module: m } => Outcome::json(mj(&module(m, prime(cli)?)?)),
        Cmd::Eq { a, b } => {
            let p = prime(cli)?;
            Outcome::json(json!({"equal": module(a, p)? == module(b, p)?}))
        }
        Cmd::Dual { module: m, form } => {
            let r = module(m, prime(cli)?)?;
            let f = match form {
                Some(path) => SymplecticForm::new(read_json::<Matrix>(path)?)?,
                None => standard_form(r.dim())?,
            };
            Outcome::json(mj(&r.dual(&f)?))
        }
        Cmd::Intersect { a, b } => {
            let p = prime(cli)?;
            Outcome::json(mj(&module(a, p)?.intersect(&module(b, p)?)?))
        }
        Cmd::Sum { a, b } => {
            let p = prime(cli)?;
            Outcome::json(mj(&module(a, p)?.sum(&module(b, p)?)?))
        }
        Cmd::Compose { outer, inner } => {
            let p = prime(cli)?;
            Outcome::json(rj(&relation(outer, p)?.compose(&relation(inner, p)?)?))
        }
        Cmd::CosetMul { g, h } => {
            let g: BlockElement = read_json(g)?;
            let h: BlockElement = read_json(h)?;
            Outcome::json(json!(coset_mul(&g, &h)?))
        }
        Cmd::Chi(a) => {
            let p = prime(cli)?;
            let (q, t) = (module(&a.q, p)?, module(&a.t, p)?);
            let r = match (&a.g, &a.sp) {
                (Some(g), None) => {
                    let mut g: BlockElement = read_json(g)?;
                    if let Some(m) = a.m {
                        g = g.pad(m)?;
                    }
                    chi(&g, &q, &t)?
                }
                (None, Some(sp)) => {
                    let mut gs: SpBlockElement = read_json(sp)?;
                    if let Some(m) = a.m {
                        gs = gs.pad(m)?;
                    }
                    chi_sp(&gs, &q, &t)?
                }
                _ => return Err(Failure::Usage("give exactly one of --g and --sp".into())),
            };
            Outcome::json(rj(&r))
        }
        Cmd::ChiBoundary { g, kappa, tau } => {
            let p = prime(cli)?;
            let g: BlockElement = read_json(g)?;
            let (k, t): (Matrix, Matrix) = (read_json(kappa)?, read_json(tau)?);
            Outcome::json(match chi_boundary(&g, &k, &t, p) {
                Ok(BoundaryValue::Symplectic(s)) => json!({"kind": "symplectic", "matrix": s}),
                Ok(BoundaryValue::Relation(r)) => json!({"kind": "relation", "relation": rj(&r)}),
                Err(Error::SingularBoundary) => json!({"kind": "singular"}),
                Err(e) => return Err(e.into()),
            })
        }
        Cmd::Lambda { g } => {
            let g: BlockElement = read_json(g)?;
            Outcome::json(mj(&lambda_subspace(&g, prime(cli)?)?))
        }
        Cmd::Classify { module: m } => {
            let r = module(m, prime(cli)?)?;
            Outcome::json(json!({"class": classify(&r, &standard_form(r.dim())?)?}))
        }
        Cmd::Neighbors { n } => {
            let p = prime(cli)?;
            let m = Module::standard_lattice(p, 2 * n);
            let star = neighbors_over(&m, &SymplecticForm::standard(*n))?;
            let list: Vec<Value> = star.iter().map(mj).collect();
            Outcome::json(json!({"count": list.len(), "strict": list.len() - 1, "modules": list}))
        }
        Cmd::MorphismCheck { g, q, t, q2, t2 } => {
            let p = prime(cli)?;
            let g: BlockElement = read_json(g)?;
            let (q, t, q2, t2) = (module(q, p)?, module(t, p)?, module(q2, p)?, module(t2, p)?);
            let rep = chi_graph_morphism_check(&g, (&q, &t), (&q2, &t2))?;
            let pass = rep.pass();
            let witnesses = if pass { vec![] } else { vec![json!(rep)] };
            Outcome::report(
                json!({"pass": pass, "report": rep, "witnesses": witnesses}),
                pass,
            )
        }
        Cmd::Continuity { seq } => {
            let p = prime(cli)?;
            let f: SequenceFile = read_json(seq)?;
            let mods: Vec<Module> = f
                .sequence
                .into_iter()
                .map(|m| m.into_module(p))
                .collect::<Result<_, _>>()?;
            let rep = continuity_check(
                &f.g,
                &mods,
                &f.limit.into_module(p)?,
                &f.t.into_module(p)?,
                f.depth,
            )?;
            let pass = rep.pass();
            let mut witnesses = rep.convergence.witnesses.clone();
            witnesses.extend(rep.witnesses.iter().cloned());
            Outcome::report(
                json!({"pass": pass, "report": rep, "witnesses": witnesses}),
                pass,
            )
        }
        Cmd::Weil(w) => weil(cli, w)?,
        Cmd::Verify {
            suite,
            trials,
            seed,
        } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown suite {suite:?}; expected one of {SUITES:?} or all"
                )));
            }
            let primes = if cli.p.is_empty() {
                SuiteConfig::default_primes()
            } else {
                cli.p
                    .iter()
                    .map(|&p| Prime::new(p))
                    .collect::<Result<_, _>>()?
            };
            let cfg = SuiteConfig::new(primes, *trials, *seed);
            let report = run_suite(suite, &cfg)?;
            log::info!(
                "{} trials of {suite} in {:.2}s",
                report.trials,
                report.wall_time
            );
            let pass = report.pass();
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
                Format::Text => {
                    let mut lines: Vec<String> = report
                        .checks
                        .iter()
                        .map(|(k, t)| {
                            format!(
                                "{} {k}: {} passed, {} failed",
                                if t.failed == 0 { "PASS" } else { "FAIL" },
                                t.passed,
                                t.failed
                            )
                        })
                        .collect();
                    lines.push(format!(
                        "{} {}: {} trials, {} failures, seed {}, {:.2}s",
                        if pass { "PASS" } else { "FAIL" },
                        report.suite,
                        report.trials,
                        report.failures,
                        report.seed,
                        report.wall_time
                    ));
                    lines.join("\n")
                }
            };
            Outcome { body, pass }
        }
    })
}

fn weil(cli: &Cli, w: &WeilArgs) -> CliResult<Outcome> {
    let p = prime(cli)?;
    let model = FiniteModel::new(p, w.depth, 1)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(match &w.op {
        WeilOp::Fourier => Outcome::json(weil_fourier(model)?.to_json()),
        WeilOp::Diag { a } => Outcome::json(weil_diag(model, &rational(a)?)?.to_json()),
        WeilOp::Upper { b } => Outcome::json(weil_upper(model, &rational(b)?)?.to_json()),
        WeilOp::Heis { vp, vm, convention } => {
            let conv = match convention {
                Convention::AsWritten => HeisConvention::AsWritten,
                Convention::Corrected => HeisConvention::Corrected,
            };
            Outcome::json(heis_op(model, &rational(vp)?, &rational(vm)?, one, conv)?.to_json())
        }
        WeilOp::Factor { g } => {
            let g: Matrix = read_json(g)?;
            Outcome::json(json!({"tokens": sl2_factor(&g, p)?}))
        }
        WeilOp::Of { g } => {
            let g: Matrix = read_json(g)?;
            Outcome::json(weil_of(model, &g)?.to_json())
        }
        WeilOp::Lambda => {
            let dst = FiniteModel::new(p, w.depth, 2)?;
            Outcome::json(lambda_op(model, dst)?.to_json())
        }
        WeilOp::Theta => Outcome::json(theta_op(FiniteModel::new(p, w.depth, 2)?)?.to_json()),
        WeilOp::Check => {
            let f = weil_fourier(model)?;
            let ff = &f.matrix * &f.matrix;
            let (s, parity_res) = projective_scalar(&ff, &parity(model)?.matrix);
            let inv_p = Rational::p_pow(p, -1);
            let comm = commutator_residual(
                model,
                (&inv_p, &Rational::one()),
                (&Rational::zero(), &inv_p),
                HeisConvention::Corrected,
            )?;
            let unit = unitarity_residual(&f);
            let pass =
                unit < 1e-9 && parity_res < 1e-8 && (s.norm() - 1.0).abs() < 1e-9 && comm < 1e-10;
            Outcome::report(
                json!({
                    "pass": pass,
                    "fourier_unitarity_residual": unit,
                    "fourier_square_parity_residual": parity_res,
                    "fourier_square_scalar": [s.re, s.im],
                    "commutator_residual": comm,
                    "witnesses": [],
                }),
                pass,
            )
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = out.body + "\n";
            let written = match &cli.out {
                Some(path) => fs::write(path, &text),
                None => io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Property(msg)) => {
            eprintln!("property failure: {msg}");
            ExitCode::from(1)
        }
    }
}
