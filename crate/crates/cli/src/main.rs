//! `fwlop`: operator documents in, documents out.
//!
//! Exit codes: 0 success, 1 domain error, 2 verification failure, 3 parse error.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fwlop::lbundle::{a_inverse, a_iso, ad_field};
use fwlop::linearize::{linearize_do, linearize_function, linearize_multivector};
use fwlop::multivec::{fwl_metric_laplacian, Gamma};
use fwlop::verify::{run_suite, Bounds};
use fwlop::{DiffOp, Error, LDerivation, Poly, Space, SymMultivector};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "fwlop",
    version,
    about = "Fiber-wise linear differential operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator to a polynomial.
    Eval {
        op: PathBuf,
        #[arg(long = "fn", value_name = "POLY")]
        function: String,
        /// Space the polynomial is read on; defaults to the operator's.
        #[arg(long)]
        space: Option<Space>,
    },
    /// Composition `A ∘ B`.
    Compose { a: PathBuf, b: PathBuf },
    /// Commutator `[A, B]`.
    Bracket { a: PathBuf, b: PathBuf },
    /// Split into parts of fixed fiber weight.
    Grade { op: PathBuf },
    /// Report core / FWL status and weight at order `Q` (default: the operator's order).
    Classify {
        op: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// The top-order coefficient table as a multivector.
    Symbol {
        op: PathBuf,
        #[arg(long)]
        order: Option<usize>,
    },
    /// The vector field `ad(Δ)` on `E*` of a FWL operator.
    Ad { op: PathBuf },
    /// Poisson bracket of two homogeneous multivectors.
    Poisson { a: PathBuf, b: PathBuf },
    /// FWL operator to derivation of `L_{E*}`.
    AIso {
        op: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Derivation of `L_{E*}` to FWL operator.
    AInv {
        derivation: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Linearize an ambient operator (`--order`), function (`--fn`) or
    /// homogeneous multivector (neither flag).
    Linearize {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long = "fn", value_name = "POLY", conflicts_with = "order")]
        function: Option<String>,
    },
    /// Laplacian of the fiber-wise linear metric built from a `Γ` table.
    Laplacian { gamma: PathBuf },
    /// Run a seeded verification suite and print its report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "N,M,Q", default_value = "2,2,3")]
        bounds: Bounds,
    },
}

enum Failure {
    Domain(String),
    Parse(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn op(path: &Path) -> Result<DiffOp, Failure> {
    Ok(DiffOp::from_json(&read(path)?)?)
}

fn multivector(path: &Path) -> Result<SymMultivector, Failure> {
    Ok(SymMultivector::from_json(&read(path)?)?)
}

fn pretty(value: serde_json::Value) -> String {
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    out
}

fn run(command: Command) -> Result<String, Failure> {
    Ok(match command {
        Command::Eval {
            op: path,
            function,
            space,
        } => {
            let delta = op(&path)?;
            let f = Poly::parse(&function, delta.chart(), space.unwrap_or(delta.space()))?;
            format!("{}\n", delta.apply(&f)?)
        }
        Command::Compose { a, b } => op(&a)?.compose(&op(&b)?)?.to_json(),
        Command::Bracket { a, b } => op(&a)?.commutator(&op(&b)?)?.to_json(),
        Command::Grade { op: path } => {
            let parts: Vec<_> = op(&path)?
                .grade_decompose()?
                .into_iter()
                .map(|(weight, part)| json!({ "weight": weight, "operator": part.to_doc() }))
                .collect();
            pretty(json!({ "parts": parts }))
        }
        Command::Classify { op: path, order } => {
            let delta = op(&path)?;
            let q = order
                .or(delta.order())
                .ok_or(Error::ZeroOperator("cannot classify the zero operator"))?;
            let weights: Vec<i64> = delta.grade_decompose()?.into_keys().collect();
            if delta.is_core(q)? {
                format!("core(q={q}), weight={}\n", weights[0])
            } else if delta.is_fwl(q)? {
                format!("FWL(q={q}), weight={}\n", weights[0])
            } else {
                format!("neither(q={q}), weights={weights:?}\n")
            }
        }
        Command::Symbol { op: path, order } => {
            let delta = op(&path)?;
            match order {
                Some(q) => SymMultivector::new(delta.order_part(q), q)?.to_json(),
                None => delta.symbol()?.to_json(),
            }
        }
        Command::Ad { op: path } => {
            let field = ad_field(&op(&path)?)?;
            let strings = |v: &[Poly]| v.iter().map(Poly::to_string).collect::<Vec<_>>();
            pretty(
                json!({ "chart": field.chart(), "dx": strings(&field.base), "dv": strings(&field.dual) }),
            )
        }
        Command::Poisson { a, b } => multivector(&a)?.poisson(&multivector(&b)?)?.to_json(),
        Command::AIso { op: path, order } => a_iso(&op(&path)?, order)?.to_json(),
        Command::AInv { derivation, order } => {
            a_inverse(&LDerivation::from_json(&read(&derivation)?)?, order)?.to_json()
        }
        Command::Linearize {
            input,
            order,
            function,
        } => match (order, function) {
            (Some(q), _) => linearize_do(&op(&input)?, q)?.to_json(),
            (None, Some(text)) => {
                let chart = op(&input)?.chart();
                format!(
                    "{}\n",
                    linearize_function(&Poly::parse(&text, chart, Space::Ambient)?)?
                )
            }
            (None, None) => linearize_multivector(&multivector(&input)?)?.to_json(),
        },
        Command::Laplacian { gamma } => {
            fwl_metric_laplacian(&Gamma::from_json(&read(&gamma)?)?)?.to_json()
        }
        Command::Verify {
            suite,
            trials,
            seed,
            bounds,
        } => {
            let report = run_suite(&suite, trials, seed, bounds)?;
            print!("{}", report.to_json());
            return if report.passed() {
                Ok(String::new())
            } else {
                Err(Failure::Verification)
            };
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}
