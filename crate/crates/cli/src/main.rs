use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qqo_core::dynamics;
use qqo_core::format::{parse_operator, OperatorSpec};
use qqo_core::report::{self, CheckOptions, OperatorIdentity};
use qqo_core::{Error, ScanConfig, StateVec};

/// Certificates and dynamics for quantum quadratic operators on 2x2 matrices.
#[derive(Parser)]
#[command(name = "qqo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every certificate on an operator file and print a JSON report.
    Check {
        file: String,
        #[command(flatten)]
        sampling: Sampling,
        /// Ball-grid subdivisions used to seed the fixed-point search.
        #[arg(long, default_value_t = 8)]
        grid: usize,
    },
    /// Iterate the Bloch-ball map from an initial state.
    Iterate {
        file: String,
        /// Initial state as f1,f2,f3.
        #[arg(long, allow_hyphen_values = true)]
        init: String,
        #[arg(long, default_value_t = dynamics::DEFAULT_HORIZON)]
        steps: usize,
        #[arg(long, default_value_t = dynamics::DEFAULT_ZERO_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Sweep the (a, b, c) family and print one row per grid point.
    ScanAbc {
        /// lo:hi:step, lo:hi (with --grid points) or a single value.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Points per lo:hi range.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Search for a Kadison-Schwarz violation; exits 0 if one is found, 1 otherwise.
    Witness {
        file: String,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of (f, w) pairs; the oracle uses half as many elements.
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Sampling {
    fn config(&self) -> Result<ScanConfig, Error> {
        let mut cfg = ScanConfig::default().with_seed(self.seed);
        if let Some(n) = self.samples {
            if n == 0 {
                return Err(Error::InvalidArgument("--samples must be positive".into()));
            }
            cfg.pair_samples = n;
            cfg.oracle_samples = (n / 2).max(1);
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn load(file: &str) -> Result<(OperatorSpec, OperatorIdentity), Failure> {
    let bytes = fs::read(file).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Input(format!("{file}: not valid UTF-8")))?;
    let spec = parse_operator(&text).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    let id = OperatorIdentity::new(file, &bytes, &spec);
    Ok((spec, id))
}

fn parse_init(s: &str) -> Result<StateVec, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("--init `{s}`: expected three numbers f1,f2,f3")))?;
    let [f1, f2, f3] = parts[..] else {
        return Err(Failure::Input(format!("--init `{s}`: expected three numbers f1,f2,f3")));
    };
    if ![f1, f2, f3].iter().all(|v| v.is_finite()) {
        return Err(Failure::Input(format!("--init `{s}`: values must be finite")));
    }
    Ok(StateVec::new([f1, f2, f3])?)
}

fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Input("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Check { file, sampling, grid } => {
            configure_threads(sampling.threads)?;
            let (spec, id) = load(&file)?;
            let opts = CheckOptions { scan: sampling.config()?, fixed_point_grid: grid };
            print!("{}", report::classify(id, &spec, &opts)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Iterate { file, init, steps, tol, format } => {
            if steps == 0 {
                return Err(Failure::Input("--steps must be positive".into()));
            }
            if !(tol > 0.0) {
                return Err(Failure::Input("--tol must be positive".into()));
            }
            let (spec, _) = load(&file)?;
            let f0 = parse_init(&init)?;
            let tr = dynamics::iterate(&spec.tensor(), &f0, steps, tol);
            match format {
                Format::Csv => print!("{}", report::trajectory_csv(&tr)),
                Format::Json => print!("{}", report::trajectory_json(&tr)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ScanAbc { a, b, c, grid, sampling, format } => {
            configure_threads(sampling.threads)?;
            let cfg = sampling.config()?;
            let points = report::abc_grid(
                &report::parse_range(&a, grid)?,
                &report::parse_range(&b, grid)?,
                &report::parse_range(&c, grid)?,
            );
            let rows = report::scan_abc(&points, &cfg)?;
            match format {
                Format::Csv => print!("{}", report::scan_csv(&rows)),
                Format::Json => print!("{}", report::scan_json(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness { file, sampling } => {
            configure_threads(sampling.threads)?;
            let (spec, id) = load(&file)?;
            let r = report::witness_report(id, &spec, &sampling.config()?)?;
            print!("{}", r.to_json());
            Ok(if r.found { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
