//! Command-line front end. Exit codes: 0 success, 2 invalid configuration,
//! 3 guard violation (enumeration or census cutoffs).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use sylow2::bounds;
use sylow2::census::{self, Subset};
use sylow2::estimator::{
    self, estimate_exhaustive, estimate_trivial, expected_non_a, Backend, EstimateConfig, Mode,
};
use sylow2::util::rational_to_f64;

#[derive(Parser)]
#[command(name = "sylow2", version, about = "Intersections of Sylow 2-subgroups of symmetric groups: exact censuses, bounds, and Monte Carlo estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Symmetric,
    Alternating,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Symmetric => Mode::Symmetric,
            ModeArg::Alternating => Mode::Alternating,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Fast,
    Exact,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Fast => Backend::Fast,
            BackendArg::Exact => Backend::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SubsetArg {
    A,
    P,
    PminusA,
}

impl From<SubsetArg> for Subset {
    fn from(s: SubsetArg) -> Subset {
        match s {
            SubsetArg::A => Subset::A,
            SubsetArg::P => Subset::P,
            SubsetArg::PminusA => Subset::PMinusA,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RangeArgs {
    /// Single degree n
    #[arg(long)]
    n: Option<u64>,
    /// Start of a degree range (inclusive)
    #[arg(long, requires = "n_max", conflicts_with = "n")]
    n_min: Option<u64>,
    /// End of a degree range (inclusive)
    #[arg(long, requires = "n_min", conflicts_with = "n")]
    n_max: Option<u64>,
}

impl RangeArgs {
    fn resolve(&self) -> Result<Vec<u64>, CliError> {
        match (self.n, self.n_min, self.n_max) {
            (Some(n), _, _) => Ok(vec![n]),
            (None, Some(lo), Some(hi)) if lo <= hi => Ok((lo..=hi).collect()),
            (None, Some(lo), Some(hi)) => Err(CliError::Config(format!(
                "--n-min {lo} exceeds --n-max {hi}"
            ))),
            _ => Err(CliError::Config("one of --n or --n-min/--n-max is required".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Pr(P ∩ P^x = 1) by Monte Carlo or exactly
    Estimate {
        /// Degree n
        #[arg(long)]
        n: usize,
        /// Number of Monte Carlo samples (default 1000000)
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// RNG seed; required unless --exhaustive
        #[arg(long)]
        seed: Option<u64>,
        /// Ambient group for the probability
        #[arg(long, value_enum, default_value_t = ModeArg::Symmetric)]
        mode: ModeArg,
        /// Success predicate: fast W criterion or full intersection
        #[arg(long, value_enum, default_value_t = BackendArg::Fast)]
        backend: BackendArg,
        /// Enumerate all n! conjugators instead of sampling
        #[arg(long)]
        exhaustive: bool,
        /// Alternating mode: draw x uniformly from Aₙ instead of Sₙ
        #[arg(long)]
        x_in_an: bool,
        /// Sampling worker threads; 0 = all cores (result is identical for any value)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact element censuses of A, P, or P∖A by support or cycle type
    Census {
        #[command(flatten)]
        range: RangeArgs,
        /// Which subset of P to count
        #[arg(long, value_enum, default_value_t = SubsetArg::P)]
        subset: SubsetArg,
        /// Census by cycle type instead of by support
        #[arg(long)]
        cycle_types: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distribution of the rank statistic W
    Wdist {
        /// Degree n
        #[arg(long)]
        n: u64,
        /// Exact pmf by inclusion–exclusion instead of sampling
        #[arg(long)]
        exact: bool,
        /// Number of Monte Carlo samples (default 1000000)
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// RNG seed; required unless --exact
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact class-sum expectation E|P ∩ P^x ∖ A|
    Expect {
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Counting-bound grid: census vs big-sum vs closed-form bounds
    Bounds {
        #[command(flatten)]
        range: RangeArgs,
        /// Single even support s; all even 4 ≤ s ≤ n if omitted
        #[arg(long)]
        s: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Guard(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<estimator::EstimatorError> for CliError {
    fn from(e: estimator::EstimatorError) -> Self {
        use estimator::EstimatorError::*;
        match e {
            ZeroSamples => CliError::Config(e.to_string()),
            DegreeCutoff(..) | Census(_) | Forest(_) => CliError::Guard(e.to_string()),
            Intersect(_) | Perm(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<census::CensusError> for CliError {
    fn from(e: census::CensusError) -> Self {
        match e {
            census::CensusError::HeightGuard(_) => CliError::Guard(e.to_string()),
            census::CensusError::ZeroDegree => CliError::Config(e.to_string()),
        }
    }
}

impl From<bounds::BoundsError> for CliError {
    fn from(e: bounds::BoundsError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Guard(msg)) => {
            eprintln!("guard error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(output: &OutputArgs, text: String) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Tabular output: CSV by default, JSON as an array of row objects.
fn emit_table(
    output: &OutputArgs,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<(), CliError> {
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::new();
            writeln!(s, "{}", header.join(",")).unwrap();
            for row in rows {
                writeln!(s, "{}", row.join(",")).unwrap();
            }
            s
        }
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(&k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                        .collect::<serde_json::Map<_, _>>()
                        .into()
                })
                .collect();
            serde_json::to_string_pretty(&objs).unwrap() + "\n"
        }
    };
    emit(output, text)
}

fn rational_fields(r: &BigRational) -> (String, f64) {
    (r.to_string(), rational_to_f64(r))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Estimate {
            n,
            samples,
            seed,
            mode,
            backend,
            exhaustive,
            x_in_an,
            workers,
            output,
        } => {
            let report = if exhaustive {
                estimate_exhaustive(n, mode.into(), backend.into())?
            } else {
                let seed = seed.ok_or_else(|| {
                    CliError::Config("--seed is required for sampled estimates".into())
                })?;
                estimate_trivial(&EstimateConfig {
                    n,
                    samples,
                    seed,
                    mode: mode.into(),
                    backend: backend.into(),
                    x_in_alternating: x_in_an,
                    workers,
                })?
            };
            match output.format.unwrap_or(Format::Json) {
                Format::Json => emit(
                    &output,
                    serde_json::to_string_pretty(&report).unwrap() + "\n",
                ),
                Format::Csv => emit_table(
                    &OutputArgs {
                        format: Some(Format::Csv),
                        out: output.out.clone(),
                    },
                    &[
                        "n", "mode", "backend", "samples", "successes", "estimate",
                        "estimate_float", "ci_low", "ci_high", "seed", "reference_value",
                        "abs_error",
                    ],
                    vec![vec![
                        report.n.to_string(),
                        format!("{:?}", report.mode).to_lowercase(),
                        format!("{:?}", report.backend).to_lowercase(),
                        report.samples.to_string(),
                        report.successes.to_string(),
                        report.estimate.clone(),
                        report.estimate_float.to_string(),
                        report.ci_low.to_string(),
                        report.ci_high.to_string(),
                        report.seed.to_string(),
                        report.reference_value.to_string(),
                        report.abs_error.to_string(),
                    ]],
                ),
            }
        }
        Command::Census {
            range,
            subset,
            cycle_types,
            output,
        } => {
            let mut rows = Vec::new();
            for n in range.resolve()? {
                let subset: Subset = subset.into();
                if cycle_types {
                    let c = census::cycle_type_census(n, subset)?;
                    for (lambda, count) in c.counts() {
                        rows.push(vec![
                            n.to_string(),
                            subset.label().to_string(),
                            lambda.to_string(),
                            count.to_string(),
                        ]);
                    }
                } else {
                    let c = census::support_census(n, subset)?;
                    for (s, count) in c.coeffs() {
                        rows.push(vec![
                            n.to_string(),
                            subset.label().to_string(),
                            s.to_string(),
                            count.to_string(),
                        ]);
                    }
                }
            }
            emit_table(&output, &["n", "subset", "support_or_partition", "count"], rows)
        }
        Command::Wdist {
            n,
            exact,
            samples,
            seed,
            output,
        } => {
            let pmf = if exact {
                estimator::w_pmf_exact(n)?
            } else {
                let seed = seed.ok_or_else(|| {
                    CliError::Config("--seed is required for sampled distributions".into())
                })?;
                estimator::w_pmf_empirical(n as usize, samples, seed)?
            };
            let rows = match pmf.exact_probs() {
                Some(map) if exact => map
                    .iter()
                    .map(|(k, v)| vec![k.to_string(), v.to_string()])
                    .collect(),
                _ => pmf
                    .probs()
                    .iter()
                    .map(|(k, v)| vec![k.to_string(), v.to_string()])
                    .collect(),
            };
            emit_table(&output, &["k", "probability"], rows)
        }
        Command::Expect { range, output } => {
            let mut rows = Vec::new();
            for n in range.resolve()? {
                let e = expected_non_a(n)?;
                let (exact, float) = rational_fields(&e);
                rows.push(vec![n.to_string(), exact, float.to_string()]);
            }
            emit_table(
                &output,
                &["n", "expected_non_a", "expected_non_a_float"],
                rows,
            )
        }
        Command::Bounds { range, s, output } => {
            let mut rows = Vec::new();
            for n in range.resolve()? {
                let supports: Vec<u64> = match s {
                    Some(s) => vec![s],
                    None => (4..=n).step_by(2).collect(),
                };
                let d = census::support_census(n, Subset::PMinusA)?;
                for s in supports {
                    if s % 2 != 0 || s < 2 || s > n {
                        return Err(CliError::Config(format!(
                            "support must be even with 2 ≤ s ≤ n, got s={s} n={n}"
                        )));
                    }
                    let exact = bounds::big_sum(n, s)?;
                    let small = bounds::bound_small_s(n, s)?;
                    let (gf, _) = bounds::bound_gf(n, s)?;
                    rows.push(vec![
                        n.to_string(),
                        s.to_string(),
                        d.coeff(s).to_string(),
                        exact.to_string(),
                        small.map_or("NA".to_string(), |v| v.to_string()),
                        gf.to_string(),
                        bounds::regime(n, s).to_string(),
                    ]);
                }
            }
            emit_table(
                &output,
                &[
                    "n",
                    "s",
                    "census_p_minus_a",
                    "big_sum",
                    "bound_small_s",
                    "bound_gf",
                    "applicable_regime",
                ],
                rows,
            )
        }
    }
}
