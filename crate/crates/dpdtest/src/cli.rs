//! Command-line interface: fit one sample, test two, emit influence
//! curves, run simulation scenarios, and print the embedded datasets.
//!
//! Exit codes: 0 on success, 2 for usage or data errors, 3 for
//! numerical failures.

use std::path::Path;

use clap::{Args, Parser, Subcommand};

use crate::baselines::{bootstrap_test, classical_wald, lrt, z_test};
use crate::datasets;
use crate::error::Error;
use crate::influence::influence_curve;
use crate::manifest::manifest_json;
use crate::mdpd::{fit_mdpd, Beta, FitOptions};
use crate::model::{LognormalParams, Sample};
use crate::montecarlo::{outlier_sweep, preset, preset_scenarios, run_scenario, MethodSpec};
use crate::rng::RngSeed;
use crate::wald::wald_test;

#[derive(Debug, Parser)]
#[command(
    name = "dpdtest",
    about = "Robust two-sample tests for equality of log-normal means",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one sample by minimum density power divergence.
    Fit(FitArgs),
    /// Test equality of means of two samples.
    Test(TestArgs),
    /// Emit influence-curve data as CSV.
    Influence(InfluenceArgs),
    /// Run a simulation scenario and emit its report as CSV.
    Simulate(SimulateArgs),
    /// Sweep one observation of the second sample through a value grid.
    Sweep(SweepArgs),
    /// Print an embedded dataset, one value per line.
    Dataset(DatasetArgs),
    /// Print the reproduction manifest as JSON.
    Manifest,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Data file (one positive number per line) or an embedded dataset
    /// name.
    input: String,
    /// Tuning value of the divergence.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
}

#[derive(Debug, Args)]
struct TestArgs {
    /// First sample: file path or embedded dataset name.
    input1: String,
    /// Second sample: file path or embedded dataset name.
    input2: String,
    /// One of: dpd, wald, z, lrt, bootstrap.
    #[arg(long, default_value = "dpd")]
    method: String,
    /// Tuning value (dpd only).
    #[arg(long)]
    beta: Option<f64>,
    /// Test level used for the reported reject flag.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap resample count.
    #[arg(long, default_value_t = 500)]
    resamples: usize,
    /// Master seed for randomized methods.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct InfluenceArgs {
    /// Comma-separated tuning values.
    #[arg(long, default_value = "0,0.3,0.5,1", value_delimiter = ',')]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Smallest contamination location of the log-spaced grid.
    #[arg(long, default_value_t = 1e-3)]
    x_min: f64,
    /// Largest contamination location.
    #[arg(long, default_value_t = 1e3)]
    x_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Preset name or a JSON scenario-config file.
    scenario: String,
    /// Override the replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the total-size grid.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the test level.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// First sample: file path or embedded dataset name.
    input1: String,
    /// Second sample: file path or embedded dataset name.
    input2: String,
    /// Zero-based index of the observation to replace in the second
    /// sample.
    #[arg(long)]
    index: usize,
    /// Replacement values, comma-separated; defaults to 1..=500.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Comma-separated methods (dpd:BETA, wald, z, lrt, bootstrap:RESAMPLES).
    #[arg(long, default_value = "dpd:0,dpd:0.1,dpd:0.2,z,lrt", value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// One of: air-refinery, air-baaqmd, cloud-natural, cloud-seeded.
    name: String,
}

/// CLI failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NonConvergence { .. } | Error::Numerical(_) => 3,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn load_sample(input: &str) -> Result<Sample, CliError> {
    if let Some(sample) = datasets::sample(input) {
        return Ok(sample);
    }
    let path = Path::new(input);
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {input}: {e}")))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) => values.push(v),
            // a single-column CSV header is tolerated on the first line
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(CliError::usage(format!(
                    "{input}:{}: cannot parse {cell:?} as a number",
                    i + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::usage(format!("{input}: no observations found")));
    }
    Sample::with_label(values, input).map_err(CliError::from)
}

fn parse_beta(value: f64) -> Result<Beta, CliError> {
    Beta::new(value).map_err(CliError::from)
}

fn parse_method_spec(text: &str) -> Result<MethodSpec, CliError> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    match (name, arg) {
        ("dpd", Some(b)) => {
            let beta = b
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad beta in method {text:?}")))?;
            Ok(MethodSpec::Dpd {
                beta: parse_beta(beta)?,
            })
        }
        ("dpd", None) => Ok(MethodSpec::Dpd {
            beta: Beta::new(0.1).expect("valid"),
        }),
        ("wald", None) => Ok(MethodSpec::ClassicalWald),
        ("z", None) => Ok(MethodSpec::Z),
        ("lrt", None) => Ok(MethodSpec::Lrt),
        ("bootstrap", resamples) => {
            let resamples = match resamples {
                Some(r) => r
                    .parse::<usize>()
                    .map_err(|_| CliError::usage(format!("bad resample count in {text:?}")))?,
                None => 500,
            };
            Ok(MethodSpec::Bootstrap { resamples })
        }
        _ => Err(CliError::usage(format!(
            "unknown method {text:?}; use dpd[:beta], wald, z, lrt, bootstrap[:resamples]"
        ))),
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

/// Run the parsed command; the binary maps errors to exit codes.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(args) => {
            let sample = load_sample(&args.input)?;
            let fit = fit_mdpd(&sample, parse_beta(args.beta)?, &FitOptions::default())?;
            print_json(&fit);
            Ok(())
        }
        Command::Test(args) => {
            let s1 = load_sample(&args.input1)?;
            let s2 = load_sample(&args.input2)?;
            if args.beta.is_some() && !matches!(args.method.as_str(), "dpd" | "wald") {
                return Err(CliError::usage(format!(
                    "--beta does not apply to method {:?}",
                    args.method
                )));
            }
            if !(args.alpha > 0.0 && args.alpha < 1.0) {
                return Err(CliError::usage(format!(
                    "--alpha must lie in (0, 1), got {}",
                    args.alpha
                )));
            }
            let result = match args.method.as_str() {
                "dpd" => wald_test(&s1, &s2, parse_beta(args.beta.unwrap_or(0.1))?)?,
                "wald" => {
                    if let Some(b) = args.beta {
                        if b != 0.0 {
                            return Err(CliError::usage(
                                "the classical Wald test is the beta = 0 case; \
                                 use --method dpd for other beta"
                                    .into(),
                            ));
                        }
                    }
                    classical_wald(&s1, &s2)?
                }
                "z" => z_test(&s1, &s2)?,
                "lrt" => lrt(&s1, &s2)?,
                "bootstrap" => {
                    bootstrap_test(&s1, &s2, args.resamples, RngSeed::new(args.seed, 0))?
                }
                other => {
                    return Err(CliError::usage(format!(
                        "unknown method {other:?}; use dpd, wald, z, lrt, or bootstrap"
                    )))
                }
            };
            #[derive(serde::Serialize)]
            struct TestOutput<'a> {
                #[serde(flatten)]
                result: &'a crate::wald::TestResult,
                alpha: f64,
                reject: bool,
            }
            print_json(&TestOutput {
                alpha: args.alpha,
                reject: result.p_value < args.alpha,
                result: &result,
            });
            Ok(())
        }
        Command::Influence(args) => {
            if args.points == 0 || !(args.x_min > 0.0) || args.x_max < args.x_min {
                return Err(CliError::usage(
                    "influence grid needs points >= 1 and 0 < x-min <= x-max".into(),
                ));
            }
            let params =
                LognormalParams::new(args.mu, args.sigma).map_err(CliError::from)?;
            let betas = args
                .betas
                .iter()
                .map(|&b| parse_beta(b))
                .collect::<Result<Vec<_>, _>>()?;
            let xs: Vec<f64> = if args.points == 1 {
                vec![args.x_min]
            } else {
                let (a, b) = (args.x_min.ln(), args.x_max.ln());
                (0..args.points)
                    .map(|i| (a + (b - a) * i as f64 / (args.points - 1) as f64).exp())
                    .collect()
            };
            let rows = influence_curve(&betas, &params, &xs)?;
            println!("x,beta,if_mu,if_sigma");
            for (x, beta, value) in rows {
                println!("{x},{beta},{},{}", value[0], value[1]);
            }
            Ok(())
        }
        Command::Simulate(args) => {
            let mut cfg = if let Some(preset) = preset(&args.scenario) {
                preset
            } else if Path::new(&args.scenario).exists() {
                let text = std::fs::read_to_string(&args.scenario)
                    .map_err(|e| CliError::usage(format!("cannot read scenario file: {e}")))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("bad scenario config: {e}")))?
            } else {
                let names: Vec<String> =
                    preset_scenarios().iter().map(|s| s.name.clone()).collect();
                return Err(CliError::usage(format!(
                    "unknown scenario {:?}; presets: {}",
                    args.scenario,
                    names.join(", ")
                )));
            };
            if let Some(reps) = args.reps {
                cfg.replications = reps;
            }
            if let Some(sizes) = args.sizes {
                cfg.size_grid = sizes;
            }
            if let Some(seed) = args.seed {
                cfg.master_seed = RngSeed::new(seed, 0);
            }
            if let Some(alpha) = args.alpha {
                cfg.alpha = alpha;
            }
            let report = run_scenario(&cfg)?;
            print!("{}", report.to_csv());
            Ok(())
        }
        Command::Sweep(args) => {
            let s1 = load_sample(&args.input1)?;
            let s2 = load_sample(&args.input2)?;
            let methods = args
                .methods
                .iter()
                .map(|m| parse_method_spec(m))
                .collect::<Result<Vec<_>, _>>()?;
            let values: Vec<f64> = match args.values {
                Some(v) => v,
                None => (1..=500).map(|v| v as f64).collect(),
            };
            let table = outlier_sweep(
                &s1,
                &s2,
                args.index,
                &values,
                &methods,
                RngSeed::new(args.seed, 0),
            )?;
            print!("{}", table.to_csv());
            Ok(())
        }
        Command::Dataset(args) => match datasets::by_name(&args.name) {
            Some(values) => {
                for v in values {
                    println!("{v}");
                }
                Ok(())
            }
            None => Err(CliError::usage(format!(
                "unknown dataset {:?}; available: {}",
                args.name,
                datasets::NAMES.join(", ")
            ))),
        },
        Command::Manifest => {
            print!("{}", manifest_json());
            Ok(())
        }
    }
}
