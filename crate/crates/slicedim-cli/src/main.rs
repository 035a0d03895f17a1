//! Command-line front end: per-slope and batch computations with
//! machine-readable output and optional result caching.

mod cache;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Deserialize;

use slicedim::arith::SlopeParam;
use slicedim::automaton::build_overlap_automaton;
use slicedim::cocycle::count_via_cocycle;
use slicedim::dimension::{dimension_report, fourier_nondecay, hrw_estimates};
use slicedim::gibbs::build_gibbs_system;
use slicedim::oracle;
use slicedim::simplex;
use slicedim::subshift::{
    build_line_subshift, pressure_csv, pressure_gap_check, spectral_pressure,
};

use cache::{Cache, CACHE_VERSION};

#[derive(Parser)]
#[command(
    name = "slicedim",
    about = "Exact overlap counts, pressure estimates and dimension bounds for rational-slope projections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SlopeArgs {
    /// Numerator of the slope (1 <= p <= q, coprime with q)
    #[arg(long)]
    p: u64,
    /// Denominator of the slope
    #[arg(long)]
    q: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result to a file (atomic) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory (overrides SLICEDIM_CACHE_DIR)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    All,
    Oracle,
    Paths,
    Cocycle,
}

#[derive(Subcommand)]
enum Command {
    /// Exact overlap counts N_n by one or all of the three routes
    Count {
        #[command(flatten)]
        slope: SlopeArgs,
        /// Largest word length
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "all")]
        method: CountMethod,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certified enclosure of the overlap growth rate N (nats)
    Growth {
        #[command(flatten)]
        slope: SlopeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pressure approximants L_n, S_n as CSV, or the N <= P gap check
    Pressure {
        #[command(flatten)]
        slope: SlopeArgs,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Emit the spectral pressure and gap check as JSON instead
        #[arg(long)]
        gap_check: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Random-walk entropy table H_n
    Entropy {
        #[command(flatten)]
        slope: SlopeArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Assembled per-slope dimension report as JSON
    Dimension {
        #[command(flatten)]
        slope: SlopeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fourier non-decay along eta = q 2^N
    Fourier {
        #[command(flatten)]
        slope: SlopeArgs,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Contractivity census, tau, and a seeded sampled frequency
    Contraction {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Weak-Gibbs constants or cylinder masses as CSV
    Gibbs {
        #[command(flatten)]
        slope: SlopeArgs,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Emit cylinder masses at this depth instead of constants
        #[arg(long)]
        masses_depth: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// DOT export of the overlap automaton or the line subshift
    AutomatonExport {
        #[command(flatten)]
        slope: SlopeArgs,
        #[arg(long, value_enum, default_value = "overlap")]
        kind: AutomatonKind,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every computation over a list of slopes from a config file
    Batch {
        /// JSON run configuration
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutomatonKind {
    Overlap,
    Subshift,
}

enum CliError {
    Usage(String),
    Computation(String),
}

impl From<slicedim::Error> for CliError {
    fn from(e: slicedim::Error) -> Self {
        match e {
            slicedim::Error::NotCoprime { .. } | slicedim::Error::OutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Computation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Computation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn validated(slope: &SlopeArgs) -> Result<SlopeParam, CliError> {
    Ok(SlopeParam::new(slope.p, slope.q)?)
}

/// Write-temp-then-rename when a path is given, stdout otherwise.
fn emit(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            write_atomic(path, text)?;
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Count {
            slope,
            n,
            method,
            output,
        } => {
            let s = validated(&slope)?;
            let text = count_table(
                &s,
                n,
                method,
                Cache::from_options(output.cache_dir.as_deref())?,
            )?;
            emit(&output, &text)
        }
        Command::Growth { slope, output } => {
            let s = validated(&slope)?;
            let enc = build_overlap_automaton(&s).overlap_growth(1e-9, 100_000)?;
            let text = format!(
                "{}\n",
                serde_json::json!({
                    "p": s.p(), "q": s.q(),
                    "overlap_growth": {"lower": enc.lower, "upper": enc.upper},
                })
            );
            emit(&output, &text)
        }
        Command::Pressure {
            slope,
            n_max,
            gap_check,
            output,
        } => {
            let s = validated(&slope)?;
            let text = if gap_check {
                let g = pressure_gap_check(&s)?;
                format!(
                    "{}\n",
                    serde_json::json!({
                        "p": s.p(), "q": s.q(),
                        "overlap_growth": {"lower": g.overlap_growth.lower, "upper": g.overlap_growth.upper},
                        "pressure": {"lower": g.pressure.lower, "upper": g.pressure.upper},
                        "ok": g.ok,
                    })
                )
            } else {
                pressure_csv(&s, n_max)?
            };
            emit(&output, &text)
        }
        Command::Entropy {
            slope,
            n_max,
            output,
        } => {
            let s = validated(&slope)?;
            let r = hrw_estimates(&s, n_max)?;
            let mut text = String::from("n,h_n,h_n_over_n,increment\n");
            for (i, &(n, h)) in r.values.iter().enumerate() {
                let inc = if i + 1 < r.values.len() {
                    format!("{:.12}", r.values[i + 1].1 - h)
                } else {
                    String::new()
                };
                let _ = writeln!(text, "{n},{h:.12},{:.12},{inc}", r.ratio_estimates[i]);
            }
            emit(&output, &text)
        }
        Command::Dimension { slope, output } => {
            let s = validated(&slope)?;
            let report = dimension_report(&s)?;
            let text = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
            emit(&output, &text)
        }
        Command::Fourier {
            slope,
            n_max,
            output,
        } => {
            let s = validated(&slope)?;
            let r = fourier_nondecay(&s, n_max)?;
            let text = format!(
                "{}\n",
                serde_json::json!({
                    "p": s.p(), "q": s.q(), "n_max": n_max,
                    "identity_holds": r.holds,
                    "base_modulus": r.base_modulus,
                })
            );
            emit(&output, &text)
        }
        Command::Contraction {
            samples,
            length,
            seed,
            output,
        } => {
            let words = simplex::contractive_words_length3();
            let freq = simplex::contractive_frequency(samples, length, seed)?;
            let text = format!(
                "{}\n",
                serde_json::json!({
                    "contractive_length3": words.len(),
                    "tau": simplex::max_contraction_tau(),
                    "sampled_frequency": freq,
                    "samples": samples, "length": length, "seed": seed,
                })
            );
            emit(&output, &text)
        }
        Command::Gibbs {
            slope,
            n_max,
            masses_depth,
            output,
        } => {
            let s = validated(&slope)?;
            let g = build_gibbs_system(&s)?;
            let text = match masses_depth {
                Some(depth) => g.cylinder_mass_csv(depth)?,
                None => g.weak_gibbs_csv(n_max)?,
            };
            emit(&output, &text)
        }
        Command::AutomatonExport {
            slope,
            kind,
            output,
        } => {
            let s = validated(&slope)?;
            let text = match kind {
                AutomatonKind::Overlap => build_overlap_automaton(&s).to_dot(),
                AutomatonKind::Subshift => build_line_subshift(&s).to_dot(),
            };
            emit(&output, &text)
        }
        Command::Batch { config } => batch_run(&config),
    }
}

fn count_one(s: &SlopeParam, n: usize, method: CountMethod) -> Result<BigUint, CliError> {
    Ok(match method {
        CountMethod::Oracle => oracle::overlap_count_exact(s, n)?,
        CountMethod::Paths => build_overlap_automaton(s).count_via_paths(n),
        CountMethod::Cocycle => count_via_cocycle(s, n)?,
        CountMethod::All => unreachable!("expanded by count_table"),
    })
}

fn count_table(
    s: &SlopeParam,
    n_max: usize,
    method: CountMethod,
    cache: Option<Cache>,
) -> Result<String, CliError> {
    let methods: &[(CountMethod, &str)] = match method {
        CountMethod::All => &[
            (CountMethod::Oracle, "oracle"),
            (CountMethod::Paths, "paths"),
            (CountMethod::Cocycle, "cocycle"),
        ],
        CountMethod::Oracle => &[(CountMethod::Oracle, "oracle")],
        CountMethod::Paths => &[(CountMethod::Paths, "paths")],
        CountMethod::Cocycle => &[(CountMethod::Cocycle, "cocycle")],
    };
    let mut text = String::from("n");
    for (_, name) in methods {
        let _ = write!(text, ",{name}");
    }
    text.push('\n');
    for n in 1..=n_max {
        let _ = write!(text, "{n}");
        for (m, name) in methods {
            let key = cache::key(s.p(), s.q(), &format!("count-{name}"), n);
            let cached = cache
                .as_ref()
                .and_then(|c| c.lookup(&key))
                .and_then(|v| v.as_str().map(str::to_owned));
            let value = match cached {
                Some(text) => text,
                None => {
                    let computed = count_one(s, n, *m)?.to_string();
                    if let Some(c) = cache.as_ref() {
                        c.store(&key, serde_json::Value::String(computed.clone()));
                    }
                    computed
                }
            };
            let _ = write!(text, ",{value}");
        }
        text.push('\n');
    }
    Ok(text)
}

#[derive(Debug, Deserialize)]
struct RunConfig {
    slopes: Vec<(u64, u64)>,
    #[serde(default = "default_count_n")]
    count_n: usize,
    #[serde(default = "default_entropy_n")]
    entropy_n: usize,
    #[serde(default = "default_fourier_n")]
    fourier_n: u32,
    #[serde(default = "default_growth_tol")]
    growth_tol: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    cache_dir: Option<PathBuf>,
    output_dir: PathBuf,
    #[serde(default = "default_format")]
    format: String,
}

fn default_count_n() -> usize {
    8
}
fn default_entropy_n() -> usize {
    8
}
fn default_fourier_n() -> u32 {
    20
}
fn default_growth_tol() -> f64 {
    1e-9
}
fn default_format() -> String {
    "json".into()
}

fn batch_run(config_path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Usage(format!("cannot read config: {e}")))?;
    let config: RunConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
    if config.growth_tol <= 0.0 {
        return Err(CliError::Usage("growth_tol must be positive".into()));
    }
    if config.format != "json" && config.format != "csv" {
        return Err(CliError::Usage(format!(
            "unknown output format {:?}",
            config.format
        )));
    }
    // every slope must validate up front
    let mut slopes = Vec::new();
    for &(p, q) in &config.slopes {
        slopes.push(SlopeParam::new(p, q).map_err(|e| CliError::Usage(e.to_string()))?);
    }
    let cache = Cache::from_options(config.cache_dir.as_deref())?;
    fs::create_dir_all(&config.output_dir)?;

    let mut summary = String::from(
        "p,q,overlap_growth_lower,overlap_growth_upper,pressure_lower,pressure_upper,dim_lower,singular\n",
    );
    let mut failures = Vec::new();
    for s in &slopes {
        match batch_one(s, &config, cache.as_ref()) {
            Ok(row) => summary.push_str(&row),
            Err(e) => {
                let msg = match e {
                    CliError::Usage(m) | CliError::Computation(m) => m,
                };
                eprintln!("slope {s}: {msg}");
                failures.push(format!("{s}: {msg}"));
            }
        }
    }
    write_atomic(&config.output_dir.join("summary.csv"), &summary)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Computation(format!(
            "{} slope(s) failed: {}",
            failures.len(),
            failures.join("; ")
        )))
    }
}

fn batch_one(
    s: &SlopeParam,
    config: &RunConfig,
    cache: Option<&Cache>,
) -> Result<String, CliError> {
    let stem = format!("slope-{}-{}", s.p(), s.q());

    // counts with cache
    let mut counts = Vec::new();
    for n in 1..=config.count_n {
        let key = cache::key(s.p(), s.q(), "count-oracle", n);
        let cached = cache
            .and_then(|c| c.lookup(&key))
            .and_then(|v| v.as_str().map(str::to_owned));
        let value = match cached {
            Some(v) => v,
            None => {
                let computed = oracle::overlap_count_exact(s, n)?.to_string();
                if let Some(c) = cache {
                    c.store(&key, serde_json::Value::String(computed.clone()));
                }
                computed
            }
        };
        counts.push((n, value));
    }

    let report = dimension_report(s)?;
    let entropy = hrw_estimates(s, config.entropy_n)?;
    let nondecay = fourier_nondecay(s, config.fourier_n)?;
    let growth = build_overlap_automaton(s).overlap_growth(config.growth_tol, 100_000)?;
    let pressure = spectral_pressure(s).spectral.unwrap();

    let per_slope = serde_json::json!({
        "slope": {"p": s.p(), "q": s.q()},
        "counts": counts.iter().map(|(n, v)| serde_json::json!({"n": n, "value": v})).collect::<Vec<_>>(),
        "overlap_growth": {"lower": growth.lower, "upper": growth.upper},
        "pressure": {"lower": pressure.lower, "upper": pressure.upper},
        "entropy": entropy.values.iter().map(|&(n, h)| serde_json::json!({"n": n, "h": h})).collect::<Vec<_>>(),
        "fourier": {"identity_holds": nondecay.holds, "base_modulus": nondecay.base_modulus},
        "report": serde_json::to_value(&report).unwrap(),
        "seed": config.seed,
        "cache_version": CACHE_VERSION,
    });
    if config.format == "json" {
        let path = config.output_dir.join(format!("{stem}.json"));
        write_atomic(
            &path,
            &format!("{}\n", serde_json::to_string_pretty(&per_slope).unwrap()),
        )?;
    } else {
        let mut csv = String::from("n,count\n");
        for (n, v) in &counts {
            let _ = writeln!(csv, "{n},{v}");
        }
        write_atomic(&config.output_dir.join(format!("{stem}.csv")), &csv)?;
    }

    Ok(format!(
        "{},{},{:.12},{:.12},{:.12},{:.12},{:.12},{}\n",
        s.p(),
        s.q(),
        growth.lower,
        growth.upper,
        pressure.lower,
        pressure.upper,
        report.dim_lower,
        report.singular
    ))
}
