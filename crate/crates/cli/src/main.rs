mod cache;
mod checks;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kleinzeta_core::hecke::hecke_table;
use kleinzeta_core::thetasupp::{CosetType, ScanBox, DEFAULT_PRIME};
use kleinzeta_core::{Algorithm, CountError, CountOptions, ThetaError};
use serde_json::json;
use thiserror::Error;

use crate::cache::CountCache;
use crate::checks::Counter;
use crate::report::VerificationReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("cache {0}: {1}")]
    Cache(PathBuf, std::io::Error),
    #[error("writing {0}: {1}")]
    Output(PathBuf, std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Config(String),
}

#[derive(Parser)]
#[command(name = "kleinzeta", version, about = "Exact verification suite for Klein's cubic threefold")]
struct Cli {
    /// Worker threads for parallel counting (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Neither read nor write the count cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count points of the cubic over F_{p^k}.
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// quad-fiber, curve-sum, direct or naive (default: fastest available).
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: Option<Algorithm>,
        /// Print a JSON record instead of the bare count.
        #[arg(long)]
        json: bool,
    },
    /// Check the local factor at 3 by counting and by the product of twisted factors.
    VerifyL3 {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare point counts over F_p with the trace predicted by the CM forms.
    TraceSweep {
        #[arg(long, default_value_t = 100)]
        max: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write split type, norm-form solution and Hecke eigenvalues as CSV.
    HeckeTable {
        #[arg(long, default_value_t = 100)]
        max: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the de Rham cohomology summary as JSON.
    Cohomology,
    /// Scan double-coset representatives against the support of the level Schwartz function.
    ThetaSupport {
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        p: u64,
        /// Bound on |m|, |n|, |r| and on the valuation of x.
        #[arg(long = "box", default_value_t = 4)]
        radius: i32,
        /// Residues of x are taken modulo p^unit_depth.
        #[arg(long, default_value_t = 3)]
        unit_depth: u32,
        /// I, II, III or IV; repeatable (default: all).
        #[arg(long = "type", value_parser = parse_type)]
        types: Vec<CosetType>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run every check and write the combined report.
    Report {
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trace_max: u64,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm {s:?}"))
}

fn parse_type(s: &str) -> Result<CosetType, String> {
    CosetType::parse(s).ok_or_else(|| format!("unknown coset type {s:?}"))
}

/// Writes `text` to `path`, with `-` meaning stdout.
fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    if path == Path::new("-") {
        print!("{text}");
        std::io::stdout().flush().map_err(|e| CliError::Output(path.to_owned(), e))
    } else {
        fs::write(path, text).map_err(|e| CliError::Output(path.to_owned(), e))
    }
}

/// Prints the table (to stderr when the JSON goes to stdout) and writes the JSON.
fn emit(report: &VerificationReport, json: Option<&Path>) -> Result<u8, CliError> {
    match json {
        Some(p) if p == Path::new("-") => eprint!("{}", report.to_table()),
        _ => print!("{}", report.to_table()),
    }
    if let Some(p) = json {
        write_out(p, &(report.to_json() + "\n"))?;
    }
    Ok(report.exit_code())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cache = match (cli.no_cache, cache::default_path()) {
        (false, Some(path)) => CountCache::open(&path)?,
        _ => CountCache::disabled(),
    };
    let mut counter = Counter {
        cache,
        options: CountOptions::default(),
    };

    match cli.command {
        Command::Count { p, k, algorithm, json } => {
            let c = counter.count(p, k, algorithm)?;
            if json {
                let q = (p as u128).pow(k);
                println!(
                    "{}",
                    json!({ "p": p, "k": k, "q": q, "count": c.count, "algorithm": c.algorithm, "cached": c.cached, "elapsed_ms": c.elapsed_ms })
                );
            } else {
                println!("{}", c.count);
            }
            Ok(0)
        }
        Command::VerifyL3 { json } => {
            let checks = checks::l3_checks(&mut counter)?;
            let config = json!({ "p": checks::L3_PRIME, "extensions": checks::EXTENSIONS, "algorithm": Algorithm::QuadFiber });
            emit(&VerificationReport::new(config, checks), json.as_deref())
        }
        Command::TraceSweep { max, json } => {
            let checks = checks::trace_sweep(&mut counter, max)?;
            emit(
                &VerificationReport::new(json!({ "max": max, "skipped": [kleinzeta_core::hecke::LEVEL_PRIME] }), checks),
                json.as_deref(),
            )
        }
        Command::HeckeTable { max, out } => {
            let rows = hecke_table(max);
            let mut buf = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(["p", "split_type", "a", "b", "ap_f", "ap_g", "chi_dlog"])?;
                let opt = |v: Option<u64>| v.map_or_else(String::new, |v| v.to_string());
                for r in &rows {
                    w.write_record([
                        r.p.to_string(),
                        r.split_type.as_str().to_owned(),
                        opt(r.a),
                        opt(r.b),
                        r.ap_f.to_string(),
                        r.ap_g.to_string(),
                        opt(r.chi_dlog.map(u64::from)),
                    ])?;
                }
                w.flush().map_err(|e| CliError::Output("<csv>".into(), e))?;
            }
            let text = String::from_utf8(buf).expect("csv output is utf-8");
            write_out(out.as_deref().unwrap_or(Path::new("-")), &text)?;
            Ok(0)
        }
        Command::Cohomology => {
            let (summary, checks) = checks::cohomology_checks();
            let report = VerificationReport::new(json!({}), checks);
            eprint!("{}", report.to_table());
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            Ok(report.exit_code())
        }
        Command::ThetaSupport {
            p,
            radius,
            unit_depth,
            types,
            json,
        } => {
            if radius < 0 {
                return Err(CliError::Config("--box must be non-negative".into()));
            }
            let types = if types.is_empty() { CosetType::ALL.to_vec() } else { types };
            let scan_box = ScanBox {
                radius,
                v_min: -radius,
                v_max: radius,
                unit_depth,
            };
            let (summary, mut checks) = checks::theta_checks(p, &types, &scan_box)?;
            checks.push(checks::archimedean_check());
            emit(&VerificationReport::new(summary, checks), json.as_deref())
        }
        Command::Report { json, trace_max } => {
            let mut all = checks::l3_checks(&mut counter)?;
            all.extend(checks::trace_sweep(&mut counter, trace_max)?);
            all.extend(checks::cm_checks(1000, 500));
            all.push(checks::fermat_check());
            all.extend(checks::cohomology_checks().1);
            all.extend(checks::theta_checks(DEFAULT_PRIME, &CosetType::ALL, &ScanBox::default())?.1);
            all.extend(checks::theta_checks(3, &CosetType::ALL, &ScanBox::with_radius(3))?.1);
            all.push(checks::archimedean_check());
            all.extend(checks::purity_checks(&mut counter)?);
            let config = json!({ "trace_max": trace_max, "theta_primes": [DEFAULT_PRIME, 3], "purity_primes": checks::PURITY_PRIMES });
            emit(&VerificationReport::new(config, all), json.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
