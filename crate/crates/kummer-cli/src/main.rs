use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use kummer_cli::{
    champions_from_csv, histogram_from_csv, scan, verify_table, HistFilter, HistogramSpec,
    ScanOptions, DEFAULT_MIN_START_Q,
};

#[derive(Parser)]
#[command(name = "kummer", version, about = "Kummer ratio R(q) for prime cyclotomic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fft,
    Direct,
    Digamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum EpsArg {
    /// binary64 (unit roundoff 2^-53)
    #[value(name = "53")]
    E53,
    /// 80-bit extended (2^-64)
    #[value(name = "64")]
    E64,
    /// binary128 (2^-113)
    #[value(name = "113")]
    E113,
}

#[derive(Subcommand)]
enum Command {
    /// Compute r(q) and R(q) for one prime.
    Compute {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value = "fft")]
        method: MethodArg,
        /// Plan memory ceiling in GiB.
        #[arg(long, default_value_t = 6)]
        mem_limit_gb: u64,
    },
    /// Scan all odd primes up to a bound into a CSV file.
    Scan {
        #[arg(long)]
        max: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long, default_value_t = 6)]
        mem_limit_gb: u64,
        /// Suppress progress lines on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Recompute champion ledgers from a scan CSV.
    Champions {
        #[arg(long)]
        csv: PathBuf,
        /// Starting q for the minimal-champion ledger.
        #[arg(long, default_value_t = DEFAULT_MIN_START_Q)]
        min_start: u64,
    },
    /// Histogram of r(q) with optional normal overlay; writes SVG + data CSV.
    Hist {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 200)]
        bins: usize,
        /// all | exclude-2q | exclude-2q-4q | only-2q | only-4q
        #[arg(long, default_value = "all")]
        filter: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_overlay: bool,
        #[arg(long, default_value_t = -0.6)]
        lo: f64,
        #[arg(long, default_value_t = 0.6)]
        hi: f64,
    },
    /// Check a scan against a reference table of truncated R(q) strings.
    Verify {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// Evaluate the auxiliary constants and bound machinery.
    Bounds {
        #[arg(long, default_value_t = 2000)]
        lemma_t: u64,
        #[arg(long, default_value_t = 501)]
        c1_limit: u64,
    },
    /// Exact relative class number via the Maillet determinant.
    Maillet {
        #[arg(long)]
        q: u64,
    },
    /// Closed-form transform error budget for a prime.
    Budget {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value = "53")]
        eps: EpsArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            // Resource and I/O problems; usage errors exit 2 via clap or
            // earlier validation.
            ExitCode::from(3)
        }
    }
}

fn usage_error(msg: String) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compute { q, method, mem_limit_gb } => {
            if !kummer_core::is_prime(q) || q < 3 {
                return Ok(usage_error(format!("q must be an odd prime, got {q}")));
            }
            let result = match method {
                MethodArg::Fft => {
                    kummer_core::kummer_r_fft_with_limit(q, mem_limit_gb << 30)?
                }
                MethodArg::Direct => kummer_core::kummer_r_direct(q)?,
                MethodArg::Digamma => kummer_core::kummer_r_digamma(q)?,
            };
            println!("q        = {}", result.q);
            println!("method   = {}", result.method);
            println!("r(q)     = {:.15e}", result.r);
            println!("R(q)     = {:.15}", result.big_r);
            println!("log10 h1 = {:.6}", result.log10_h1);
            if let Some(acc) = result.fft_accuracy {
                println!("transform: N = {}, Delta = {:.3e}", acc.n, acc.delta);
                println!(
                    "roundtrip: E2 = {:.3e} (bound {:.3e}), Einf = {:.3e} (bound {:.3e})",
                    acc.measured_e2, acc.predicted_e2, acc.measured_einf, acc.predicted_einf
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan { max, out, resume, workers, mem_limit_gb, quiet } => {
            if max < 3 {
                return Ok(usage_error(format!("scan bound must be at least 3, got {max}")));
            }
            let opts = ScanOptions {
                max_q: max,
                workers,
                resume,
                mem_limit: mem_limit_gb << 30,
                progress: !quiet,
            };
            let summary = scan(&out, &opts)?;
            println!(
                "scan complete: {} rows written, {} resumed, {} max records, {} min records",
                summary.rows_written,
                summary.rows_skipped,
                summary.champions.max.entries.len(),
                summary.champions.min.entries.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Champions { csv, min_start } => {
            let tracker = champions_from_csv(&csv, min_start)?;
            println!("maximal champions:");
            for (q, r) in &tracker.max.entries {
                println!("  {q:>9}  R = {r:.15}");
            }
            println!("minimal champions (from q >= {min_start}):");
            for (q, r) in &tracker.min.entries {
                println!("  {q:>9}  R = {r:.15}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Hist { csv, bins, filter, out, no_overlay, lo, hi } => {
            let filter = match HistFilter::parse(&filter) {
                Ok(f) => f,
                Err(e) => return Ok(usage_error(format!("{e}"))),
            };
            let spec = HistogramSpec { bins, lo, hi, filter, overlay: !no_overlay };
            let hist = histogram_from_csv(&csv, &spec)?;
            kummer_cli::hist::write_outputs(&hist, &out)?;
            println!(
                "histogram: n = {}, mu = {:.6e}, sigma = {:.6e}; wrote {} and {}",
                hist.n,
                hist.mu,
                hist.sigma,
                out.display(),
                out.with_extension("csv").display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { csv, reference, digits } => {
            let report = verify_table(&csv, &reference, digits)?;
            println!("verify: {} passed, {} failed, {} missing",
                report.passed, report.failed.len(), report.missing.len());
            for (q, reason) in &report.failed {
                println!("  FAIL q={q}: {reason}");
            }
            for q in &report.missing {
                println!("  MISSING q={q}");
            }
            if report.all_ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Bounds { lemma_t, c1_limit } => {
            let (k, c1) = kummer_core::bounds::minimize_c1(c1_limit);
            println!("c1 minimum over odd k <= {c1_limit}: k = {k}, c1(k) = {c1:.12}");
            let base = kummer_core::bounds::lemma_limit_constant(2)?;
            let ten = kummer_core::bounds::lemma_limit_constant(10)?;
            println!("tail constant, m0 = 2:  {base:.12}   (43/13 - 18 zeta(3)/13)");
            println!("tail constant, m0 = 10: {ten:.12}");
            let direct = kummer_core::bounds::lemma_direct_sum(None, lemma_t);
            println!("direct double sum (q -> inf), T = {lemma_t}: {direct:.12}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Maillet { q } => {
            let h1 = match kummer_core::maillet_h1(q) {
                Ok(h1) => h1,
                Err(e @ kummer_core::MailletError::NotPrime(_))
                | Err(e @ kummer_core::MailletError::RangeExceeded { .. }) => {
                    return Ok(usage_error(format!("{e}")));
                }
                Err(e) => bail!("{e}"),
            };
            println!("h1({q}) = {h1}");
            let report = kummer_core::classical_h1_bounds_check(q, &h1);
            println!(
                "bounds: carlitz {} (log bound {:.4}), metsankyla {} ({:.4}), feng {} ({:.4})",
                report.carlitz_holds,
                report.carlitz_log_bound,
                report.metsankyla_holds,
                report.metsankyla_log_bound,
                report.feng_holds,
                report.feng_log_bound
            );
            if q <= kummer_core::ratio::DIRECT_MAX_Q {
                let direct = kummer_core::kummer_r_direct(q)?;
                println!(
                    "cross-check: exp(r + log G) = {:.6e}",
                    (direct.r + kummer_core::log_g(q)).exp()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Budget { q, eps } => {
            let epsilon = match eps {
                EpsArg::E53 => 2f64.powi(-53),
                EpsArg::E64 => 2f64.powi(-64),
                EpsArg::E113 => 2f64.powi(-113),
            };
            let budget = match kummer_core::bounds::fft_error_budget(q, epsilon) {
                Ok(b) => b,
                Err(e) => return Ok(usage_error(format!("{e}"))),
            };
            println!("q = {}, N = (q-1)/2 = {}", budget.q, budget.n);
            println!("epsilon         = {:.6e}", budget.epsilon);
            println!("Delta           = {:.6e}", budget.delta);
            println!("||x||_2         = {:.5}", budget.l2_norm);
            println!("||x||_inf       = {:.12}", budget.linf_norm);
            println!("Delta(2+Delta)  = {:.6e}", budget.delta_2p);
            println!("max FFT error   = {:.6e}  (Delta ||x||_2)", budget.fft_max_error_bound);
            println!("E2 bound        = {:.6e}  (Delta(2+Delta) ||x||_2)", budget.e2_bound);
            println!("Einf bound      = {:.6e}  (Delta(2+Delta) sqrt(N) ||x||_inf)", budget.einf_bound);
            Ok(ExitCode::SUCCESS)
        }
    }
}
