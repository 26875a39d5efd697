//! Command-line front end.
//!
//! ```text
//! normprod pdf      --x V        [--n N --rho R --sigma-x SX --sigma-y SY]
//! normprod cdf      --x V        [...]
//! normprod quantile --p Q        [...]
//! normprod sample   --count N [--seed S] [...]
//! normprod grid     --from A --to B --points M [...]
//! normprod verify   [--checks stein,ode,norm,bessel,ks] [--count N] [--seed S] [--format json|text]
//! ```
//!
//! Scalars are printed with 17 significant digits, grids as CSV with an
//! `x,pdf,cdf` header and verification results as a JSON array of reports
//! (or text lines with `--format text`).
//! Exit codes: 0 success, 1 failed check or numerical failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::distribution::ProductNormalParams;
use crate::exec::Execution;
use crate::sampling::{sample_batch, Seed};
use crate::verify::{run_battery, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Parser)]
#[command(name = "normprod", version, about = "Mean of products of zero-mean correlated normals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Number of products averaged
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Correlation coefficient, in (-1, 1)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rho: f64,
    /// Standard deviation of X
    #[arg(long, default_value_t = 1.0)]
    sigma_x: f64,
    /// Standard deviation of Y
    #[arg(long, default_value_t = 1.0)]
    sigma_y: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the density at x
    Pdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// Print the distribution function at x
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// Print the p-quantile
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        p: f64,
    },
    /// Print draws of the mean, one per line
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print `x,pdf,cdf` rows on an even grid
    Grid {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
    },
    /// Run verification suites over the acceptance grid and print the reports
    Verify {
        /// Comma-separated subset of stein,ode,norm,bessel,ks
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Monte Carlo draws per parameter set
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        #[arg(long, default_value_t = 20_190_101)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    /// JSON array of reports
    Json,
    /// One `PASS`/`FAIL` line per report
    Text,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Parse `argv` (program name first) and execute it.
pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    CliOutput { exit_code: EXIT_OK, stdout: rendered, stderr: String::new() }
                }
                _ => CliOutput { exit_code: EXIT_USAGE, stdout: String::new(), stderr: rendered },
            };
        }
    };

    let mut stdout = String::new();
    match execute(cli.command, &mut stdout) {
        Ok(code) => CliOutput { exit_code: code, stdout, stderr: String::new() },
        Err(Failure::Usage(msg)) => CliOutput {
            exit_code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n\n{}", Cli::command().render_usage()),
        },
        Err(Failure::Runtime(msg)) => CliOutput { exit_code: EXIT_FAILURE, stdout, stderr: format!("error: {msg}\n") },
    }
}

fn params_of(a: &ParamArgs) -> Result<ProductNormalParams, Failure> {
    ProductNormalParams::new(a.n, a.sigma_x, a.sigma_y, a.rho).map_err(|e| Failure::Usage(e.to_string()))
}

fn require_finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be finite")))
    }
}

fn execute(command: Command, out: &mut String) -> Result<i32, Failure> {
    match command {
        Command::Pdf { params, x } => {
            let d = params_of(&params)?.distribution();
            writeln!(out, "{}", format_g17(d.pdf(x))).unwrap();
        }
        Command::Cdf { params, x } => {
            let d = params_of(&params)?.distribution();
            writeln!(out, "{}", format_g17(d.cdf(x)?)).unwrap();
        }
        Command::Quantile { params, p } => {
            let d = params_of(&params)?.distribution();
            if !(p > 0.0 && p < 1.0) {
                return Err(Failure::Usage(format!("--p must lie in (0, 1), got {p}")));
            }
            writeln!(out, "{}", format_g17(d.quantile(p)?)).unwrap();
        }
        Command::Sample { params, count, seed } => {
            let p = params_of(&params)?;
            if count == 0 {
                return Err(Failure::Usage("--count must be at least 1".into()));
            }
            let batch = sample_batch(&p, count, Seed(seed))?;
            out.reserve(batch.len() * 24);
            for v in &batch.values {
                out.push_str(&format_g17(*v));
                out.push('\n');
            }
        }
        Command::Grid { params, from, to, points } => {
            let d = params_of(&params)?.distribution();
            require_finite("from", from)?;
            require_finite("to", to)?;
            if !(from < to) {
                return Err(Failure::Usage("--from must be less than --to".into()));
            }
            if points < 2 {
                return Err(Failure::Usage("--points must be at least 2".into()));
            }
            let step = (to - from) / (points - 1) as f64;
            let xs: Vec<f64> = (0..points).map(|i| if i + 1 == points { to } else { from + i as f64 * step }).collect();
            if xs.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Failure::Usage("grid too fine for the interval".into()));
            }
            let cdf = d.cdf_sorted(&xs)?;
            out.push_str("x,pdf,cdf\n");
            for (x, f) in xs.iter().zip(cdf) {
                writeln!(out, "{},{},{}", format_g17(*x), format_g17(d.pdf(*x)), format_g17(f)).unwrap();
            }
        }
        Command::Verify { checks, count, seed, format } => {
            let suites: Vec<Suite> = match checks {
                None => Suite::ALL.to_vec(),
                Some(names) => {
                    names.iter().map(|s| s.parse::<Suite>()).collect::<Result<_, _>>().map_err(Failure::Usage)?
                }
            };
            let needs_mc = suites.contains(&Suite::Stein) || suites.contains(&Suite::Ks);
            if needs_mc && count < 100_000 {
                return Err(Failure::Usage("--count must be at least 100000 for the stein and ks suites".into()));
            }
            let reports = run_battery(&suites, count, Seed(seed), Execution::default())?;
            match format {
                ReportFormat::Json => {
                    out.push_str(&serde_json::to_string_pretty(&reports).expect("reports serialize"));
                    out.push('\n');
                }
                ReportFormat::Text => {
                    for r in &reports {
                        let status = if r.passed { "PASS" } else { "FAIL" };
                        writeln!(
                            out,
                            "{status} {} estimate={} uncertainty={} tolerance={}",
                            r.name,
                            format_g17(r.estimate),
                            format_g17(r.uncertainty),
                            format_g17(r.tolerance)
                        )
                        .unwrap();
                    }
                }
            }
            return Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAILURE });
        }
    }
    Ok(EXIT_OK)
}

/// Format like C's `%.17g`.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliOutput {
        run(std::iter::once("normprod").chain(args.iter().copied()))
    }

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1.5e20), "1.5e+20");
        assert_eq!(format_g17(123456.0), "123456");
        assert_eq!(format_g17(f64::INFINITY), "inf");
        assert_eq!(format_g17(0.0), "0");
        for &v in &[std::f64::consts::PI, 1.0 / 3.0, -7.25e-300, 6.02e23] {
            assert_eq!(format_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn pdf_and_quantile_examples() {
        let out = run_args(&["pdf", "--n", "2", "--rho", "0.3", "--x", "0"]);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.stdout, "1\n");
        let out = run_args(&["quantile", "--n", "1", "--rho", "0", "--p", "0.5"]);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.stdout, "0\n");
    }

    #[test]
    fn negative_values_parse() {
        let out = run_args(&["cdf", "--rho", "-0.3", "--x", "-1.5"]);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        let v: f64 = out.stdout.trim().parse().unwrap();
        assert!(v > 0.0 && v < 0.5);
    }

    #[test]
    fn usage_errors_exit_two() {
        for args in [
            vec!["pdf", "--rho", "1.0", "--x", "0"],
            vec!["pdf", "--n", "0", "--x", "1"],
            vec!["pdf"],
            vec!["cdf", "--n", "2"],
            vec!["quantile"],
            vec!["grid", "--from", "0", "--to", "1"],
            vec!["quantile", "--p", "1.5"],
            vec!["sample", "--seed", "3"],
            vec!["sample", "--count", "0"],
            vec!["grid", "--from", "1", "--to", "0", "--points", "5"],
            vec!["grid", "--from", "0", "--to", "1", "--points", "1"],
            vec!["verify", "--checks", "bogus"],
            vec!["pdf", "--x", "1", "--bogus"],
            vec!["frobnicate"],
        ] {
            let out = run_args(&args);
            assert_eq!(out.exit_code, 2, "{args:?}: {}", out.stdout);
            assert!(out.stderr.contains("Usage") || out.stderr.contains("usage"), "{args:?}: {}", out.stderr);
        }
    }

    #[test]
    fn help_exits_zero() {
        let out = run_args(&["--help"]);
        assert_eq!(out.exit_code, 0);
        assert!(out.stdout.contains("verify"));
    }

    #[test]
    fn sample_is_reproducible() {
        let a = run_args(&["sample", "--n", "3", "--rho", "0.2", "--count", "50", "--seed", "9"]);
        let b = run_args(&["sample", "--n", "3", "--rho", "0.2", "--count", "50", "--seed", "9"]);
        assert_eq!(a.exit_code, 0);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout.lines().count(), 50);
    }

    #[test]
    fn grid_rows() {
        let out = run_args(&["grid", "--n", "1", "--rho", "0.5", "--from", "-2", "--to", "2", "--points", "9"]);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        let mut lines = out.stdout.lines();
        assert_eq!(lines.next(), Some("x,pdf,cdf"));
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 9);
        assert!(rows.windows(2).all(|w| w[0][0] < w[1][0] && w[0][2] <= w[1][2]));
        assert_eq!(rows[4][1], f64::INFINITY);
    }

    #[test]
    fn verify_bessel_suite() {
        let out = run_args(&["verify", "--checks", "bessel"]);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        let reports: Vec<crate::verify::CheckReport> = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(reports.len(), 25);
        assert!(reports.iter().all(|r| r.passed));

        let out = run_args(&["verify", "--checks", "norm,bessel", "--format", "text"]);
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        assert_eq!(out.stdout.lines().count(), 50);
        assert!(out.stdout.lines().all(|l| l.starts_with("PASS ")));
        assert_eq!(run_args(&["verify", "--format", "xml"]).exit_code, 2);
    }
}
