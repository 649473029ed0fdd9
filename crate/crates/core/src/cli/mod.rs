//! Command-line front end: `orbitsym verify` and `orbitsym info`.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num::{BigInt, BigRational, Zero};

use crate::iwasawa::DEFAULT_FD_STEP;
use crate::lie_model::{ChamberElement, SpecialLinear};
use crate::suites::{run_suite, Suite, SuiteConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::symplectic::{Tolerances, VerificationReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ORBITSYM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "orbitsym",
    version,
    about = "Numerical checks for hyperbolic adjoint orbits of SL(n, R) and their cotangent-bundle picture"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run verification suites and report PASS/FAIL per suite.
    Verify(VerifyArgs),
    /// Print the block structure and subspace dimensions for H.
    Info(ModelArgs),
}

#[derive(Debug, Clone)]
struct Entries(Vec<BigRational>);

#[derive(Debug, Args)]
struct ModelArgs {
    /// Matrix size.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=8))]
    n: u8,
    /// Diagonal of H, weakly decreasing and summing to zero, e.g. "2,0,-2" or "1/3,1/3,-2/3".
    #[arg(long = "H", allow_hyphen_values = true, value_parser = parse_entries)]
    h: Entries,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite to run (defaults to all).
    #[arg(value_enum, value_name = "SUITE")]
    suite_positional: Option<Suite>,
    /// Same as the positional suite.
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long = "fd-step", default_value_t = DEFAULT_FD_STEP)]
    fd_step: f64,
    /// Threshold for every exact-formula check.
    #[arg(long = "tol-exact")]
    tol_exact: Option<f64>,
    /// Threshold for every finite-difference check.
    #[arg(long = "tol-fd")]
    tol_fd: Option<f64>,
    /// Write the reports as a JSON array to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Suppress the per-suite summary lines.
    #[arg(long)]
    quiet: bool,
}

/// Parses a comma-separated list of decimals and simple fractions exactly.
pub fn parse_entries_exact(text: &str) -> Result<Vec<BigRational>, String> {
    text.split(',')
        .map(|item| parse_rational(item.trim()))
        .collect()
}

fn parse_entries(text: &str) -> Result<Entries, String> {
    parse_entries_exact(text).map(Entries)
}

fn parse_rational(item: &str) -> Result<BigRational, String> {
    if item.is_empty() {
        return Err("empty entry in H".into());
    }
    if let Some((num, den)) = item.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return Err(format!("zero denominator in {item:?}"));
        }
        return Ok(num / den);
    }
    parse_decimal(item)
}

fn parse_decimal(item: &str) -> Result<BigRational, String> {
    let bad = || format!("cannot parse {item:?} as a decimal or fraction");
    let (mantissa, exponent) = match item.find(['e', 'E']) {
        Some(pos) => (
            &item[..pos],
            item[pos + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (item, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let numer: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let shift = exponent - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(numer);
    if shift >= 0 {
        value *= num::pow(ten, shift as usize);
    } else {
        value /= num::pow(ten, shift.unsigned_abs() as usize);
    }
    Ok(if negative { -value } else { value })
}

fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Everything `verify` needs, after argument parsing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub h: Vec<BigRational>,
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub tol_exact: Option<f64>,
    pub tol_fd: Option<f64>,
}

impl RunConfig {
    pub fn chamber(&self) -> Result<ChamberElement, String> {
        if self.h.len() != self.n {
            return Err(format!(
                "--n is {} but H has {} entries",
                self.n,
                self.h.len()
            ));
        }
        let model = SpecialLinear::new(self.n).map_err(|e| e.to_string())?;
        ChamberElement::from_rationals(Arc::new(model), &self.h).map_err(|e| e.to_string())
    }

    pub fn suite_config(&self) -> Result<SuiteConfig, String> {
        if self.samples == 0 {
            return Err("--samples must be at least 1".into());
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(format!("--fd-step must be positive, got {}", self.fd_step));
        }
        let mut tolerances = Tolerances::default();
        for (flag, value) in [("--tol-exact", self.tol_exact), ("--tol-fd", self.tol_fd)] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(format!("{flag} must be positive, got {v}"));
                }
            }
        }
        if let Some(v) = self.tol_exact {
            tolerances = tolerances.with_exact(v);
        }
        if let Some(v) = self.tol_fd {
            tolerances = tolerances.with_fd(v);
        }
        Ok(SuiteConfig {
            samples: self.samples,
            seed: self.seed,
            fd_step: self.fd_step,
            tolerances,
            ..SuiteConfig::default()
        })
    }
}

/// Outcome of [`run`]: reports that completed, and errors from suites that did not.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub reports: Vec<VerificationReport>,
    pub errors: Vec<(Suite, crate::Error)>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() && self.reports.iter().all(|r| r.pass) {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Runs every selected suite against a validated chamber element.
pub fn run(chamber: &ChamberElement, suite: Suite, config: &SuiteConfig) -> RunOutcome {
    let mut outcome = RunOutcome::default();
    for s in suite.expand() {
        match run_suite(chamber, s, config) {
            Ok(report) => outcome.reports.push(report),
            Err(e) => outcome.errors.push((s, e)),
        }
    }
    outcome
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| e.to_string())
}

fn verify(args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let suite = match (args.suite_positional, args.suite) {
        (Some(a), Some(b)) if a != b => {
            let _ = writeln!(
                err,
                "error: suite given twice ({} and {})",
                a.name(),
                b.name()
            );
            return EXIT_USAGE;
        }
        (a, b) => a.or(b).unwrap_or(Suite::All),
    };
    let config = RunConfig {
        n: args.model.n as usize,
        h: args.model.h.0,
        suite,
        samples: args.samples,
        seed: args.seed,
        fd_step: args.fd_step,
        tol_exact: args.tol_exact,
        tol_fd: args.tol_fd,
    };
    let prepared = config
        .chamber()
        .and_then(|c| config.suite_config().map(|s| (c, s)))
        .and_then(|(c, s)| thread_pool().map(|p| (c, s, p)));
    let (chamber, suite_config, pool) = match prepared {
        Ok(v) => v,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_USAGE;
        }
    };

    let outcome = match &pool {
        Some(pool) => pool.install(|| run(&chamber, suite, &suite_config)),
        None => run(&chamber, suite, &suite_config),
    };

    if !args.quiet {
        for report in &outcome.reports {
            let _ = writeln!(out, "{}", report.summary_line());
        }
    }
    for (s, e) in &outcome.errors {
        let _ = writeln!(err, "error: suite {} failed to run: {e}", s.name());
    }
    if let Some(path) = &args.json {
        let written = serde_json::to_string_pretty(&outcome.reports)
            .map_err(|e| e.to_string())
            .and_then(|text| std::fs::write(path, text + "\n").map_err(|e| e.to_string()));
        if let Err(e) = written {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_FAIL;
        }
    }
    outcome.exit_code()
}

fn info(args: ModelArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let n = args.n as usize;
    let config = RunConfig {
        n,
        h: args.h.0,
        suite: Suite::All,
        samples: 1,
        seed: DEFAULT_SEED,
        fd_step: DEFAULT_FD_STEP,
        tol_exact: None,
        tol_fd: None,
    };
    let chamber = match config.chamber() {
        Ok(c) => c,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            return EXIT_USAGE;
        }
    };
    let mut offset = 0;
    let blocks: Vec<String> = chamber
        .blocks()
        .iter()
        .map(|b| {
            let text = format!(
                "{} (x{})",
                format_rational(&config.h[offset]),
                b.multiplicity
            );
            offset += b.multiplicity;
            text
        })
        .collect();
    let h_text: Vec<String> = config.h.iter().map(format_rational).collect();
    let lines = [
        ("model", format!("{} with n = {n}", chamber.model().name())),
        ("H", format!("diag({})", h_text.join(", "))),
        ("blocks", blocks.join(", ")),
        (
            "regular",
            if chamber.is_regular() { "yes" } else { "no" }.to_string(),
        ),
        ("dim n(H)", chamber.n_of_h().len().to_string()),
        ("dim z(H)", chamber.z_of_h().len().to_string()),
        ("dim z_K(H)", chamber.z_k_of_h().len().to_string()),
        ("orbit dim", chamber.orbit_dim().to_string()),
        ("flag dim", chamber.flag_dim().to_string()),
    ];
    for (label, value) in lines {
        let _ = writeln!(out, "{label:<12} {value}");
    }
    EXIT_PASS
}

/// Parses `args` (including the program name) and runs the command, writing to the
/// given streams. Returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match cli.command {
        Command::Verify(args) => verify(args, out, err),
        Command::Info(args) => info(args, out, err),
    }
}
