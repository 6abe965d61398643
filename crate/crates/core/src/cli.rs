//! Command-line driver. Every subcommand renders its full output to a
//! string first, then writes it to stdout or atomically to `--out`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arithmetic::{classify, euler_phi, factorize_u64, psi_exact};
use crate::asymptotics::{
    compare_table, d2_arbitration, estimate, format_f64, gamma_check, integral_series_check,
    lemma_tail_check, mertens_product_check, tau_expansion_check, write_check_csv, CheckReport,
    EstimateParams, IntegralDomain, Which,
};
use crate::census::{
    census, census_collect, checkpoints_to_string, default_checkpoints, read_checkpoints, write_atomic,
    CensusConfig, Checkpoint, Execution, DEFAULT_SEGMENT_SIZE,
};
use crate::error::{Error, Result};
use crate::primes::DEFAULT_SIEVE_CAP;
use crate::series::{write_coefficient_csv, Family, DEFAULT_TABLE_DIGITS, MAX_ORDER};

/// Exit code when a check suite ran but a hard tolerance was missed.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "groupcount", version, about = "Count and estimate cyclic, strictly abelian and strictly nilpotent numbers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print `n,class,phi,psi` for each n.
    Classify {
        #[arg(required = true, value_parser = parse_count)]
        n: Vec<u64>,
    },
    /// Count the four classes over [1, limit] and print checkpoint rows.
    Count(CountArgs),
    /// Coefficient table of one family.
    Coeffs {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_TABLE_DIGITS)]
        digits: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a truncated expansion.
    Estimate {
        #[arg(long, value_parser = parse_which)]
        which: Which,
        #[arg(long, value_parser = parse_real)]
        x: f64,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long = "synthetic-L", value_parser = parse_real)]
        synthetic_l: Option<f64>,
    },
    /// Census counts next to the estimates, as check rows.
    Compare {
        #[command(flatten)]
        census: CountArgs,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Read counts from a checkpoint file instead of counting.
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Run a numerical validation suite.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long, value_parser = parse_count)]
    pub limit: u64,
    /// Extra checkpoints, comma separated; powers of ten and the limit are always included.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub checkpoints: Vec<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, conflicts_with = "threads")]
    pub sequential: bool,
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_SEGMENT_SIZE)]
    pub segment_size: u64,
    /// Continue from the last row of a checkpoint file.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Gamma,
    Integral,
    Lemmas,
    Mertens,
    Tau,
    D2,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long = "L", default_value_t = 15.0, value_parser = parse_real)]
    pub l: f64,
    #[arg(long, default_value_t = 1e4, value_parser = parse_real)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_count, default_value_t = 100_000_000)]
    pub z: u64,
    /// Series order; defaults to 8 (gamma), 4 (integral) or 2 (tau).
    #[arg(long)]
    pub order: Option<usize>,
    /// Single lemma tail: exponent.
    #[arg(long, requires_all = ["t", "cap"])]
    pub power: Option<u32>,
    #[arg(long, value_parser = parse_real)]
    pub t: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub cap: Option<u64>,
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_SIEVE_CAP)]
    pub sieve_cap: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses a non-negative integer given plainly, in scientific notation
/// (`1e9`, `2.5e6`) or as a power (`10^6`).
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    if let Some((b, e)) = s.split_once('^') {
        let b: u64 = b.parse().map_err(|_| format!("bad base in {s:?}"))?;
        let e: u32 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return b.checked_pow(e).ok_or_else(|| format!("{s} does not fit in 64 bits"));
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0) {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    if v >= 18_446_744_073_709_551_616.0 {
        return Err(format!("{s} does not fit in 64 bits"));
    }
    Ok(v as u64)
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.parse().map_err(|_| format!("bad base in {s:?}"))?;
            let e: f64 = e.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            b.powf(e)
        }
        None => s.parse().map_err(|_| format!("{s:?} is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_which(s: &str) -> std::result::Result<Which, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a subcommand produced: text for the data stream and whether every
/// hard check passed.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn data(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn classify_lines(ns: &[u64]) -> Result<String> {
    let mut s = String::new();
    for &n in ns {
        if n == 0 || n >= 1 << 63 {
            return Err(Error::Domain(format!("n = {n} outside [1, 2^63)")));
        }
        let f = factorize_u64(n)?;
        writeln!(s, "{n},{},{},{}", classify(&f), euler_phi(&f), psi_exact(&f)).expect("string write");
    }
    Ok(s)
}

fn census_config(a: &CountArgs) -> Result<CensusConfig> {
    if a.segment_size == 0 {
        return Err(Error::Config("--segment-size must be positive".into()));
    }
    if a.threads == Some(0) {
        return Err(Error::Config("--threads must be positive".into()));
    }
    let execution = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel { threads: a.threads }
    };
    Ok(CensusConfig { segment_size: a.segment_size, execution })
}

/// Runs the census for `count`, rewriting `--out` after every checkpoint.
fn run_count(a: &CountArgs) -> Result<Vec<Checkpoint>> {
    let config = census_config(a)?;
    let requested = default_checkpoints(a.limit, &a.checkpoints);
    let mut rows: Vec<Checkpoint> = Vec::new();
    let mut resume = None;
    if let Some(path) = &a.resume {
        let prior = read_checkpoints(fs::File::open(path)?)?;
        if let Some(last) = prior.last().copied() {
            if last.x > a.limit {
                return Err(Error::Config(format!(
                    "resume file ends at {} beyond the limit {}",
                    last.x, a.limit
                )));
            }
            rows.extend(prior.into_iter().filter(|c| requested.contains(&c.x)));
            resume = Some(last);
        }
    }
    let out = a.out.clone();
    census(a.limit, &requested, resume, &config, |cp| {
        rows.push(cp);
        if let Some(p) = &out {
            write_atomic(p, checkpoints_to_string(&rows).as_bytes())?;
        }
        eprintln!("# checkpoint {}", cp.x);
        Ok(())
    })?;
    if rows.is_empty() {
        if let Some(p) = &out {
            write_atomic(p, checkpoints_to_string(&rows).as_bytes())?;
        }
    }
    Ok(rows)
}

fn reports_output(reports: Vec<CheckReport>) -> Result<Output> {
    let mut buf = Vec::new();
    write_check_csv(&mut buf, &reports)?;
    Ok(Output {
        text: String::from_utf8(buf).expect("ascii csv"),
        ok: reports.iter().all(CheckReport::passed),
    })
}

fn run_check(a: &CheckArgs) -> Result<Output> {
    let mut reports = Vec::new();
    match a.suite {
        Suite::Gamma => {
            let order = a.order.unwrap_or(8);
            if order > MAX_ORDER {
                return Err(Error::Domain(format!("order {order} exceeds {MAX_ORDER}")));
            }
            reports.push(gamma_check(order, 50)?);
        }
        Suite::Integral => {
            let order = a.order.unwrap_or(4);
            for s in [1, 2] {
                reports.push(integral_series_check(a.l, s, order, IntegralDomain::Window)?);
            }
            for s in [1, 2] {
                reports.push(integral_series_check(a.l, s, order, IntegralDomain::Full)?);
            }
        }
        Suite::Lemmas => {
            let cases = match (a.power, a.t, a.cap) {
                (Some(p), Some(t), Some(cap)) => vec![(p, t, cap)],
                _ => vec![(2, 1e6, 1_000_000_000), (3, 1e4, 100_000_000), (4, 1e3, 10_000_000)],
            };
            for (p, t, cap) in cases {
                reports.push(lemma_tail_check(t, p, cap, a.sieve_cap)?);
            }
        }
        Suite::Mertens => {
            let mut zs: Vec<u64> = [100_000, 1_000_000, 10_000_000].into_iter().filter(|&z| z < a.z).collect();
            zs.push(a.z);
            for z in zs {
                reports.push(mertens_product_check(z, a.sieve_cap)?);
            }
        }
        Suite::Tau => {
            reports.push(tau_expansion_check(a.lambda, a.order.unwrap_or(2), a.sieve_cap)?);
        }
        Suite::D2 => reports.push(d2_arbitration()?),
    }
    let mut out = reports_output(reports)?;
    if a.suite == Suite::Tau {
        out.ok = true;
    }
    Ok(out)
}

/// Executes one parsed command; `Ok(false)` means a check missed its tolerance.
pub fn execute(cli: &Cli) -> Result<bool> {
    let (out, path): (Output, Option<&Path>) = match &cli.command {
        Command::Classify { n } => (Output::data(classify_lines(n)?), None),
        Command::Count(a) => {
            let rows = run_count(a)?;
            if a.out.is_some() {
                return Ok(true);
            }
            (Output::data(checkpoints_to_string(&rows)), None)
        }
        Command::Coeffs { family, order, digits, out } => {
            if *order > MAX_ORDER {
                return Err(Error::Domain(format!("order {order} exceeds {MAX_ORDER}")));
            }
            let mut buf = Vec::new();
            write_coefficient_csv(&mut buf, *family, *order, *digits)?;
            (Output::data(String::from_utf8(buf).expect("ascii csv")), out.as_deref())
        }
        Command::Estimate { which, x, order, synthetic_l } => {
            let mut p = EstimateParams::new(*x, *order);
            if let Some(l) = synthetic_l {
                p = p.with_synthetic_l(*l);
            }
            (Output::data(format!("{}\n", format_f64(estimate(*which, &p)?))), None)
        }
        Command::Compare { census: a, order, from } => {
            let requested = default_checkpoints(a.limit, &a.checkpoints);
            let rows = match from {
                Some(p) => read_checkpoints(fs::File::open(p)?)?,
                None => census_collect(a.limit, &requested, None, &census_config(a)?)?,
            };
            (reports_output(vec![compare_table(&requested, &rows, *order)?])?, a.out.as_deref())
        }
        Command::Check(a) => (run_check(a)?, a.out.as_deref()),
    };
    emit(path, &out.text)?;
    Ok(out.ok)
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_parse() {
        assert_eq!(parse_count("1e9"), Ok(1_000_000_000));
        assert_eq!(parse_count("10^6"), Ok(1_000_000));
        assert_eq!(parse_count("2.5e3"), Ok(2500));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("1e20").is_err());
        assert!(parse_count("abc").is_err());
    }

    #[test]
    fn classify_format() {
        assert_eq!(classify_lines(&[8, 1, 45]).unwrap(), "8,strictly_nilpotent,4,21\n1,cyclic,1,1\n45,strictly_abelian,24,64\n");
        assert!(matches!(classify_lines(&[0]), Err(Error::Domain(_))));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["groupcount", "coeffs", "--family", "x"]), 2);
        assert_eq!(run(["groupcount", "bogus"]), 2);
        assert_eq!(run(["groupcount", "estimate", "--which", "cyclic", "--x", "10"]), 2);
    }
}
