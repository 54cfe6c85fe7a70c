//! Command-line front end: one command per experiment, each producing a
//! fixed-column table.
//!
//! | command       | columns                                                     |
//! |---------------|-------------------------------------------------------------|
//! | `sigma`       | `P,lo,hi,width,midpoint`                                    |
//! | `carlitz`     | `N,count,ratio,sigma,ratio_error`                           |
//! | `pairs`       | `N,count,pi_N,prediction,abs_error,rel_error`               |
//! | `single`      | `N,count,pi_N,prediction,abs_error,rel_error`               |
//! | `decompose`   | `N,z,sigma1,sigma2,total`                                   |
//! | `expsum`      | `N,H,D,T,lhs,rhs,ratio,eps` (or `N,h,d,t,re,im,modulus,pi_N` with `--h`) |
//! | `discrepancy` | `K,H,a,b,star_discrepancy,count,lhs,rhs,ratio`              |
//! | `fit`         | `alpha,points,exponent,intercept,residual_rms`              |
//!
//! Exit codes: 0 success, 2 configuration error, 3 cap or budget exceeded,
//! 4 I/O failure.

pub mod table;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use crate::alpha_exact::{parse_alpha, AlgebraicAlpha};
use crate::arith_sieves::{crt_residue, Sieve, SieveConfig};
use crate::constants::sigma_enclosure;
use crate::counting::{self, sigma_midpoint};
use crate::error::Error;
use crate::expsum_lab::{self, DyadicQuery, ExpSumQuery, DEFAULT_BUDGET, DEFAULT_EPS};
use table::{emit_table, Cell, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sigma,
    Carlitz,
    Pairs,
    Single,
    Decompose,
    Expsum,
    Discrepancy,
    Fit,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sqfree-lab",
    version,
    about = "Squarefree pairs [αp], [αp]+1 over primes: counts, constants, bounds"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// `sqrt:<D>`, `quad:<a>,<b>,<c>,<D>` or `poly:<c0>,...,<ck>@<lo>,<hi>`.
    #[arg(long, default_value = "sqrt:2")]
    pub alpha: String,
    /// Comma-separated N values (or K for `discrepancy`); accepts `1e6`.
    #[arg(long = "n", value_name = "LIST")]
    pub n: Option<String>,
    /// Prime limit for `sigma`.
    #[arg(long = "P", value_name = "INT", default_value = "1e6")]
    pub p: String,
    /// Cutoff rule for `decompose`: `pow:<e>` (z = N^e) or `fixed:<v>`.
    #[arg(long = "z", value_name = "RULE", default_value = "pow:0.1")]
    pub z: String,
    /// Block rule for `expsum` and frequency cutoff for `discrepancy`.
    #[arg(long = "H", value_name = "RULE", default_value = "pow:0.2")]
    pub big_h: String,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    /// Single frequency; switches `expsum` to per-query output.
    #[arg(long)]
    pub h: Option<u64>,
    /// `a,b` with 0 <= a < b <= 1.
    #[arg(long)]
    pub interval: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "segment-cap", default_value_t = SieveConfig::default().segment_cap)]
    pub segment_cap: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

/// `N ↦ N^e` or a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    Pow(f64),
    Fixed(f64),
}

impl Rule {
    pub fn apply(&self, n: u64) -> f64 {
        match *self {
            Rule::Pow(e) => (n as f64).powf(e),
            Rule::Fixed(v) => v,
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("rule `{s}`: expected pow:<e> or fixed:<v>"));
        let (kind, val) = s.split_once(':').ok_or_else(bad)?;
        let v: f64 = val.trim().parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        match kind.trim() {
            "pow" => Ok(Rule::Pow(v)),
            "fixed" if v > 0.0 => Ok(Rule::Fixed(v)),
            _ => Err(bad()),
        }
    }
}

/// A parsed and validated invocation.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub alpha: AlgebraicAlpha,
    pub n_values: Vec<u64>,
    pub p: u64,
    pub z_rule: Rule,
    pub h_rule: Rule,
    pub d: Option<u64>,
    pub t: Option<u64>,
    pub h: Option<u64>,
    pub interval: Option<(f64, f64)>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub segment_cap: usize,
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_limit() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Integer with optional scientific shorthand: `1000`, `1e6`, `2.5e3`.
pub fn parse_count(s: &str) -> Result<u64, Error> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("`{s}` is not a nonnegative integer"));
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !(x >= 0.0 && x.fract() == 0.0 && x <= 9.007_199_254_740_992e15) {
        return Err(bad());
    }
    Ok(x as u64)
}

pub fn parse_list(s: &str) -> Result<Vec<u64>, Error> {
    let vals = s
        .split(',')
        .map(parse_count)
        .collect::<Result<Vec<_>, _>>()?;
    if vals.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(format!(
            "list `{s}` must be strictly ascending"
        )));
    }
    Ok(vals)
}

fn parse_interval(s: &str) -> Result<(f64, f64), Error> {
    let bad = || Error::Parse(format!("interval `{s}`: expected a,b"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(0.0 <= a && a < b && b <= 1.0) {
        return Err(Error::InvalidInterval { a, b });
    }
    Ok((a, b))
}

fn default_n(command: Command) -> &'static str {
    match command {
        Command::Sigma => "",
        Command::Decompose => "1e3,1e4",
        Command::Expsum => "1e3,1e4,1e5",
        Command::Discrepancy => "1e4",
        Command::Carlitz | Command::Pairs | Command::Single | Command::Fit => "1e4,1e5,1e6",
    }
}

impl ExperimentConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let alpha = parse_alpha(&args.alpha)?;
        let n_values = match (&args.n, args.command) {
            (_, Command::Sigma) => Vec::new(),
            (Some(list), _) => parse_list(list)?,
            (None, c) => parse_list(default_n(c))?,
        };
        if args.segment_cap == 0 || args.budget == 0 {
            return Err(CliError::config("segment cap and budget must be positive"));
        }
        Ok(ExperimentConfig {
            command: args.command,
            alpha,
            n_values,
            p: parse_count(&args.p)?,
            z_rule: args.z.parse()?,
            h_rule: args.big_h.parse()?,
            d: args.d,
            t: args.t,
            h: args.h,
            interval: args.interval.as_deref().map(parse_interval).transpose()?,
            format: args.format,
            out: args.out,
            segment_cap: args.segment_cap,
            budget: args.budget,
        })
    }

    fn sieve(&self) -> Sieve {
        Sieve::new(SieveConfig {
            segment_cap: self.segment_cap,
            ..SieveConfig::default()
        })
    }
}

/// Runs the experiment and returns its table without writing anything.
pub fn execute(config: &ExperimentConfig) -> Result<Table, CliError> {
    let sieve = config.sieve();
    let alpha = &config.alpha;
    let timed = |label: String, start: Instant| {
        eprintln!("{} {label}: {:.2?}", config.command, start.elapsed());
    };
    match config.command {
        Command::Sigma => {
            let start = Instant::now();
            let e = sigma_enclosure::<f64>(&sieve, config.p)?;
            timed(format!("P={}", config.p), start);
            let mut t = Table::new(&["P", "lo", "hi", "width", "midpoint"]);
            t.push(vec![
                config.p.into(),
                e.lo.into(),
                e.hi.into(),
                e.width().into(),
                e.midpoint().into(),
            ]);
            t.single_object = true;
            Ok(t)
        }
        Command::Carlitz => {
            let sigma = sigma_midpoint(&sieve)?;
            let mut t = Table::new(&["N", "count", "ratio", "sigma", "ratio_error"]);
            for &n in &config.n_values {
                let start = Instant::now();
                let count = counting::carlitz_count(&sieve, n)?;
                timed(format!("N={n}"), start);
                let ratio = count as f64 / n as f64;
                t.push(vec![
                    n.into(),
                    count.into(),
                    ratio.into(),
                    sigma.into(),
                    (ratio - sigma).abs().into(),
                ]);
            }
            Ok(t)
        }
        Command::Pairs | Command::Single => {
            let mut t = Table::new(&["N", "count", "pi_N", "prediction", "abs_error", "rel_error"]);
            for &n in &config.n_values {
                let start = Instant::now();
                let r = if config.command == Command::Pairs {
                    counting::pair_count(&sieve, alpha, n)?
                } else {
                    counting::single_count(&sieve, alpha, n)?
                };
                timed(format!("N={n}"), start);
                t.push(vec![
                    n.into(),
                    r.count.into(),
                    r.prime_count.into(),
                    r.prediction.into(),
                    r.abs_error.into(),
                    r.rel_error.into(),
                ]);
            }
            Ok(t)
        }
        Command::Decompose => {
            let mut t = Table::new(&["N", "z", "sigma1", "sigma2", "total"]);
            for &n in &config.n_values {
                let z = config.z_rule.apply(n).max(2.0);
                let start = Instant::now();
                let r = counting::decompose(&sieve, alpha, n, z)?;
                timed(format!("N={n} z={z:.4}"), start);
                t.push(vec![
                    n.into(),
                    z.into(),
                    r.sigma1.into(),
                    r.sigma2.into(),
                    r.total.into(),
                ]);
            }
            Ok(t)
        }
        Command::Expsum => match config.h {
            Some(h) => expsum_points(config, &sieve, h),
            None => expsum_blocks(config, &sieve),
        },
        Command::Discrepancy => discrepancy(config),
        Command::Fit => {
            let start = Instant::now();
            let et = counting::error_table(&sieve, alpha, &config.n_values)?;
            timed(format!("{} points", config.n_values.len()), start);
            let mut t = Table::new(&["alpha", "points", "exponent", "intercept", "residual_rms"]);
            let (e, i, r) = match et.fit {
                Some(f) => (f.exponent.into(), f.intercept.into(), f.residual_rms.into()),
                None => (Cell::Missing, Cell::Missing, Cell::Missing),
            };
            t.push(vec![
                alpha.spec().into(),
                (et.reports.len() as u64).into(),
                e,
                i,
                r,
            ]);
            Ok(t)
        }
    }
}

fn expsum_points(config: &ExperimentConfig, sieve: &Sieve, h: u64) -> Result<Table, CliError> {
    let (d, t) = (config.d.unwrap_or(1), config.t.unwrap_or(1));
    let mut table = Table::new(&["N", "h", "d", "t", "re", "im", "modulus", "pi_N"]);
    for &n in &config.n_values {
        let q = ExpSumQuery::new(h, d, t, n)?;
        let pi = sieve.prime_count(n)?;
        if pi > config.budget {
            return Err(Error::Budget {
                needed: pi,
                budget: config.budget,
            }
            .into());
        }
        let start = Instant::now();
        let s = expsum_lab::exp_sum_primes::<f64>(sieve, &config.alpha, &q)?;
        eprintln!("expsum N={n}: {:.2?}", start.elapsed());
        table.push(vec![
            n.into(),
            h.into(),
            d.into(),
            t.into(),
            s.re.into(),
            s.im.into(),
            s.norm().into(),
            pi.into(),
        ]);
    }
    Ok(table)
}

fn expsum_blocks(config: &ExperimentConfig, sieve: &Sieve) -> Result<Table, CliError> {
    let (d, t) = (config.d.unwrap_or(1) as f64, config.t.unwrap_or(1) as f64);
    let grid = config
        .n_values
        .iter()
        .map(|&n| DyadicQuery::new(config.h_rule.apply(n).max(1.0), d, t, n))
        .collect::<Result<Vec<_>, _>>()?;
    let start = Instant::now();
    let reports =
        expsum_lab::ratio_scan::<f64>(sieve, &config.alpha, &grid, DEFAULT_EPS, config.budget)?;
    eprintln!("expsum {} blocks: {:.2?}", grid.len(), start.elapsed());
    let mut table = Table::new(&["N", "H", "D", "T", "lhs", "rhs", "ratio", "eps"]);
    for (q, r) in grid.iter().zip(&reports) {
        table.push(vec![
            q.n.into(),
            q.h.into(),
            q.d.into(),
            q.t.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.ratio.into(),
            r.eps_used.into(),
        ]);
    }
    Ok(table)
}

fn discrepancy(config: &ExperimentConfig) -> Result<Table, CliError> {
    let (d, t) = (config.d.unwrap_or(1), config.t.unwrap_or(1));
    let h = config.h.unwrap_or(1);
    let m = ExpSumQuery::new(h, d, t, 2)?.modulus()?;
    let (a, b) = match config.interval {
        Some(iv) => iv,
        None => {
            let q = crt_residue(d, t)?;
            (q as f64 / m as f64, (q + 1) as f64 / m as f64)
        }
    };
    let mut table = Table::new(&[
        "K",
        "H",
        "a",
        "b",
        "star_discrepancy",
        "count",
        "lhs",
        "rhs",
        "ratio",
    ]);
    for &k in &config.n_values {
        if k > config.budget {
            return Err(Error::Budget {
                needed: k,
                budget: config.budget,
            }
            .into());
        }
        let big_h = config.h_rule.apply(k).floor().max(1.0) as u64;
        let start = Instant::now();
        let pts = expsum_lab::beatty_points(&config.alpha, h, m, k)?;
        let star = expsum_lab::star_discrepancy(&pts)?;
        let r = expsum_lab::erdos_turan_bound(&pts, big_h, (a, b))?;
        let count = pts.iter().filter(|&&x| a <= x && x < b).count() as u64;
        eprintln!("discrepancy K={k} H={big_h}: {:.2?}", start.elapsed());
        table.push(vec![
            k.into(),
            big_h.into(),
            a.into(),
            b.into(),
            star.into(),
            count.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.ratio.into(),
        ]);
    }
    Ok(table)
}

/// Executes `config` and writes its table; returns the process exit code.
pub fn run(config: &ExperimentConfig) -> i32 {
    let table = match execute(config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code;
        }
    };
    match emit_table(&table, config.format, config.out.as_deref()) {
        Ok(()) => 0,
        Err(e) => {
            let target = config
                .out
                .as_ref()
                .map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
            eprintln!("error: cannot write {target}: {e}");
            4
        }
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn main_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match ExperimentConfig::from_args(args) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
