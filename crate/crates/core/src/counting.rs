//! Exact counts over primes of squarefree values of `[αp]` and `[αp] + 1`,
//! the consecutive-squarefree count over all integers, the Möbius
//! decomposition of the pair count at a cutoff `z`, and error tables against
//! the predicted densities.
//!
//! All counting is exact integer arithmetic; the only floating step is the
//! comparison with `σ·π(N)` or `(6/π²)·π(N)`.

use std::collections::BTreeMap;

use num_integer::Integer;
use rayon::prelude::*;

use crate::alpha_exact::AlgebraicAlpha;
use crate::arith_sieves::{crt_residue, Sieve};
use crate::constants::{basel_density_enclosure, sigma_enclosure};
use crate::error::{Error, Result};

/// Primes used for the σ enclosure behind every prediction.
pub const SIGMA_PRIME_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PairCountReport {
    pub n: u64,
    pub alpha_spec: String,
    pub count: u64,
    pub prime_count: u64,
    pub prediction: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl PairCountReport {
    fn new(n: u64, alpha: &AlgebraicAlpha, count: u64, prime_count: u64, density: f64) -> Self {
        let prediction = density * prime_count as f64;
        let abs_error = (count as f64 - prediction).abs();
        PairCountReport {
            n,
            alpha_spec: alpha.spec().to_string(),
            count,
            prime_count,
            prediction,
            abs_error,
            rel_error: abs_error / prediction,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.prime_count as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub n: u64,
    pub z: f64,
    /// Signed sum over `dt <= z`.
    pub sigma1: i64,
    /// Signed sum over `dt > z`.
    pub sigma2: i64,
    /// The pair count, computed independently by the squarefree sieve.
    pub total: u64,
}

/// Midpoint of the σ enclosure used for predictions.
pub fn sigma_midpoint(sieve: &Sieve) -> Result<f64> {
    Ok(sigma_enclosure::<f64>(sieve, SIGMA_PRIME_LIMIT)?.midpoint())
}

/// Number of `n <= N` with `n` and `n + 1` both squarefree.
pub fn carlitz_count(sieve: &Sieve, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("N must be >= 1".into()));
    }
    // windows of n-values, each sieved one element past its end
    let cap = sieve.segment_cap() as u64;
    let step = cap.saturating_sub(1).max(1);
    let starts: Vec<u64> = (1..=n).step_by(step as usize).collect();
    starts
        .into_par_iter()
        .map(|lo| {
            let hi = (lo + step).min(n + 1);
            let sf = sieve.squarefree_window(lo, hi + 1)?;
            Ok(sf.windows(2).filter(|w| w[0] && w[1]).count() as u64)
        })
        .sum()
}

/// Exact floors `[αp]` for the primes of one segment, with squarefree flags
/// covering every value from `[α·p_first]` through `[α·p_last] + 1`.
struct PrimeBlock {
    floors: Vec<u64>,
    base: u64,
    squarefree: Vec<bool>,
}

impl PrimeBlock {
    fn sf(&self, v: u64) -> bool {
        self.squarefree[(v - self.base) as usize]
    }
}

/// Prime segment length such that the matching value window fits the cap.
fn prime_step(sieve: &Sieve, alpha: &AlgebraicAlpha) -> u64 {
    let cap = sieve.segment_cap() as f64;
    (((cap - 4.0) / (alpha.to_f64().ceil() + 1.0)).floor() as u64).max(1)
}

fn prime_blocks<R: Send>(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
    f: impl Fn(&PrimeBlock) -> R + Sync,
) -> Result<Vec<R>> {
    let step = prime_step(sieve, alpha);
    let starts: Vec<u64> = (2..=n).step_by(step as usize).collect();
    starts
        .into_par_iter()
        .map(|lo| {
            let hi = (lo + step).min(n + 1);
            let primes = sieve.primes_in(lo, hi)?;
            let floors = primes
                .iter()
                .map(|&p| alpha.floor_alpha_times(p))
                .collect::<Result<Vec<u64>>>()?;
            let (base, squarefree) = match (floors.first(), floors.last()) {
                (Some(&a), Some(&b)) => (a, sieve.squarefree_window(a, b + 2)?),
                _ => (0, Vec::new()),
            };
            Ok(f(&PrimeBlock {
                floors,
                base,
                squarefree,
            }))
        })
        .collect()
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!("N={n} must be >= 2")));
    }
    Ok(())
}

fn raw_pair_count(sieve: &Sieve, alpha: &AlgebraicAlpha, n: u64) -> Result<u64> {
    Ok(prime_blocks(sieve, alpha, n, |b| {
        b.floors.iter().filter(|&&v| b.sf(v) && b.sf(v + 1)).count() as u64
    })?
    .into_iter()
    .sum())
}

/// `Σ_{p<=N} μ²([αp]) μ²([αp]+1)` with the `σ·π(N)` prediction.
pub fn pair_count(sieve: &Sieve, alpha: &AlgebraicAlpha, n: u64) -> Result<PairCountReport> {
    check_n(n)?;
    let count = raw_pair_count(sieve, alpha, n)?;
    let pi = sieve.prime_count(n)?;
    Ok(PairCountReport::new(
        n,
        alpha,
        count,
        pi,
        sigma_midpoint(sieve)?,
    ))
}

/// `Σ_{p<=N} μ²([αp])` with the `(6/π²)·π(N)` prediction.
pub fn single_count(sieve: &Sieve, alpha: &AlgebraicAlpha, n: u64) -> Result<PairCountReport> {
    check_n(n)?;
    let count: u64 = prime_blocks(sieve, alpha, n, |b| {
        b.floors.iter().filter(|&&v| b.sf(v)).count() as u64
    })?
    .into_iter()
    .sum();
    let pi = sieve.prime_count(n)?;
    let density = basel_density_enclosure::<f64>().midpoint();
    Ok(PairCountReport::new(n, alpha, count, pi, density))
}

fn check_coprime(d: u64, t: u64) -> Result<()> {
    if d == 0 || t == 0 {
        return Err(Error::Precondition(format!("d={d}, t={t} must be >= 1")));
    }
    if d.gcd(&t) != 1 {
        return Err(Error::NotCoprime { d, t });
    }
    Ok(())
}

fn count_primes_where(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
    pred: impl Fn(u64, u64) -> Result<bool> + Sync,
) -> Result<u64> {
    if n < 2 {
        return Ok(0);
    }
    let primes = sieve.primes_in(2, n + 1)?;
    primes
        .par_iter()
        .map(|&p| Ok(pred(p, alpha.floor_alpha_times(p)?)? as u64))
        .sum()
}

/// `#{p <= N : d² | [αp], t² | [αp] + 1}`.
pub fn congruence_pair_count(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
    d: u64,
    t: u64,
) -> Result<u64> {
    check_coprime(d, t)?;
    let (d2, t2) = (d * d, t * t);
    count_primes_where(sieve, alpha, n, |_, v| Ok(v % d2 == 0 && (v + 1) % t2 == 0))
}

/// `#{p <= N : [αp] ≡ residue (mod modulus)}`.
pub fn residue_class_count(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
    modulus: u64,
    residue: u64,
) -> Result<u64> {
    if modulus == 0 || residue >= modulus {
        return Err(Error::Precondition(format!(
            "need 0 <= residue < modulus, got {residue} mod {modulus}"
        )));
    }
    count_primes_where(sieve, alpha, n, |_, v| Ok(v % modulus == residue))
}

/// The single-congruence form of [`congruence_pair_count`]: primes whose
/// `{αp/(d²t²)}` lies in the window `(q/(d²t²), (q+1)/(d²t²))`, with `q` the
/// CRT residue of `(d, t)`.
pub fn window_pair_count(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
    d: u64,
    t: u64,
) -> Result<u64> {
    let q = crt_residue(d, t)?;
    let m = d * d * t * t;
    count_primes_where(sieve, alpha, n, |p, _| alpha.frac_in_window(p, m, q))
}

/// Squarefree `d` built from subsets of `primes`, paired with `μ(d)`.
fn squarefree_divisors(primes: &[u32]) -> Vec<(u64, i64)> {
    let mut out = vec![(1u64, 1i64)];
    for &p in primes {
        let extra: Vec<(u64, i64)> = out.iter().map(|&(d, s)| (d * p as u64, -s)).collect();
        out.extend(extra);
    }
    out
}

/// Nonzero inner counts `#{p <= N : d² | [αp], t² | [αp]+1}` for squarefree
/// `d, t`, keyed by `(d, t)`. Terms with `d² > [αN] + 1` vanish, so the map is
/// finite; every key is automatically coprime.
pub fn inner_counts(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
) -> Result<BTreeMap<(u64, u64), u64>> {
    check_n(n)?;
    let parts = prime_blocks(sieve, alpha, n, |b| -> Result<BTreeMap<(u64, u64), u64>> {
        let mut map = BTreeMap::new();
        let Some(&last) = b.floors.last() else {
            return Ok(map);
        };
        let sq = sieve.square_prime_divisors(b.base, last + 2)?;
        for &v in &b.floors {
            // μ²(0) = 0 by convention, but every d² divides 0; leave it out
            if v == 0 {
                continue;
            }
            let ds = squarefree_divisors(&sq[(v - b.base) as usize]);
            let ts = squarefree_divisors(&sq[(v + 1 - b.base) as usize]);
            for &(d, _) in &ds {
                for &(t, _) in &ts {
                    *map.entry((d, t)).or_insert(0) += 1;
                }
            }
        }
        Ok(map)
    })?;
    let mut total = BTreeMap::new();
    for part in parts {
        for (k, v) in part? {
            *total.entry(k).or_insert(0) += v;
        }
    }
    Ok(total)
}

fn mobius_of_squarefree(mut n: u64) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Largest admissible cutoff `(αN)^{2/3}`.
pub fn z_max(alpha: &AlgebraicAlpha, n: u64) -> f64 {
    (alpha.to_f64() * n as f64).powf(2.0 / 3.0)
}

/// Splits `Σ μ(d)μ(t)·#{p <= N : d² | [αp], t² | [αp]+1}` at `dt <= z`.
pub fn decompose(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    n: u64,
    z: f64,
) -> Result<DecompositionReport> {
    check_n(n)?;
    let max = z_max(alpha, n);
    if !(2.0..=max * (1.0 + 1e-12)).contains(&z) {
        return Err(Error::ZOutOfRange { z, max });
    }
    let cut = z.floor() as u64;
    let mut sigma1 = 0i64;
    let mut sigma2 = 0i64;
    for ((d, t), count) in inner_counts(sieve, alpha, n)? {
        let term = mobius_of_squarefree(d) * mobius_of_squarefree(t) * count as i64;
        if d * t <= cut {
            sigma1 += term;
        } else {
            sigma2 += term;
        }
    }
    let total = raw_pair_count(sieve, alpha, n)?;
    Ok(DecompositionReport {
        n,
        z,
        sigma1,
        sigma2,
        total,
    })
}

/// Least-squares fit of `ln(abs_error + 1)` against `ln N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub reports: Vec<PairCountReport>,
    /// `None` when every error is zero and the fit is degenerate.
    pub fit: Option<ExponentFit>,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Option<ExponentFit> {
    let k = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum();
    Some(ExponentFit {
        exponent,
        intercept,
        residual_rms: (rss / k).sqrt(),
    })
}

/// Pair-count reports at each `N` plus the empirical error exponent.
pub fn error_table(sieve: &Sieve, alpha: &AlgebraicAlpha, ns: &[u64]) -> Result<ErrorTable> {
    if ns.len() < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 values of N, got {}",
            ns.len()
        )));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] < 100 {
        return Err(Error::Precondition(
            "N values must be strictly ascending and >= 100".into(),
        ));
    }
    let reports = ns
        .iter()
        .map(|&n| pair_count(sieve, alpha, n))
        .collect::<Result<Vec<_>>>()?;
    let fit = if reports.iter().all(|r| r.abs_error == 0.0) {
        None
    } else {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .map(|r| ((r.n as f64).ln(), (r.abs_error + 1.0).ln()))
            .collect();
        fit_exponent(&pts)
    };
    Ok(ErrorTable { reports, fit })
}
