//! Segmented sieves over arbitrary windows `[lo, hi)`: primes, Möbius values,
//! squarefree flags and divisor counts, plus the CRT residue used to merge the
//! two squarefree congruences into one.
//!
//! Value `0` follows a fixed convention: `μ(0) = 0`, `τ(0) = 0`, not prime and
//! not squarefree.

use std::sync::{Arc, RwLock};

use bitflags::bitflags;
use num_integer::{Integer, Roots};
use rayon::prelude::*;

use crate::error::{Error, Result};

bitflags! {
    /// Data channels computed by [`Sieve::segment`].
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct Channels: u8 {
        const MU = 1;
        const PRIME = 1 << 1;
        const TAU = 1 << 2;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Largest window length a single segment may span.
    pub segment_cap: usize,
    /// Exclusive upper bound on any sieved value.
    pub max_value: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_cap: 1 << 22,
            max_value: 1 << 42,
        }
    }
}

#[derive(Debug)]
struct BasePrimes {
    limit: u64,
    primes: Vec<u32>,
}

/// Sieve engine. Holds the base primes up to `√hi`, grown on demand and
/// shared by every segment; safe to use from many threads at once.
#[derive(Debug)]
pub struct Sieve {
    config: SieveConfig,
    base: RwLock<Arc<BasePrimes>>,
}

impl Default for Sieve {
    fn default() -> Self {
        Sieve::new(SieveConfig::default())
    }
}

/// One sieved window. Channels that were not requested are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    pub mu: Option<Vec<i8>>,
    pub is_prime: Option<Vec<bool>>,
    pub tau: Option<Vec<u32>>,
}

impl SieveSegment {
    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    fn index(&self, n: u64) -> usize {
        assert!(
            (self.lo..self.hi).contains(&n),
            "{n} outside [{}, {})",
            self.lo,
            self.hi
        );
        (n - self.lo) as usize
    }

    pub fn mu_of(&self, n: u64) -> i8 {
        self.mu.as_ref().expect("mu channel not computed")[self.index(n)]
    }

    pub fn prime(&self, n: u64) -> bool {
        self.is_prime.as_ref().expect("prime channel not computed")[self.index(n)]
    }

    pub fn tau_of(&self, n: u64) -> u32 {
        self.tau.as_ref().expect("tau channel not computed")[self.index(n)]
    }
}

fn simple_primes(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// First multiple of `step` that is `>= lo`.
fn first_multiple(lo: u64, step: u64) -> u64 {
    lo.div_ceil(step) * step
}

impl Sieve {
    pub fn new(config: SieveConfig) -> Self {
        assert!(config.segment_cap > 0, "segment cap must be positive");
        Sieve {
            config,
            base: RwLock::new(Arc::new(BasePrimes {
                limit: 1,
                primes: Vec::new(),
            })),
        }
    }

    pub fn config(&self) -> SieveConfig {
        self.config
    }

    pub fn segment_cap(&self) -> usize {
        self.config.segment_cap
    }

    /// Base primes `p <= sqrt(hi - 1)`.
    fn base_primes(&self, hi: u64) -> Arc<BasePrimes> {
        let need = hi.saturating_sub(1).sqrt();
        {
            let cached = self.base.read().expect("base prime lock poisoned");
            if cached.limit >= need {
                return Arc::clone(&cached);
            }
        }
        let mut cached = self.base.write().expect("base prime lock poisoned");
        if cached.limit < need {
            let limit = need.max(cached.limit.saturating_mul(2)).max(1 << 12);
            let max_limit = self.config.max_value.sqrt() + 1;
            let limit = limit.min(max_limit).max(need);
            *cached = Arc::new(BasePrimes {
                limit,
                primes: simple_primes(limit),
            });
        }
        Arc::clone(&cached)
    }

    fn check_window(&self, lo: u64, hi: u64) -> Result<()> {
        if lo >= hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        if hi > self.config.max_value {
            return Err(Error::RangeCap {
                value: hi,
                max: self.config.max_value,
            });
        }
        if hi - lo > self.config.segment_cap as u64 {
            return Err(Error::WindowTooLarge {
                len: hi - lo,
                cap: self.config.segment_cap,
            });
        }
        Ok(())
    }

    fn check_total(&self, hi: u64) -> Result<()> {
        if hi > self.config.max_value {
            return Err(Error::RangeCap {
                value: hi,
                max: self.config.max_value,
            });
        }
        Ok(())
    }

    /// Splits `[lo, hi)` into consecutive windows no longer than the cap.
    pub fn windows(&self, lo: u64, hi: u64) -> Vec<(u64, u64)> {
        let cap = self.config.segment_cap as u64;
        let mut out = Vec::new();
        let mut start = lo;
        while start < hi {
            let end = hi.min(start + cap);
            out.push((start, end));
            start = end;
        }
        out
    }

    pub fn segment(&self, lo: u64, hi: u64, channels: Channels) -> Result<SieveSegment> {
        if channels.is_empty() {
            return Err(Error::NoChannels);
        }
        self.check_window(lo, hi)?;
        let base = self.base_primes(hi);
        let primes = &base.primes[..base
            .primes
            .partition_point(|&p| (p as u64) * (p as u64) < hi)];

        let mu = channels
            .contains(Channels::MU)
            .then(|| mu_window(lo, hi, primes));
        let is_prime = channels
            .contains(Channels::PRIME)
            .then(|| prime_window(lo, hi, primes));
        let tau = channels
            .contains(Channels::TAU)
            .then(|| tau_window(lo, hi, primes));
        Ok(SieveSegment {
            lo,
            hi,
            mu,
            is_prime,
            tau,
        })
    }

    /// Squarefree flags for `[lo, hi)`: marks multiples of `p²` only, which is
    /// much cheaper than the full Möbius channel.
    pub fn squarefree_window(&self, lo: u64, hi: u64) -> Result<Vec<bool>> {
        self.check_window(lo, hi)?;
        let base = self.base_primes(hi);
        let mut flags = vec![true; (hi - lo) as usize];
        if lo == 0 {
            flags[0] = false;
        }
        for &p in &base.primes {
            let sq = p as u64 * p as u64;
            if sq >= hi {
                break;
            }
            let mut m = first_multiple(lo, sq).max(sq);
            while m < hi {
                flags[(m - lo) as usize] = false;
                m += sq;
            }
        }
        Ok(flags)
    }

    /// For each `n` in `[lo, hi)`, the primes `q` with `q² | n`, ascending.
    /// `n = 0` gets an empty list.
    pub fn square_prime_divisors(&self, lo: u64, hi: u64) -> Result<Vec<Vec<u32>>> {
        self.check_window(lo, hi)?;
        let base = self.base_primes(hi);
        let mut out = vec![Vec::new(); (hi - lo) as usize];
        for &p in &base.primes {
            let sq = p as u64 * p as u64;
            if sq >= hi {
                break;
            }
            let mut m = first_multiple(lo, sq).max(sq);
            while m < hi {
                out[(m - lo) as usize].push(p);
                m += sq;
            }
        }
        Ok(out)
    }

    /// Ascending primes in `[lo, hi)`; splits internally at the segment cap.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        if lo >= hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        self.check_total(hi)?;
        let chunks: Result<Vec<Vec<u64>>> = self
            .windows(lo, hi)
            .into_par_iter()
            .map(|(a, b)| {
                let seg = self.segment(a, b, Channels::PRIME)?;
                let flags = seg.is_prime.expect("prime channel");
                Ok(flags
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| f)
                    .map(|(i, _)| a + i as u64)
                    .collect())
            })
            .collect();
        Ok(chunks?.concat())
    }

    /// `π(n)`, the number of primes `<= n`.
    pub fn prime_count(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Ok(0);
        }
        self.check_total(n + 1)?;
        self.windows(0, n + 1)
            .into_par_iter()
            .map(|(a, b)| {
                let seg = self.segment(a, b, Channels::PRIME)?;
                Ok(seg
                    .is_prime
                    .expect("prime channel")
                    .iter()
                    .filter(|&&f| f)
                    .count() as u64)
            })
            .sum()
    }

    /// Möbius values for `1..=n`, index 0 holding the `μ(0) = 0` convention.
    pub fn mobius_table(&self, n: u64) -> Result<Vec<i8>> {
        self.check_total(n + 1)?;
        let mut out = Vec::with_capacity(n as usize + 1);
        for (a, b) in self.windows(0, n + 1) {
            out.extend(self.segment(a, b, Channels::MU)?.mu.expect("mu channel"));
        }
        Ok(out)
    }
}

fn mu_window(lo: u64, hi: u64, primes: &[u32]) -> Vec<i8> {
    let len = (hi - lo) as usize;
    let mut mu = vec![1i8; len];
    let mut radical = vec![1u64; len];
    for &p in primes {
        let p = p as u64;
        let mut m = first_multiple(lo, p).max(p);
        while m < hi {
            let i = (m - lo) as usize;
            mu[i] = -mu[i];
            radical[i] *= p;
            m += p;
        }
        let sq = p * p;
        let mut m = first_multiple(lo, sq);
        while m < hi {
            mu[(m - lo) as usize] = 0;
            m += sq;
        }
    }
    for (i, (m, r)) in mu.iter_mut().zip(&radical).enumerate() {
        let n = lo + i as u64;
        if n == 0 {
            *m = 0;
        } else if *m != 0 && *r != n {
            // exactly one prime factor above sqrt(hi) remains
            *m = -*m;
        }
    }
    mu
}

fn prime_window(lo: u64, hi: u64, primes: &[u32]) -> Vec<bool> {
    let mut flags: Vec<bool> = (lo..hi).map(|n| n >= 2).collect();
    for &p in primes {
        let p = p as u64;
        let mut m = first_multiple(lo, p).max(p * p);
        while m < hi {
            flags[(m - lo) as usize] = false;
            m += p;
        }
    }
    flags
}

fn tau_window(lo: u64, hi: u64, primes: &[u32]) -> Vec<u32> {
    let mut rest: Vec<u64> = (lo..hi).collect();
    let mut tau = vec![1u32; rest.len()];
    for &p in primes {
        let p = p as u64;
        let mut m = first_multiple(lo, p).max(p);
        while m < hi {
            let i = (m - lo) as usize;
            let mut e = 0;
            while rest[i].is_multiple_of(p) {
                rest[i] /= p;
                e += 1;
            }
            tau[i] *= e + 1;
            m += p;
        }
    }
    for (i, t) in tau.iter_mut().enumerate() {
        if lo + i as u64 == 0 {
            *t = 0;
        } else if rest[i] > 1 {
            *t *= 2;
        }
    }
    tau
}

/// The unique `q` in `[0, d²t²)` with `q ≡ 0 (mod d²)` and `q ≡ -1 (mod t²)`.
/// `d = t = 1` yields `0` (modulus 1).
pub fn crt_residue(d: u64, t: u64) -> Result<u64> {
    if d == 0 || t == 0 {
        return Err(Error::Precondition(format!("d={d}, t={t} must be >= 1")));
    }
    if d.gcd(&t) != 1 {
        return Err(Error::NotCoprime { d, t });
    }
    let d2 = d as i128 * d as i128;
    let t2 = t as i128 * t as i128;
    let modulus = d2.checked_mul(t2).ok_or(Error::Overflow("crt_residue"))?;
    // q = d² · k with d² k ≡ -1 (mod t²)
    let inv = d2.extended_gcd(&t2).x.mod_floor(&t2);
    let k = (-inv).mod_floor(&t2);
    let q = (d2 * k).mod_floor(&modulus);
    Ok(q as u64)
}
