//! Naive reference implementations shared by the integration tests. Nothing
//! here touches the sieves or the exact-floor code of the library.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p))
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime(k)).collect()
}

/// Plain sieve of Eratosthenes, for larger prime ranges.
pub fn eratosthenes(n: usize) -> Vec<u64> {
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const BITS: usize = 256;

/// `α = (a + b√D)/c` held as a 256-bit fixed-point numerator over `c`.
#[derive(Clone)]
pub struct FixedAlpha {
    scaled: BigInt,
    c: u64,
}

impl FixedAlpha {
    pub fn quadratic(a: i64, b: i64, c: u64, d: u64) -> Self {
        let root = (BigInt::from(d) << (2 * BITS)).sqrt();
        let scaled = (BigInt::from(a) << BITS) + BigInt::from(b) * root;
        FixedAlpha { scaled, c }
    }

    pub fn sqrt2() -> Self {
        Self::quadratic(0, 1, 1, 2)
    }

    pub fn golden() -> Self {
        Self::quadratic(1, 1, 2, 5)
    }

    /// `floor(α·n)` via the fixed-point value; good while `{αn}` is not
    /// within `n·2^-250` of an integer.
    pub fn floor_times(&self, n: u64) -> u64 {
        let v = (&self.scaled * BigInt::from(n)) / BigInt::from(self.c);
        (v >> BITS).to_u64().expect("fits")
    }
}

pub fn brute_pair_count(alpha: &FixedAlpha, n: u64) -> u64 {
    primes_upto(n)
        .into_iter()
        .filter(|&p| {
            let f = alpha.floor_times(p);
            is_squarefree(f) && is_squarefree(f + 1)
        })
        .count() as u64
}

pub fn brute_single_count(alpha: &FixedAlpha, n: u64) -> u64 {
    primes_upto(n)
        .into_iter()
        .filter(|&p| is_squarefree(alpha.floor_times(p)))
        .count() as u64
}

pub fn brute_congruence_count(alpha: &FixedAlpha, n: u64, d: u64, t: u64) -> u64 {
    primes_upto(n)
        .into_iter()
        .filter(|&p| {
            let f = alpha.floor_times(p);
            f.is_multiple_of(d * d) && (f + 1).is_multiple_of(t * t)
        })
        .count() as u64
}

pub fn brute_carlitz(n: u64) -> u64 {
    (1..=n)
        .filter(|&k| is_squarefree(k) && is_squarefree(k + 1))
        .count() as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `∏_{p <= P}(1 − 2/p²)` with a compensated log sum.
pub fn sigma_partial_product(p_max: usize) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for p in eratosthenes(p_max) {
        let x = -2.0 / (p as f64 * p as f64);
        let y = x.ln_1p() - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum.exp()
}
