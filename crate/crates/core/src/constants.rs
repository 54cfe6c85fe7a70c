//! Certified enclosures of the constants that appear in the asymptotics:
//! the pair density `σ = ∏_p (1 − 2/p²)`, the squarefree density `6/π²`,
//! and the divisor-weighted tails that control truncation of the Möbius sums.
//!
//! Every accumulation runs in a fixed ascending order, so results are
//! bit-reproducible.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::arith_sieves::{Channels, Sieve};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed interval `[lo, hi]` guaranteed to contain an exact real value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Real> Enclosure<F> {
    pub fn new(lo: F, hi: F) -> Self {
        assert!(lo <= hi, "enclosure bounds out of order: {lo} > {hi}");
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> F {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> F {
        self.lo + (self.hi - self.lo) / F::of(2.0)
    }

    pub fn contains(&self, x: F) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Product of two enclosures of positive values, rounded outward.
    pub fn mul_positive(&self, other: &Self) -> Self {
        assert!(self.lo >= F::zero() && other.lo >= F::zero());
        Enclosure::new(
            (self.lo * other.lo).widen_down(),
            (self.hi * other.hi).widen_up(),
        )
    }
}

/// `4ε`-relative outward widening of a libm result.
fn libm_bounds<F: Real>(x: F) -> (F, F) {
    let slack = x.abs() * F::epsilon() * F::of(4.0);
    ((x - slack).widen_down(), (x + slack).widen_up())
}

/// Enclosure of `σ = ∏_p (1 − 2/p²)` from the primes up to `p_max`.
///
/// The finite part is summed in log space with directed widening. For the
/// tail, with `x = 2/p²`, `−x/(1−x) <= log(1−x) <= −x`, and
/// `Σ_{p>P} 1/p² < 1/(P−1)`, so the tail log lies in
/// `[−2/((P−1)(1 − 2/(P+1)²)), 0]`.
pub fn sigma_enclosure<F: Real>(sieve: &Sieve, p_max: u64) -> Result<Enclosure<F>> {
    if p_max < 3 {
        return Err(Error::Precondition(format!("P={p_max} must be >= 3")));
    }
    let two = F::of(2.0);
    let mut log_lo = F::zero();
    let mut log_hi = F::zero();
    for p in sieve.primes_in(2, p_max + 1)? {
        let pf = F::of_u64(p);
        let x = two / (pf * pf);
        let (t_lo, t_hi) = libm_bounds((-x).ln_1p());
        log_lo = (log_lo + t_lo).widen_down();
        log_hi = (log_hi + t_hi).widen_up();
    }
    let pf = F::of_u64(p_max);
    let x_max = two / ((pf + F::one()) * (pf + F::one()));
    let tail = (two / ((pf - F::one()) * (F::one() - x_max))).widen_up();
    let log_lo = (log_lo - tail).widen_down();
    let lo = libm_bounds(log_lo.exp()).0;
    let hi = libm_bounds(log_hi.exp()).1;
    Ok(Enclosure::new(lo, hi))
}

/// Enclosure of `6/π²`, from the correctly rounded `π` constant widened by
/// one ulp on each side.
pub fn basel_density_enclosure<F: Real>() -> Enclosure<F> {
    let pi = F::PI();
    let (pi_lo, pi_hi) = (pi.widen_down(), pi.widen_up());
    let sq_lo = (pi_lo * pi_lo).widen_down();
    let sq_hi = (pi_hi * pi_hi).widen_up();
    let six = F::of(6.0);
    Enclosure::new((six / sq_hi).widen_down(), (six / sq_lo).widen_up())
}

/// Enclosure of `ζ(2) = Σ 1/n²` from `terms` leading terms and the
/// Euler–Maclaurin bracket `1/M − 1/(2M²) < Σ_{n>M} 1/n² < 1/M − 1/(2M²) + 1/(6M³)`.
pub fn zeta2_enclosure<F: Real>(terms: u64) -> Enclosure<F> {
    assert!(terms >= 1);
    let mut lo = F::zero();
    let mut hi = F::zero();
    for n in (1..=terms).rev() {
        let nf = F::of_u64(n);
        let t = F::one() / (nf * nf);
        lo = (lo + t.widen_down()).widen_down();
        hi = (hi + t.widen_up()).widen_up();
    }
    let m = F::of_u64(terms);
    let base = F::one() / m - F::one() / (F::of(2.0) * m * m);
    let extra = F::one() / (F::of(6.0) * m * m * m);
    Enclosure::new(
        (lo + base.widen_down()).widen_down(),
        (hi + (base + extra).widen_up()).widen_up(),
    )
}

/// `Σ μ(d)μ(t)/(d²t²)` over `1 <= d, t <= L` with `gcd(d, t) = 1`, summed
/// row-major in ascending order.
pub fn coprime_double_sum<F: Real>(sieve: &Sieve, limit: u64) -> Result<F> {
    if limit == 0 {
        return Err(Error::Precondition("L must be >= 1".into()));
    }
    let mu = sieve.mobius_table(limit)?;
    let mut sum = F::zero();
    for d in 1..=limit {
        let md = mu[d as usize];
        if md == 0 {
            continue;
        }
        let d2 = F::of_u64(d * d);
        for t in 1..=limit {
            let mt = mu[t as usize];
            if mt == 0 || d.gcd(&t) != 1 {
                continue;
            }
            let term = F::one() / (d2 * F::of_u64(t * t));
            if md * mt > 0 {
                sum = sum + term;
            } else {
                sum = sum - term;
            }
        }
    }
    Ok(sum)
}

/// `Σ_{z < n <= Z} τ(n)/n²`, ascending.
pub fn tail_tau_sum<F: Real>(sieve: &Sieve, z: u64, upper: u64) -> Result<F> {
    if z < 1 || z >= upper {
        return Err(Error::Precondition(format!(
            "need 1 <= z < Z, got z={z}, Z={upper}"
        )));
    }
    let mut sum = F::zero();
    for (a, b) in sieve.windows(z + 1, upper + 1) {
        let seg = sieve.segment(a, b, Channels::TAU)?;
        for (i, &tau) in seg.tau.as_ref().expect("tau channel").iter().enumerate() {
            let n = F::of_u64(a + i as u64);
            sum = sum + F::of_u64(tau as u64) / (n * n);
        }
    }
    Ok(sum)
}

/// Upper bound for `Σ_{n > Z} τ(n)/n²`: partial summation with
/// `Σ_{n<=x} τ(n) <= x(ln x + 1)` gives `2(ln Z + 2)/Z`.
pub fn tau_tail_bound<F: Real>(z: u64) -> F {
    assert!(z >= 1);
    let zf = F::of_u64(z);
    (F::of(2.0) * (zf.ln() + F::of(2.0)) / zf).widen_up()
}

/// Reference exponents: Carlitz's `2/3`, Reuss's `(26 + √433)/81`, and the
/// `9/10` of the main asymptotic.
pub fn reference_exponents<F: Real>() -> BTreeMap<&'static str, F> {
    BTreeMap::from([
        ("carlitz", F::of(2.0) / F::of(3.0)),
        ("reuss", (F::of(26.0) + F::of(433.0).sqrt()) / F::of(81.0)),
        ("main", F::of(9.0) / F::of(10.0)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// High-precision value of `∏_p (1 − 2/p²)`.
    const SIGMA_REF: f64 = 0.322_634_098_939_244_67;

    #[test]
    fn sigma_small_and_large() {
        let sieve = Sieve::default();
        let e3: Enclosure<f64> = sigma_enclosure(&sieve, 3).unwrap();
        assert!(e3.contains(SIGMA_REF));
        // the partial product over p = 2 alone
        assert_eq!(1.0 - 2.0 / 4.0, 0.5);
        let e6: Enclosure<f64> = sigma_enclosure(&sieve, 1_000_000).unwrap();
        assert!(e6.width() < 1e-5, "width {}", e6.width());
        assert!(e6.contains(SIGMA_REF));
        assert!(sigma_enclosure::<f64>(&sieve, 2).is_err());
    }

    #[test]
    fn sigma_nests() {
        let sieve = Sieve::default();
        let ps = [3u64, 10, 100, 1_000, 10_000, 100_000];
        let es: Vec<Enclosure<f64>> = ps
            .iter()
            .map(|&p| sigma_enclosure(&sieve, p).unwrap())
            .collect();
        for w in es.windows(2) {
            assert!(w[1].is_subset_of(&w[0]), "{:?} not inside {:?}", w[1], w[0]);
            assert!(w[1].width() < w[0].width());
        }
    }

    #[test]
    fn sigma_f32_contains_reference() {
        let e: Enclosure<f32> = sigma_enclosure(&Sieve::default(), 10_000).unwrap();
        assert!(e.contains(SIGMA_REF as f32));
    }

    #[test]
    fn basel_and_zeta() {
        let b = basel_density_enclosure::<f64>();
        assert!(b.width() < 1e-12);
        assert!(b.contains(0.607_927_101_854_026_6));
        let z = zeta2_enclosure::<f64>(10_000);
        assert!(z.contains(std::f64::consts::PI.powi(2) / 6.0));
        assert!(b.mul_positive(&z).contains(1.0));
        assert!(basel_density_enclosure::<f32>().contains(0.607_927_1));
    }

    #[test]
    fn coprime_sum_small_cases() {
        let sieve = Sieve::default();
        assert_eq!(coprime_double_sum::<f64>(&sieve, 1).unwrap(), 1.0);
        assert_eq!(coprime_double_sum::<f64>(&sieve, 2).unwrap(), 0.5);
    }

    #[test]
    fn coprime_sum_bridges_to_sigma() {
        let sieve = Sieve::default();
        for l in [100u64, 500, 2000] {
            let s: f64 = coprime_double_sum(&sieve, l).unwrap();
            let bound =
                tail_tau_sum::<f64>(&sieve, l, 100 * l).unwrap() + tau_tail_bound::<f64>(100 * l);
            assert!(
                (s - SIGMA_REF).abs() <= bound,
                "L={l}: {s} vs bound {bound}"
            );
        }
        let s: f64 = coprime_double_sum(&sieve, 2000).unwrap();
        let mid = sigma_enclosure::<f64>(&sieve, 1_000_000)
            .unwrap()
            .midpoint();
        assert!((s - mid).abs() < 1e-3);
    }

    #[test]
    fn tau_tails() {
        let sieve = Sieve::default();
        assert_eq!(tail_tau_sum::<f64>(&sieve, 1, 2).unwrap(), 0.5);
        let t10: f64 = tail_tau_sum(&sieve, 10, 1_000_000).unwrap();
        let t20: f64 = tail_tau_sum(&sieve, 20, 1_000_000).unwrap();
        let factor = t10 / t20;
        assert!(factor > 1.5 && factor < 2.6, "factor {factor}");
        assert!(tail_tau_sum::<f64>(&sieve, 1_000, 1_000_000).unwrap() < 0.02);
        assert!(tail_tau_sum::<f64>(&sieve, 5, 5).is_err());
        // analytic bound dominates a long empirical tail
        assert!(
            tail_tau_sum::<f64>(&sieve, 1_000, 1_000_000).unwrap() < tau_tail_bound::<f64>(1_000)
        );
    }

    #[test]
    fn exponents() {
        let e = reference_exponents::<f64>();
        assert_eq!(e["carlitz"], 2.0 / 3.0);
        assert_eq!(e["main"], 0.9);
        assert!((e["reuss"] - 0.577_884_593_168_948).abs() < 1e-9);
    }
}
