//! Exponential sums over primes with phases `α·h·p/(d²t²)`, their dyadic
//! block aggregates and the power-law bound they are compared against, plus
//! star discrepancy and the Erdős–Turán bound as an empirical harness.
//!
//! The bounds carry unspecified absolute constants, so reports record the
//! ratio `lhs / rhs` rather than asserting an inequality.

use num_complex::Complex;
use rayon::prelude::*;

use crate::alpha_exact::AlgebraicAlpha;
use crate::arith_sieves::Sieve;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-term tolerance for phase evaluation.
pub const PHASE_EPS: f64 = 1e-12;
/// Default `ε` in the `(HDTN)^ε` factor.
pub const DEFAULT_EPS: f64 = 0.01;
/// Harness constant `C` in `lhs <= C·rhs` for the Erdős–Turán regression.
pub const ERDOS_TURAN_HARNESS_CONSTANT: f64 = 4.0;
/// Default cap on prime terms evaluated by one dyadic block.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpSumQuery {
    pub h: u64,
    pub d: u64,
    pub t: u64,
    pub n: u64,
}

impl ExpSumQuery {
    pub fn new(h: u64, d: u64, t: u64, n: u64) -> Result<Self> {
        if h == 0 || d == 0 || t == 0 || n < 2 {
            return Err(Error::Precondition(format!(
                "need h, d, t >= 1 and N >= 2 (h={h}, d={d}, t={t}, N={n})"
            )));
        }
        let q = ExpSumQuery { h, d, t, n };
        q.modulus()?;
        Ok(q)
    }

    /// `d²t²`.
    pub fn modulus(&self) -> Result<u64> {
        let dt = self.d.checked_mul(self.t).ok_or(Error::Overflow("d·t"))?;
        dt.checked_mul(dt).ok_or(Error::Overflow("d²t²"))
    }
}

/// Blocks `(H, 2H] × (D, 2D] × (T, 2T]` at prime range `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicQuery {
    pub h: f64,
    pub d: f64,
    pub t: f64,
    pub n: u64,
}

impl DyadicQuery {
    pub fn new(h: f64, d: f64, t: f64, n: u64) -> Result<Self> {
        if !(h >= 1.0 && d >= 1.0 && t >= 1.0) || n < 2 {
            return Err(Error::Precondition(format!(
                "need H, D, T >= 1 and N >= 2 (H={h}, D={d}, T={t}, N={n})"
            )));
        }
        Ok(DyadicQuery { h, d, t, n })
    }

    /// Integers in `(x, 2x]`.
    fn block(x: f64) -> std::ops::RangeInclusive<u64> {
        (x.floor() as u64 + 1)..=((2.0 * x).floor() as u64)
    }

    /// Every `(h, d, t)` of the three blocks, lexicographic.
    pub fn triples(&self) -> Vec<(u64, u64, u64)> {
        let mut out = Vec::new();
        for h in Self::block(self.h) {
            for d in Self::block(self.d) {
                for t in Self::block(self.t) {
                    out.push((h, d, t));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<F> {
    pub lhs: F,
    pub rhs_terms: Vec<F>,
    pub rhs: F,
    pub ratio: F,
    pub eps_used: F,
}

/// The power-law right-hand side for one dyadic block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockBound<F> {
    /// `H^{1/2}D²T²N^{1/2}`, `H^{3/5}DTN^{4/5}`, `HDTN^{3/4}`, `H^{3/4}D^{3/2}T^{3/2}N^{3/4}`.
    pub terms: [F; 4],
    /// `(HDTN)^ε`.
    pub factor: F,
    pub rhs: F,
    pub eps: F,
}

impl<F: Real> BlockBound<F> {
    pub fn report(&self, lhs: F) -> BoundReport<F> {
        BoundReport {
            lhs,
            rhs_terms: self.terms.to_vec(),
            rhs: self.rhs,
            ratio: lhs / self.rhs,
            eps_used: self.eps,
        }
    }
}

fn unit<F: Real>(phase: F) -> Complex<F> {
    let angle = F::TAU() * phase;
    Complex::new(angle.cos(), angle.sin())
}

fn pairwise_sum<F: Real>(terms: &[Complex<F>]) -> Complex<F> {
    if terms.len() <= 16 {
        return terms
            .iter()
            .fold(Complex::new(F::zero(), F::zero()), |a, &b| a + b);
    }
    let (l, r) = terms.split_at(terms.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn exp_sum_over<F: Real>(
    alpha: &AlgebraicAlpha,
    primes: &[u64],
    h: u64,
    m: u64,
) -> Result<Complex<F>> {
    let terms = primes
        .iter()
        .map(|&p| Ok(unit(F::of(alpha.frac_part_approx(h, p, m, PHASE_EPS)?))))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

/// `Σ_{p<=N} e(α·h·p/(d²t²))`, summed pairwise in ascending `p`.
pub fn exp_sum_primes<F: Real>(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    q: &ExpSumQuery,
) -> Result<Complex<F>> {
    let q = ExpSumQuery::new(q.h, q.d, q.t, q.n)?;
    let primes = sieve.primes_in(2, q.n + 1)?;
    exp_sum_over(alpha, &primes, q.h, q.modulus()?)
}

fn block_sum<F: Real>(
    alpha: &AlgebraicAlpha,
    primes: &[u64],
    q: &DyadicQuery,
    budget: u64,
) -> Result<F> {
    let triples = q.triples();
    let needed = triples.len() as u64 * primes.len() as u64;
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let moduli = triples
        .par_iter()
        .map(|&(h, d, t)| {
            let m = ExpSumQuery::new(h, d, t, q.n)?.modulus()?;
            Ok(exp_sum_over::<F>(alpha, primes, h, m)?.norm())
        })
        .collect::<Result<Vec<F>>>()?;
    Ok(moduli.into_iter().fold(F::zero(), |a, b| a + b))
}

/// `Σ_{H<h<=2H} Σ_{D<d<=2D} Σ_{T<t<=2T} |Σ_{p<=N} e(α·h·p/(d²t²))|`.
pub fn dyadic_block_sum<F: Real>(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    q: &DyadicQuery,
    budget: u64,
) -> Result<F> {
    let q = DyadicQuery::new(q.h, q.d, q.t, q.n)?;
    let primes = sieve.primes_in(2, q.n + 1)?;
    block_sum(alpha, &primes, &q, budget)
}

pub fn lemma2_rhs<F: Real>(q: &DyadicQuery, eps: f64) -> Result<BlockBound<F>> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Precondition(format!("eps={eps} outside (0, 0.5]")));
    }
    let q = DyadicQuery::new(q.h, q.d, q.t, q.n)?;
    let (h, d, t, n) = (F::of(q.h), F::of(q.d), F::of(q.t), F::of_u64(q.n));
    let pw = |x: F, e: f64| x.powf(F::of(e));
    let terms = [
        pw(h, 0.5) * d * d * t * t * pw(n, 0.5),
        pw(h, 0.6) * d * t * pw(n, 0.8),
        h * d * t * pw(n, 0.75),
        pw(h, 0.75) * pw(d, 1.5) * pw(t, 1.5) * pw(n, 0.75),
    ];
    let eps_f = F::of(eps);
    let factor = (h * d * t * n).powf(eps_f);
    let rhs = factor * terms.iter().fold(F::zero(), |a, &b| a + b);
    Ok(BlockBound {
        terms,
        factor,
        rhs,
        eps: eps_f,
    })
}

/// One [`BoundReport`] per dyadic query; primes are shared between queries
/// with the same `N`.
pub fn ratio_scan<F: Real>(
    sieve: &Sieve,
    alpha: &AlgebraicAlpha,
    grid: &[DyadicQuery],
    eps: f64,
    budget: u64,
) -> Result<Vec<BoundReport<F>>> {
    let mut primes: Option<(u64, Vec<u64>)> = None;
    let mut out = Vec::with_capacity(grid.len());
    for q in grid {
        let q = DyadicQuery::new(q.h, q.d, q.t, q.n)?;
        if primes.as_ref().map(|(n, _)| *n) != Some(q.n) {
            primes = Some((q.n, sieve.primes_in(2, q.n + 1)?));
        }
        let rhs = lemma2_rhs::<F>(&q, eps)?;
        let lhs = block_sum(
            alpha,
            &primes.as_ref().expect("primes cached").1,
            &q,
            budget,
        )?;
        out.push(rhs.report(lhs));
    }
    Ok(out)
}

pub fn max_ratio<F: Real>(reports: &[BoundReport<F>]) -> Option<F> {
    reports.iter().map(|r| r.ratio).reduce(F::max)
}

fn check_points<F: Real>(points: &[F]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Precondition("empty point set".into()));
    }
    if let Some(bad) = points.iter().find(|&&x| !(x >= F::zero() && x < F::one())) {
        return Err(Error::ValueOutOfRange(bad.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `D*_K = max_i max(i/K − x_(i), x_(i) − (i−1)/K)` over the sorted points.
pub fn star_discrepancy<F: Real>(points: &[F]) -> Result<F> {
    check_points(points)?;
    let mut xs = points.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("points are finite"));
    let k = F::of_u64(xs.len() as u64);
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = F::of_u64(i as u64 + 1) / k - x;
            let below = x - F::of_u64(i as u64) / k;
            above.max(below)
        })
        .fold(F::zero(), F::max))
}

/// `lhs = |#{k : x_k ∈ [a, b)} − K(b − a)|` against
/// `rhs = K/H + Σ_{h<=H} (1/h)|Σ_k e(h·x_k)|`.
///
/// Membership is half-open so that `[0, 1)` captures every point.
pub fn erdos_turan_bound<F: Real>(
    points: &[F],
    h_max: u64,
    interval: (F, F),
) -> Result<BoundReport<F>> {
    check_points(points)?;
    let (a, b) = interval;
    if !(F::zero() <= a && a < b && b <= F::one()) {
        return Err(Error::InvalidInterval {
            a: a.to_f64().unwrap_or(f64::NAN),
            b: b.to_f64().unwrap_or(f64::NAN),
        });
    }
    if h_max == 0 {
        return Err(Error::Precondition("H must be >= 1".into()));
    }
    let k = F::of_u64(points.len() as u64);
    let inside = points.iter().filter(|&&x| a <= x && x < b).count();
    let lhs = (F::of_u64(inside as u64) - k * (b - a)).abs();
    let weighted = (1..=h_max)
        .map(|h| {
            let hf = F::of_u64(h);
            let terms: Vec<Complex<F>> = points.iter().map(|&x| unit((hf * x).fract())).collect();
            pairwise_sum(&terms).norm() / hf
        })
        .fold(F::zero(), |acc, v| acc + v);
    let head = k / F::of_u64(h_max);
    let rhs = head + weighted;
    Ok(BoundReport {
        lhs,
        rhs_terms: vec![head, weighted],
        rhs,
        ratio: lhs / rhs,
        eps_used: F::zero(),
    })
}

/// `{α·h·k/m}` for `k = 1..=count`.
pub fn beatty_points(alpha: &AlgebraicAlpha, h: u64, m: u64, count: u64) -> Result<Vec<f64>> {
    (1..=count)
        .map(|k| alpha.frac_part_approx(h, k, m, PHASE_EPS))
        .collect()
}
