//! Exact arithmetic with a positive irrational algebraic `α`.
//!
//! Every counting decision goes through [`AlgebraicAlpha::floor_scaled`] or
//! [`AlgebraicAlpha::cmp_scaled`], both of which are exact: quadratic
//! irrationals use integer square roots, general algebraic numbers refine an
//! isolating bracket until the answer is determined. Because `α·k` is never
//! an integer for `k >= 1`, refinement always terminates.

mod poly;
mod quadratic;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub use poly::{PolyRoot, MAX_BITS, START_BITS};
pub use quadratic::Quadratic;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaKind {
    Quadratic,
    PolyRoot,
}

#[derive(Debug, Clone)]
enum Repr {
    Quadratic(Quadratic),
    PolyRoot(Arc<PolyRoot>),
}

/// A positive irrational algebraic number. Cheap to clone; clones share the
/// refinement cache of a polynomial root.
#[derive(Debug, Clone)]
pub struct AlgebraicAlpha {
    repr: Repr,
    spec: String,
}

impl fmt::Display for AlgebraicAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

impl std::str::FromStr for AlgebraicAlpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_alpha(s)
    }
}

fn parse_int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("expected num/den, got {s:?}")))?;
    let n: BigInt = parse_int(n, "numerator")?;
    let d: BigInt = parse_int(d, "denominator")?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Parses `sqrt:<D>`, `quad:<a>,<b>,<c>,<D>` or
/// `poly:<c0>,...,<ck>@<lo_num>/<lo_den>,<hi_num>/<hi_den>`.
pub fn parse_alpha(spec: &str) -> Result<AlgebraicAlpha> {
    let spec = spec.trim();
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("missing kind prefix in {spec:?}")))?;
    match kind {
        "sqrt" => AlgebraicAlpha::quadratic(0, 1, 1, parse_int(body, "radicand")?),
        "quad" => {
            let parts: Vec<i64> = body
                .split(',')
                .map(|p| parse_int(p, "coefficient"))
                .collect::<Result<_>>()?;
            match parts[..] {
                [a, b, c, d] => AlgebraicAlpha::quadratic(a, b, c, d),
                _ => Err(Error::Parse(format!("quad needs 4 integers, got {body:?}"))),
            }
        }
        "poly" => {
            let (coeffs, interval) = body
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("poly needs '@interval' in {body:?}")))?;
            let coeffs: Vec<BigInt> = coeffs
                .split(',')
                .map(|p| parse_int(p, "coefficient"))
                .collect::<Result<_>>()?;
            let (lo, hi) = interval
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("interval needs lo,hi in {interval:?}")))?;
            let mut alpha =
                AlgebraicAlpha::poly_root(coeffs, parse_rational(lo)?, parse_rational(hi)?)?;
            alpha.spec = spec.to_string();
            Ok(alpha)
        }
        other => Err(Error::Parse(format!("unknown alpha kind {other:?}"))),
    }
}

impl AlgebraicAlpha {
    /// `(a + b√D)/c`.
    pub fn quadratic(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let q = Quadratic::new(a, b, c, d)?;
        let spec = if (a, b, c) == (0, 1, 1) {
            format!("sqrt:{d}")
        } else {
            format!("quad:{a},{b},{c},{d}")
        };
        Ok(AlgebraicAlpha {
            repr: Repr::Quadratic(q),
            spec,
        })
    }

    pub fn sqrt(d: i64) -> Result<Self> {
        Self::quadratic(0, 1, 1, d)
    }

    /// `(1 + √5)/2`.
    pub fn golden_ratio() -> Self {
        Self::quadratic(1, 1, 2, 5).expect("golden ratio is a valid quadratic")
    }

    /// The unique root of `Σ coeffs[i]·xⁱ` in `(lo, hi)`.
    pub fn poly_root(coeffs: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Result<Self> {
        let spec = format!(
            "poly:{}@{}/{},{}/{}",
            coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
            lo.numer(),
            lo.denom(),
            hi.numer(),
            hi.denom()
        );
        let root = PolyRoot::new(coeffs, lo, hi)?;
        Ok(AlgebraicAlpha {
            repr: Repr::PolyRoot(Arc::new(root)),
            spec,
        })
    }

    pub fn kind(&self) -> AlphaKind {
        match self.repr {
            Repr::Quadratic(_) => AlphaKind::Quadratic,
            Repr::PolyRoot(_) => AlphaKind::PolyRoot,
        }
    }

    pub fn as_quadratic(&self) -> Option<Quadratic> {
        match &self.repr {
            Repr::Quadratic(q) => Some(*q),
            Repr::PolyRoot(_) => None,
        }
    }

    /// Canonical spec text, re-parseable by [`parse_alpha`].
    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// Current bracket precision; quadratic values are exact and report `u64::MAX`.
    pub fn precision_bits(&self) -> u64 {
        match &self.repr {
            Repr::Quadratic(_) => u64::MAX,
            Repr::PolyRoot(r) => r.precision_bits(),
        }
    }

    /// Floating approximation, for reporting and range checks only.
    pub fn to_f64(&self) -> f64 {
        match &self.repr {
            Repr::Quadratic(q) => q.to_f64(),
            Repr::PolyRoot(r) => r.to_f64(),
        }
    }

    /// `[α·n]`.
    pub fn floor_alpha_times(&self, n: u64) -> Result<u64> {
        self.floor_scaled(1, n, 1)
    }

    /// `[α·h·n / m]`, exact.
    pub fn floor_scaled(&self, h: u64, n: u64, m: u64) -> Result<u64> {
        if h == 0 || m == 0 {
            return Err(Error::Precondition(format!("h={h}, m={m} must be >= 1")));
        }
        let k = h as u128 * n as u128;
        match &self.repr {
            Repr::Quadratic(q) => q.floor_scaled(k, m),
            Repr::PolyRoot(r) => {
                if k == 0 {
                    return Ok(0);
                }
                let scale = BigRational::new(BigInt::from(k), BigInt::from(m));
                let f = r.with_refinement(|lo, hi| {
                    let fl = (lo * &scale).floor();
                    let fh = (hi * &scale).floor();
                    (fl == fh).then(|| fl.to_integer())
                })?;
                f.to_u64().ok_or(Error::Overflow("floor_scaled"))
            }
        }
    }

    /// Exact ordering of `α·k` against `num/den` (`den > 0`).
    pub fn cmp_scaled(&self, k: u64, num: &BigInt, den: &BigInt) -> Result<Ordering> {
        if den.sign() != num_bigint::Sign::Plus {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        let kb = BigInt::from(k);
        match &self.repr {
            Repr::Quadratic(q) => Ok(q.cmp_scaled(&kb, num, den)),
            Repr::PolyRoot(r) => {
                let x = BigRational::new(num.clone(), den.clone());
                if k == 0 {
                    return Ok(BigRational::zero().cmp(&x));
                }
                let kq = BigRational::from_integer(kb);
                r.with_refinement(|lo, hi| {
                    if x <= lo * &kq {
                        Some(Ordering::Greater)
                    } else if x >= hi * &kq {
                        Some(Ordering::Less)
                    } else {
                        None
                    }
                })
            }
        }
    }

    /// Whether `q/m < {α·n/m} < (q+1)/m`, decided by exact comparison of
    /// `α·n` with the window endpoints `m·[α·n/m] + q` and `... + q + 1`.
    pub fn frac_in_window(&self, n: u64, m: u64, q: u64) -> Result<bool> {
        if n == 0 || m == 0 || q >= m {
            return Err(Error::Precondition(format!(
                "need n >= 1, m >= 1, q < m (n={n}, m={m}, q={q})"
            )));
        }
        let whole = BigInt::from(self.floor_scaled(1, n, m)?);
        let lower = &whole * BigInt::from(m) + BigInt::from(q);
        let upper = &lower + 1;
        let one = BigInt::from(1);
        Ok(self.cmp_scaled(n, &lower, &one)? == Ordering::Greater
            && self.cmp_scaled(n, &upper, &one)? == Ordering::Less)
    }

    /// `{α·h·n/m}` within `eps`. Only for floating evaluation of phases, never
    /// for counting decisions.
    pub fn frac_part_approx(&self, h: u64, n: u64, m: u64, eps: f64) -> Result<f64> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::Precondition(format!("eps={eps} must be positive")));
        }
        if h == 0 || m == 0 {
            return Err(Error::Precondition(format!("h={h}, m={m} must be >= 1")));
        }
        let k = h as u128 * n as u128;
        if k == 0 {
            return Ok(0.0);
        }
        // bits of headroom so that 2^-bits < eps / 4
        let bits = (-(eps / 4.0).log2()).ceil().max(1.0) as u64;
        let raw = match &self.repr {
            Repr::Quadratic(q) => {
                if let Some(x) = (eps >= 1e-14).then(|| q.frac_fast(k, m)).flatten() {
                    x
                } else {
                    let whole = BigInt::from(q.floor_scaled(k, m)?) << bits;
                    let fixed = q.floor_fixed(&BigInt::from(k), m, bits) - whole;
                    (fixed.to_f64().unwrap_or(0.0) + 0.5) / 2f64.powi(bits as i32)
                }
            }
            Repr::PolyRoot(r) => {
                let whole = BigRational::from_integer(self.floor_scaled(h, n, m)?.into());
                let scale = BigRational::new(BigInt::from(k), BigInt::from(m));
                let tol = BigRational::new(BigInt::from(1), BigInt::from(1u8) << bits);
                let two = BigRational::from_integer(2.into());
                r.with_refinement(|lo, hi| {
                    ((hi - lo) * &scale < tol).then(|| {
                        let mid = (lo + hi) / &two * &scale - &whole;
                        mid.to_f64().unwrap_or(0.0)
                    })
                })?
            }
        };
        Ok(raw.clamp(0.0, 1.0 - f64::EPSILON / 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Roots;

    fn sqrt2() -> AlgebraicAlpha {
        AlgebraicAlpha::sqrt(2).unwrap()
    }

    fn sqrt2_poly() -> AlgebraicAlpha {
        parse_alpha("poly:-2,0,1@1/1,2/1").unwrap()
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(
            parse_alpha("sqrt:2").unwrap().as_quadratic(),
            Some(Quadratic {
                a: 0,
                b: 1,
                c: 1,
                d: 2
            })
        );
        let phi = parse_alpha("quad:1,1,2,5").unwrap();
        assert!((phi.to_f64() - 1.618033988749895).abs() < 1e-15);
        assert_eq!(phi.spec(), "quad:1,1,2,5");
        assert!(matches!(
            parse_alpha("sqrt:4"),
            Err(Error::NotIrrational(_))
        ));
        assert!(matches!(parse_alpha("sqrt:-3"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_alpha("quad:-2,1,1,2"),
            Err(Error::NonPositive(_))
        ));
        assert!(matches!(parse_alpha("quad:1,2,3"), Err(Error::Parse(_))));
        assert!(matches!(parse_alpha("cube:2"), Err(Error::Parse(_))));
        assert!(matches!(parse_alpha("sqrt2"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_alpha("poly:-2,0,1@1/0,2/1"),
            Err(Error::Parse(_))
        ));
        let p = sqrt2_poly();
        assert_eq!(p.kind(), AlphaKind::PolyRoot);
        assert_eq!(p.spec(), "poly:-2,0,1@1/1,2/1");
        assert!(p.precision_bits() >= START_BITS);
    }

    #[test]
    fn floor_examples() {
        let a = sqrt2();
        assert_eq!(5u64.pow(2) * 2, 50);
        assert_eq!(50u64.sqrt(), 7);
        assert_eq!(a.floor_alpha_times(5).unwrap(), 7);
        assert_eq!(a.floor_alpha_times(0).unwrap(), 0);
        assert_eq!(
            AlgebraicAlpha::golden_ratio().floor_alpha_times(4).unwrap(),
            6
        );
        assert_eq!(a.floor_scaled(1, 5, 1).unwrap(), 7);
        // [15√2/2] = [√(450/4)] = isqrt(112)
        assert_eq!((225u64 * 2 / 4).sqrt(), 10);
        assert_eq!(a.floor_scaled(3, 5, 2).unwrap(), 10);
        assert_eq!(a.floor_scaled(1, 0, 36).unwrap(), 0);
        assert_eq!(sqrt2_poly().floor_scaled(3, 5, 2).unwrap(), 10);
    }

    #[test]
    fn window_examples() {
        let a = sqrt2();
        assert!(a.frac_in_window(5, 4, 3).unwrap());
        assert!(!a.frac_in_window(5, 4, 0).unwrap());
        assert!(a.frac_in_window(1, 1, 0).unwrap());
        assert!(a.frac_in_window(0, 4, 0).is_err());
        assert!(a.frac_in_window(3, 4, 4).is_err());
    }

    #[test]
    fn frac_examples() {
        let a = sqrt2();
        let f = a.frac_part_approx(1, 1, 1, 1e-12).unwrap();
        assert!((f - 0.414_213_562_373_095_03).abs() < 1e-12);
        let f = a.frac_part_approx(2, 1, 2, 1e-12).unwrap();
        assert!((f - 0.414_213_562_373_095_03).abs() < 1e-12);
        let f = a.frac_part_approx(1, 2, 1, 1e-12).unwrap();
        assert!((f - 0.828_427_124_746_190_1).abs() < 1e-12);
        assert!(a.frac_part_approx(1, 2, 1, 0.0).is_err());
        // slow fixed-point path and polynomial path give the same value
        let slow = a.frac_part_approx(1, 2, 1, 1e-15).unwrap();
        assert!((slow - 0.828_427_124_746_190_1).abs() < 1e-15);
        let poly = sqrt2_poly().frac_part_approx(1, 2, 1, 1e-14).unwrap();
        assert!((poly - 0.828_427_124_746_190_1).abs() < 1e-14);
    }

    #[test]
    fn floor_window_duality() {
        let a = sqrt2();
        for n in 1..=10_000u64 {
            let f = a.floor_alpha_times(n).unwrap();
            for m in [4u64, 9, 36, 100] {
                let r = f % m;
                for q in 0..m {
                    assert_eq!(
                        a.frac_in_window(n, m, q).unwrap(),
                        q == r,
                        "n={n} m={m} q={q}"
                    );
                }
            }
        }
    }

    #[test]
    fn beatty_gaps() {
        for alpha in [
            sqrt2(),
            AlgebraicAlpha::golden_ratio(),
            parse_alpha("quad:3,2,1,7").unwrap(),
        ] {
            let base = alpha.floor_alpha_times(1).unwrap();
            let mut prev = 0;
            for n in 1..=20_000 {
                let f = alpha.floor_alpha_times(n).unwrap();
                let gap = f - prev;
                assert!(gap == base || gap == base + 1, "{alpha} n={n} gap={gap}");
                prev = f;
            }
        }
    }

    #[test]
    fn poly_and_quadratic_agree() {
        let q = sqrt2();
        let p = sqrt2_poly();
        for n in 0..=100_000u64 {
            assert_eq!(
                p.floor_alpha_times(n).unwrap(),
                q.floor_alpha_times(n).unwrap()
            );
        }
        let phi_poly = parse_alpha("poly:-1,-1,1@1/1,2/1").unwrap();
        let phi = AlgebraicAlpha::golden_ratio();
        for n in (1..50_000u64).step_by(13) {
            for m in [1, 7, 36] {
                assert_eq!(
                    phi_poly.floor_scaled(3, n, m).unwrap(),
                    phi.floor_scaled(3, n, m).unwrap()
                );
            }
        }
    }

    #[test]
    fn frac_consistency_with_exact_floor() {
        // compare against a 200-bit fixed-point expansion of α·h·n/m
        let a = parse_alpha("quad:-1,3,2,7").unwrap();
        let q = a.as_quadratic().unwrap();
        for (h, n, m) in [
            (1u64, 1u64, 1u64),
            (3, 977, 36),
            (7, 99_991, 100),
            (2, 1_000_003, 9),
        ] {
            let eps = 1e-12;
            let frac = a.frac_part_approx(h, n, m, eps).unwrap();
            let whole = a.floor_scaled(h, n, m).unwrap();
            let fixed = q.floor_fixed(&BigInt::from(h as u128 * n as u128), m, 200);
            let frac_fixed =
                (fixed - (BigInt::from(whole) << 200u32)).to_f64().unwrap() / 2f64.powi(200);
            assert!(
                (frac - frac_fixed).abs() < eps,
                "{h} {n} {m}: {frac} vs {frac_fixed}"
            );
        }
    }

    #[test]
    fn shared_across_threads() {
        let p = sqrt2_poly();
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let p = p.clone();
                std::thread::spawn(move || {
                    (1..2_000u64)
                        .map(|n| p.floor_scaled(1, n * (i + 1), 1).unwrap())
                        .sum::<u64>()
                })
            })
            .collect();
        let q = sqrt2();
        for (i, h) in handles.into_iter().enumerate() {
            let expect: u64 = (1..2_000u64)
                .map(|n| q.floor_scaled(1, n * (i as u64 + 1), 1).unwrap())
                .sum();
            assert_eq!(h.join().unwrap(), expect);
        }
    }
}
