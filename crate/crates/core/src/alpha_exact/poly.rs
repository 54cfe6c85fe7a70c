//! Real root of an integer polynomial, held as a shrinking rational bracket.

use std::cmp::Ordering;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub const START_BITS: u64 = 128;
pub const MAX_BITS: u64 = 1 << 20;

#[derive(Debug, Clone)]
struct Bracket {
    lo: BigRational,
    hi: BigRational,
    bits: u64,
}

/// The unique root of `Σ cᵢ xⁱ` inside `(lo, hi)`.
#[derive(Debug)]
pub struct PolyRoot {
    coeffs: Vec<BigInt>,
    /// Sign of the polynomial at the lower end of the bracket.
    sign_lo: Ordering,
    bracket: RwLock<Bracket>,
}

fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// Sign of `Σ cᵢ xⁱ` at `x = n/d`, `d > 0`, evaluated on integers.
fn sign_at(coeffs: &[BigInt], x: &BigRational) -> Ordering {
    let n = x.numer();
    let d = x.denom();
    let k = coeffs.len() - 1;
    let mut acc = coeffs[k].clone();
    let mut dpow = BigInt::one();
    for i in (0..k).rev() {
        dpow *= d;
        acc = acc * n + &coeffs[i] * &dpow;
    }
    acc.sign().cmp(&num_bigint::Sign::NoSign)
}

fn eval(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    if out.is_empty() {
        out.push(BigRational::zero());
    }
    out
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonempty divisor").clone();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let factor = r.last().expect("nonempty") / &lead;
        for (i, c) in b.iter().enumerate() {
            let v = &r[i + shift] - &factor * c;
            r[i + shift] = v;
        }
        r.pop();
        if r.is_empty() {
            r.push(BigRational::zero());
            break;
        }
        trim(&mut r);
    }
    r
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// Distinct real roots in `(lo, hi]` by Sturm's theorem.
fn sturm_count(coeffs: &[BigInt], lo: &BigRational, hi: &BigRational) -> usize {
    let p0: Vec<BigRational> = coeffs
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    let mut chain = vec![p0.clone(), derivative(&p0)];
    loop {
        let n = chain.len();
        let r = poly_rem(&chain[n - 2], &chain[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    let variations = |x: &BigRational| {
        let signs: Vec<bool> = chain
            .iter()
            .map(|p| eval(p, x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    variations(lo).saturating_sub(variations(hi))
}

impl PolyRoot {
    /// Validates the bracket (sign change, exactly one root, root positive and
    /// irrational) and refines it to the starting precision.
    pub fn new(mut coeffs: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let degree = coeffs.len().saturating_sub(1);
        if degree == 0 {
            return Err(Error::Parse("constant polynomial has no root".into()));
        }
        if degree == 1 {
            return Err(Error::NotIrrational("root of a linear polynomial".into()));
        }
        if lo >= hi {
            return Err(Error::Parse(format!("empty interval ({lo}, {hi})")));
        }
        let s_lo = sign_at(&coeffs, &lo);
        let s_hi = sign_at(&coeffs, &hi);
        if s_lo == Ordering::Equal || s_hi == Ordering::Equal {
            return Err(Error::Parse("interval endpoint is a root".into()));
        }
        if s_lo == s_hi {
            return Err(Error::Parse(format!("no sign change on ({lo}, {hi})")));
        }
        let roots = sturm_count(&coeffs, &lo, &hi);
        if roots != 1 {
            return Err(Error::Parse(format!(
                "interval ({lo}, {hi}) holds {roots} roots, expected exactly one"
            )));
        }
        if !hi.is_positive() {
            return Err(Error::NonPositive(format!("root lies in ({lo}, {hi})")));
        }
        let mut lo = lo;
        if !lo.is_positive() {
            let zero = BigRational::zero();
            match sign_at(&coeffs, &zero) {
                Ordering::Equal => return Err(Error::NotIrrational("root is 0".into())),
                s if s == s_lo => lo = zero,
                _ => return Err(Error::NonPositive(format!("root lies in ({lo}, 0)"))),
            }
        }
        let root = PolyRoot {
            coeffs,
            sign_lo: s_lo,
            bracket: RwLock::new(Bracket { lo, hi, bits: 0 }),
        };
        root.exclude_rational_root()?;
        root.refine(START_BITS)?;
        Ok(root)
    }

    /// A rational root `p/q` of an integer polynomial has `q | c_k`, so it is
    /// a multiple of `1/|c_k|`; once the bracket is narrower than that, at
    /// most one candidate is left to test.
    fn exclude_rational_root(&self) -> Result<()> {
        let lead = self.coeffs.last().expect("degree >= 2").abs();
        self.refine(lead.bits() + 2)?;
        let b = self.bracket.read().expect("bracket lock poisoned").clone();
        let lead_q = BigRational::from_integer(lead.clone());
        let first = (&b.lo * &lead_q).ceil().to_integer();
        let last = (&b.hi * &lead_q).floor().to_integer();
        let mut j = first;
        while j <= last {
            let cand = BigRational::new(j.clone(), lead.clone());
            if sign_at(&self.coeffs, &cand) == Ordering::Equal {
                return Err(Error::NotIrrational(format!("rational root {cand}")));
            }
            j += 1;
        }
        Ok(())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn precision_bits(&self) -> u64 {
        self.bracket.read().expect("bracket lock poisoned").bits
    }

    /// Current `(lo, hi)` bracket.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        let b = self.bracket.read().expect("bracket lock poisoned");
        (b.lo.clone(), b.hi.clone())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let (lo, hi) = self.bounds();
        ((lo + hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Runs `probe` against the current bracket until it yields a value,
    /// doubling the precision between attempts.
    pub fn with_refinement<T>(
        &self,
        mut probe: impl FnMut(&BigRational, &BigRational) -> Option<T>,
    ) -> Result<T> {
        loop {
            let bits = {
                let b = self.bracket.read().expect("bracket lock poisoned");
                if let Some(v) = probe(&b.lo, &b.hi) {
                    return Ok(v);
                }
                b.bits
            };
            self.refine(bits.max(START_BITS) * 2)?;
        }
    }

    fn sign(&self, x: &BigRational) -> Ordering {
        sign_at(&self.coeffs, x)
    }

    /// Shrinks the bracket to width `<= 2^-target`.
    pub fn refine(&self, target: u64) -> Result<()> {
        if target > MAX_BITS {
            return Err(Error::PrecisionExhausted { bits: target });
        }
        let mut b = self.bracket.write().expect("bracket lock poisoned");
        if b.bits >= target {
            return Ok(());
        }
        let tol = BigRational::new(BigInt::one(), pow2(target));
        let poly: Vec<BigRational> = self
            .coeffs
            .iter()
            .cloned()
            .map(BigRational::from_integer)
            .collect();
        let dpoly = derivative(&poly);
        let two = BigRational::from_integer(2.into());
        let mut steps = 0u64;
        while &b.hi - &b.lo > tol {
            steps += 1;
            if steps > 4 * MAX_BITS {
                return Err(Error::PrecisionExhausted { bits: target });
            }
            let mid = (&b.lo + &b.hi) / &two;
            if let Some((lo, hi)) = self.newton_step(&b, &mid, &poly, &dpoly, target) {
                b.lo = lo;
                b.hi = hi;
                continue;
            }
            // a few bisections before the next Newton attempt
            let mut mid = mid;
            for _ in 0..4 {
                match self.sign(&mid) {
                    Ordering::Equal => {
                        return Err(Error::NotIrrational(format!("rational root {mid}")))
                    }
                    s if s == self.sign_lo => b.lo = mid,
                    _ => b.hi = mid,
                }
                mid = (&b.lo + &b.hi) / &two;
            }
        }
        b.bits = target;
        Ok(())
    }

    /// One Newton step from `mid`, rounded to a dyadic grid with roughly
    /// twice the current precision, accepted only if the sign change is
    /// verified on the new, narrower bracket.
    fn newton_step(
        &self,
        b: &Bracket,
        mid: &BigRational,
        poly: &[BigRational],
        dpoly: &[BigRational],
        target: u64,
    ) -> Option<(BigRational, BigRational)> {
        let slope = eval(dpoly, mid);
        if slope.is_zero() {
            return None;
        }
        let width = &b.hi - &b.lo;
        let cur_bits = (width.denom().bits() as i64 - width.numer().bits() as i64).max(1) as u64;
        let grid = (2 * cur_bits).min(target + 1);
        let x = mid - eval(poly, mid) / slope;
        let scale = BigRational::from_integer(pow2(grid));
        let center = (x * &scale).round();
        let left = (&center - BigRational::one()) / &scale;
        let right = (&center + BigRational::one()) / &scale;
        if left <= b.lo || right >= b.hi {
            return None;
        }
        let s_left = self.sign(&left);
        let s_right = self.sign(&right);
        if s_left == self.sign_lo && s_right == self.sign_lo.reverse() {
            Some((left, right))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn coeffs(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn sqrt2_bracket_refines() {
        let r = PolyRoot::new(coeffs(&[-2, 0, 1]), q(1, 1), q(2, 1)).unwrap();
        assert!(r.precision_bits() >= START_BITS);
        let (lo, hi) = r.bounds();
        assert!(&lo * &lo < q(2, 1) && &hi * &hi > q(2, 1));
        r.refine(1000).unwrap();
        let (lo, hi) = r.bounds();
        assert!(&hi - &lo <= BigRational::new(1.into(), pow2(1000)));
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_brackets() {
        // x² − 4 has the rational root 2
        assert!(matches!(
            PolyRoot::new(coeffs(&[-4, 0, 1]), q(1, 1), q(3, 1)),
            Err(Error::NotIrrational(_))
        ));
        // 2x² − 9x + 4 = (2x − 1)(x − 4), root 1/2
        assert!(matches!(
            PolyRoot::new(coeffs(&[4, -9, 2]), q(1, 5), q(1, 1)),
            Err(Error::NotIrrational(_))
        ));
        // both roots of x² − 2 inside
        assert!(matches!(
            PolyRoot::new(coeffs(&[-2, 0, 1]), q(-2, 1), q(2, 1)),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            PolyRoot::new(coeffs(&[-2, 0, 1]), q(-2, 1), q(-1, 1)),
            Err(Error::NonPositive(_))
        ));
        assert!(matches!(
            PolyRoot::new(coeffs(&[-2, 1]), q(1, 1), q(3, 1)),
            Err(Error::NotIrrational(_))
        ));
        assert!(matches!(
            PolyRoot::new(coeffs(&[-2, 0, 1]), q(2, 1), q(3, 1)),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn negative_lower_end_is_clipped() {
        let r = PolyRoot::new(coeffs(&[-2, 0, 1]), q(-1, 1), q(2, 1)).unwrap();
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cubic_root() {
        // x³ − 2, real root 2^(1/3)
        let r = PolyRoot::new(coeffs(&[-2, 0, 0, 1]), q(1, 1), q(2, 1)).unwrap();
        assert!((r.to_f64() - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn sturm_counts() {
        // (x − 1)(x − 2)(x − 3) = x³ − 6x² + 11x − 6
        let c = coeffs(&[-6, 11, -6, 1]);
        assert_eq!(sturm_count(&c, &q(0, 1), &q(4, 1)), 3);
        assert_eq!(sturm_count(&c, &q(3, 2), &q(5, 2)), 1);
    }
}
