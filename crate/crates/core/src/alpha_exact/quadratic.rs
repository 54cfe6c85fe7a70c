use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `(a + b√D) / c` with `D > 0` non-square, `b != 0`, `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadratic {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

fn is_square(d: i64) -> bool {
    d >= 0 && (d as u64).sqrt().pow(2) == d as u64
}

impl Quadratic {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if c <= 0 {
            return Err(Error::Parse(format!("denominator c={c} must be positive")));
        }
        if d <= 0 {
            return Err(Error::Parse(format!("radicand D={d} must be positive")));
        }
        if b == 0 || is_square(d) {
            return Err(Error::NotIrrational(format!("({a} + {b}·√{d})/{c}")));
        }
        let q = Quadratic { a, b, c, d };
        if q.numerator_sign() != Ordering::Greater {
            return Err(Error::NonPositive(format!("({a} + {b}·√{d})/{c}")));
        }
        Ok(q)
    }

    /// Sign of `a + b√D`.
    fn numerator_sign(&self) -> Ordering {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        sign_of_sum(&a, &b, &BigInt::from(self.d))
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / self.c as f64
    }

    /// `floor(α·k / m)` for `k >= 0`, `m >= 1`.
    pub fn floor_scaled(&self, k: u128, m: u64) -> Result<u64> {
        if k == 0 {
            return Ok(0);
        }
        let value = match self.floor_scaled_small(k, m) {
            Some(v) => BigInt::from(v),
            None => self.floor_scaled_big(&BigInt::from(k), m),
        };
        value.to_u64().ok_or(Error::Overflow("floor_scaled"))
    }

    fn floor_scaled_small(&self, k: u128, m: u64) -> Option<i128> {
        let bk = (self.b.unsigned_abs() as u128).checked_mul(k)?;
        let x = bk.checked_mul(bk)?.checked_mul(self.d as u128)?;
        let s = i128::try_from(x.sqrt()).ok()?;
        let floor_bk = if self.b > 0 { s } else { -s - 1 };
        let numer = (self.a as i128)
            .checked_mul(i128::try_from(k).ok()?)?
            .checked_add(floor_bk)?;
        let modulus = (self.c as i128).checked_mul(m as i128)?;
        Some(Integer::div_floor(&numer, &modulus))
    }

    fn floor_scaled_big(&self, k: &BigInt, m: u64) -> BigInt {
        let numer = BigInt::from(self.a) * k + floor_b_sqrt(self.b, self.d, k);
        numer.div_floor(&(BigInt::from(self.c) * BigInt::from(m)))
    }

    /// Sign of `α·k − num/den` for `den > 0`.
    pub fn cmp_scaled(&self, k: &BigInt, num: &BigInt, den: &BigInt) -> Ordering {
        // α·k − num/den ∝ den·b·k·√D − (c·num − den·a·k)
        let l = den * BigInt::from(self.b) * k;
        let r = BigInt::from(self.c) * num - den * BigInt::from(self.a) * k;
        sign_of_sum(&-r, &l, &BigInt::from(self.d))
    }

    /// `{α·k / m}` to within about `1e-15` when the integer path fits.
    pub fn frac_fast(&self, k: u128, m: u64) -> Option<f64> {
        let bk = (self.b.unsigned_abs() as u128).checked_mul(k)?;
        let x = bk.checked_mul(bk)?.checked_mul(self.d as u128)?;
        let s = x.sqrt();
        if s == 0 {
            return None;
        }
        // {bk√D} = (x − s²) / (bk√D + s), free of cancellation
        let rem = (x - s * s) as f64;
        let f = rem / (s as f64 + bk as f64 * (self.d as f64).sqrt());
        let (floor_bk, frac_bk) = if self.b > 0 {
            (i128::try_from(s).ok()?, f)
        } else {
            (-i128::try_from(s).ok()? - 1, 1.0 - f)
        };
        let numer = (self.a as i128)
            .checked_mul(i128::try_from(k).ok()?)?
            .checked_add(floor_bk)?;
        let modulus = (self.c as i128).checked_mul(m as i128)?;
        let r = numer.rem_euclid(modulus);
        if r >= 1 << 53 || modulus >= 1 << 53 {
            return None;
        }
        Some((r as f64 + frac_bk) / modulus as f64)
    }

    /// `floor(2^bits · α·k / m)`.
    pub fn floor_fixed(&self, k: &BigInt, m: u64, bits: u64) -> BigInt {
        let ks = k << bits;
        self.floor_scaled_big(&ks, m)
    }
}

/// `floor(b·k·√D)` for `k > 0`, `D` non-square.
fn floor_b_sqrt(b: i64, d: i64, k: &BigInt) -> BigInt {
    let bk = BigInt::from(b.unsigned_abs()) * k;
    let s = (&bk * &bk * BigInt::from(d)).sqrt();
    if b > 0 || bk.is_zero() {
        s
    } else {
        -s - 1
    }
}

/// Sign of `a + b·√d` for non-square `d > 0`.
pub(crate) fn sign_of_sum(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let sign = |x: &BigInt| match x.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    };
    match (a.sign(), b.sign()) {
        (_, Sign::NoSign) => sign(a),
        (Sign::NoSign, _) => sign(b),
        (Sign::Plus, Sign::Plus) => Ordering::Greater,
        (Sign::Minus, Sign::Minus) => Ordering::Less,
        // a − |b|√d
        (Sign::Plus, Sign::Minus) => (a * a).cmp(&(b * b * d)),
        // |b|√d − |a|
        (Sign::Minus, Sign::Plus) => (b * b * d).cmp(&(a * a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_sum_cases() {
        let i = |x: i64| BigInt::from(x);
        assert_eq!(sign_of_sum(&i(0), &i(1), &i(2)), Ordering::Greater);
        assert_eq!(sign_of_sum(&i(0), &i(-1), &i(2)), Ordering::Less);
        assert_eq!(sign_of_sum(&i(2), &i(-1), &i(2)), Ordering::Greater);
        assert_eq!(sign_of_sum(&i(1), &i(-1), &i(2)), Ordering::Less);
        assert_eq!(sign_of_sum(&i(-2), &i(1), &i(2)), Ordering::Less);
        assert_eq!(sign_of_sum(&i(-1), &i(1), &i(2)), Ordering::Greater);
        assert_eq!(sign_of_sum(&i(3), &i(0), &i(2)), Ordering::Greater);
        assert_eq!(sign_of_sum(&i(-3), &i(-2), &i(5)), Ordering::Less);
    }

    #[test]
    fn rejects_degenerate_forms() {
        assert!(matches!(
            Quadratic::new(0, 1, 1, 4),
            Err(Error::NotIrrational(_))
        ));
        assert!(matches!(
            Quadratic::new(3, 0, 1, 2),
            Err(Error::NotIrrational(_))
        ));
        assert!(matches!(
            Quadratic::new(1, -1, 1, 2),
            Err(Error::NonPositive(_))
        ));
        assert!(matches!(Quadratic::new(0, 1, 0, 2), Err(Error::Parse(_))));
        assert!(Quadratic::new(2, -1, 1, 2).is_ok());
    }

    #[test]
    fn small_and_big_paths_agree() {
        let q = Quadratic::new(-3, 7, 5, 11).unwrap();
        for k in (1..2_000u128).step_by(7) {
            for m in [1u64, 3, 36, 1000] {
                let small = q.floor_scaled_small(k, m).unwrap();
                let big = q.floor_scaled_big(&BigInt::from(k), m);
                assert_eq!(BigInt::from(small), big);
            }
        }
        // beyond u128 the big path takes over
        let huge = u128::MAX / 3;
        assert!(q.floor_scaled_small(huge, 1).is_none());
        assert_eq!(
            q.floor_scaled(huge, 1),
            Err(Error::Overflow("floor_scaled"))
        );
    }
}
