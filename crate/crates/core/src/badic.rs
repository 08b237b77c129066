//! Exact b-adic rationals `n / b^e` in `[0, 1)`.

use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// The point `numerator / base^exponent`, with `numerator < base^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadicPoint {
    numerator: BigUint,
    exponent: u32,
    base: u32,
}

pub(crate) fn pow(base: u32, exponent: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exponent as usize)
}

impl BadicPoint {
    pub fn new(numerator: BigUint, exponent: u32, base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::domain("b-adic base must be >= 2"));
        }
        if numerator >= pow(base, exponent) {
            return Err(Error::invalid("numerator", "b-adic point must lie in [0, 1)"));
        }
        Ok(BadicPoint { numerator, exponent, base })
    }

    pub fn from_u64(numerator: u64, exponent: u32, base: u32) -> Result<Self> {
        Self::new(BigUint::from(numerator), exponent, base)
    }

    pub fn zero(base: u32) -> Self {
        BadicPoint { numerator: BigUint::zero(), exponent: 0, base }
    }

    /// Uniform point on the grid `b^{-exponent}ℤ ∩ [0, 1)`, drawn digit by digit.
    pub fn random(rng: &mut Rng, exponent: u32, base: u32) -> Self {
        let mut n = BigUint::zero();
        for _ in 0..exponent {
            n = n * base + rng.gen_range(0..base);
        }
        BadicPoint { numerator: n, exponent, base }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Same value written over `base^exponent` (`exponent ≥ self.exponent`).
    pub fn numerator_at(&self, exponent: u32) -> BigUint {
        debug_assert!(exponent >= self.exponent);
        &self.numerator * pow(self.base, exponent - self.exponent)
    }

    /// `b^k · x mod 1`, exactly.
    pub fn shift(&self, k: u32) -> Self {
        if k >= self.exponent {
            return BadicPoint { numerator: BigUint::zero(), exponent: 0, base: self.base };
        }
        let e = self.exponent - k;
        let numerator = &self.numerator % pow(self.base, e);
        BadicPoint { numerator, exponent: e, base: self.base }
    }

    /// `b^k · x` as an integer part and a b-adic fractional part.
    pub fn scale(&self, k: u32) -> (BigUint, Self) {
        if k >= self.exponent {
            let int = &self.numerator * pow(self.base, k - self.exponent);
            return (int, BadicPoint::zero(self.base));
        }
        let e = self.exponent - k;
        let (int, frac) = self.numerator.div_rem(&pow(self.base, e));
        (int, BadicPoint { numerator: frac, exponent: e, base: self.base })
    }

    /// `y − x` as a signed numerator over `base^e` with the common exponent `e`.
    pub fn sub(&self, other: &Self) -> (BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        let a = BigInt::from_biguint(Sign::Plus, self.numerator_at(e));
        let b = BigInt::from_biguint(Sign::Plus, other.numerator_at(e));
        (a - b, e)
    }

    /// `self + n / base^e`, failing when the sum leaves `[0, 1)`.
    pub fn add_offset(&self, n: &BigUint, e: u32) -> Result<Self> {
        let common = self.exponent.max(e);
        let sum = self.numerator_at(common) + n * pow(self.base, common - e);
        Self::new(sum, common, self.base)
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.numerator, &pow(self.base, self.exponent))
    }
}

impl PartialOrd for BadicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.base != other.base {
            return None;
        }
        let e = self.exponent.max(other.exponent);
        Some(self.numerator_at(e).cmp(&other.numerator_at(e)))
    }
}

/// `num / den` rounded to f64 without overflowing intermediate conversions.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift_num = num.bits().saturating_sub(64);
    let shift_den = den.bits().saturating_sub(64);
    let n = (num >> shift_num).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift_den).to_f64().unwrap_or(f64::INFINITY);
    libm::ldexp(n / d, shift_num as i32 - shift_den as i32)
}

/// Natural log of `num / den`, valid far outside the f64 range.
pub fn ratio_ln(num: &BigUint, den: &BigUint) -> f64 {
    let shift_num = num.bits().saturating_sub(64);
    let shift_den = den.bits().saturating_sub(64);
    let n = (num >> shift_num).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift_den).to_f64().unwrap_or(f64::INFINITY);
    libm::log(n / d) + (shift_num as f64 - shift_den as f64) * core::f64::consts::LN_2
}

/// Signed version of [`ratio_to_f64`].
pub fn signed_ratio_to_f64(num: &BigInt, den: &BigUint) -> f64 {
    let v = ratio_to_f64(num.magnitude(), den);
    if num.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// Uniform integer in `[0, n)` by digit-wise rejection sampling; `n > 0`.
pub fn random_below(rng: &mut Rng, n: &BigUint, base: u32) -> BigUint {
    debug_assert!(!n.is_zero());
    let digits = digit_count(n, base);
    loop {
        let mut v = BigUint::zero();
        for _ in 0..digits {
            v = v * base + rng.gen_range(0..base);
        }
        if &v < n {
            return v;
        }
    }
}

/// Number of base-`b` digits of `n` (0 for `n = 0`).
pub fn digit_count(n: &BigUint, base: u32) -> u32 {
    let b = BigUint::from(base);
    let mut p = BigUint::one();
    let mut count = 0;
    while &p <= n {
        p *= &b;
        count += 1;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn shift_is_exact_multiplication_mod_one() {
        let x = BadicPoint::from_u64(5, 3, 3).unwrap(); // 5/27
        let s = x.shift(1); // 15/27 = 5/9
        assert_eq!(s.numerator(), &BigUint::from(5u32));
        assert_eq!(s.exponent(), 2);
        let s2 = x.shift(2); // 45/27 mod 1 = 18/27 = 2/3
        assert_eq!(s2.numerator(), &BigUint::from(2u32));
        assert!(x.shift(5).numerator().is_zero());
    }

    #[test]
    fn scale_splits_integer_part() {
        let x = BadicPoint::from_u64(13, 4, 2).unwrap(); // 13/16
        let (int, frac) = x.scale(2); // 52/16 = 3 + 4/16
        assert_eq!(int, BigUint::from(3u32));
        assert_eq!(frac.numerator(), &BigUint::from(1u32));
        assert_eq!(frac.exponent(), 2);
    }

    #[test]
    fn ordering_and_subtraction() {
        let x = BadicPoint::from_u64(1, 2, 2).unwrap();
        let y = BadicPoint::from_u64(3, 3, 2).unwrap();
        assert!(x < y);
        let (d, e) = y.sub(&x);
        assert_eq!((d, e), (BigInt::from(1), 3));
        assert!(BadicPoint::from_u64(8, 3, 2).is_err());
    }

    #[test]
    fn float_conversion_handles_huge_exponents() {
        let x = BadicPoint::new(BigUint::one(), 600, 2).unwrap();
        assert_eq!(x.to_f64(), libm::ldexp(1.0, -600));
        let ln = ratio_ln(&BigUint::one(), &pow(2, 3000));
        assert!((ln + 3000.0 * core::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn random_points_stay_in_range() {
        let mut rng = Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = BadicPoint::random(&mut rng, 17, 5);
            assert!(p.numerator() < &pow(5, 17));
        }
        assert_eq!(digit_count(&BigUint::from(100u32), 10), 3);
        assert_eq!(digit_count(&BigUint::from(99u32), 10), 2);
        assert_eq!(digit_count(&BigUint::zero(), 10), 0);
    }
}
