use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::badic::pow;
use crate::error::{Error, Result};
use crate::funcore::{PeriodicFunction, WeierstrassSpec};

/// Largest coordinate count that dense (practical-mode) routines will build.
pub const DENSE_COORDINATE_CAP: u64 = 1 << 16;

/// `C_α = (10/3)α⁻¹log₂10 − α⁻¹log₂(1−2^{-α}) + 2α⁻¹ − 1`.
pub fn compute_c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    let log2 = |v: f64| libm::log2(v);
    Ok(10.0 / 3.0 / alpha * log2(10.0) - log2(1.0 - libm::exp2(-alpha)) / alpha + 2.0 / alpha - 1.0)
}

/// `log_b max{20/(b^{1−α}−1), 40·C_α·b^{2C_α(1−α)}}`, evaluated in log space.
pub fn l0_threshold_log(alpha: f64, b: u32) -> Result<f64> {
    if b < 2 {
        return Err(Error::domain("b must be >= 2"));
    }
    let c = compute_c_alpha(alpha)?;
    let lnb = libm::log(b as f64);
    let first = libm::log(20.0 / (libm::pow(b as f64, 1.0 - alpha) - 1.0)) / lnb;
    let second = libm::log(40.0 * c) / lnb + 2.0 * c * (1.0 - alpha);
    Ok(first.max(second))
}

/// Minimal positive `ℓ₀` with `b^{ℓ₀}` strictly above the threshold.
pub fn compute_l0(alpha: f64, b: u32) -> Result<u32> {
    let t = l0_threshold_log(alpha, b)?;
    let l0 = libm::floor(t) + 1.0;
    if l0 > u32::MAX as f64 {
        return Err(Error::Overflow("l0 exceeds u32".into()));
    }
    Ok((l0 as u32).max(1))
}

/// The tent-function embedding family.
///
/// Coordinate `i < d − 1` is the tent with a steep increasing branch of width
/// `b^{-ℓ₀}` on `[r_i, s_i]`, `r_i = i·b^{-ℓ₀-3}`; coordinate `d − 1` is the raw
/// arc parameter. Coordinates are produced on demand, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpec {
    alpha: f64,
    b: u32,
    c_alpha: f64,
    l0: u32,
    l0_is_override: bool,
    c_theory: f64,
}

pub fn build_family(alpha: f64, b: u32, l0_override: Option<u32>) -> Result<EmbeddingSpec> {
    EmbeddingSpec::new(alpha, b, l0_override)
}

impl EmbeddingSpec {
    pub fn new(alpha: f64, b: u32, l0_override: Option<u32>) -> Result<Self> {
        if b < 2 {
            return Err(Error::domain("b must be >= 2"));
        }
        let c_alpha = compute_c_alpha(alpha)?;
        let (l0, l0_is_override) = match l0_override {
            Some(0) => return Err(Error::invalid("l0", "override must be >= 1")),
            Some(l) => (l, true),
            None => (compute_l0(alpha, b)?, false),
        };
        let c_theory = 0.7 * libm::pow(b as f64, alpha * l0 as f64 - 2.0 * (1.0 - alpha));
        Ok(EmbeddingSpec { alpha, b, c_alpha, l0, l0_is_override, c_theory })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    pub fn l0(&self) -> u32 {
        self.l0
    }

    pub fn l0_is_override(&self) -> bool {
        self.l0_is_override
    }

    /// `(7/10)·b^{αℓ₀ − 2(1−α)}`
    pub fn c_theory(&self) -> f64 {
        self.c_theory
    }

    /// `Δ = ⌊C_α⌋ + 1`, the offset `k' − k` used by certificates.
    pub fn k_prime_offset(&self) -> u32 {
        libm::floor(self.c_alpha) as u32 + 1
    }

    /// Number of tent coordinates, `b^{ℓ₀+3}`.
    pub fn tent_count(&self) -> BigUint {
        pow(self.b, self.l0 + 3)
    }

    /// `d = b^{ℓ₀+3} + 1`.
    pub fn d(&self) -> BigUint {
        self.tent_count() + 1u32
    }

    pub fn d_u64(&self) -> Option<u64> {
        self.d().to_u64()
    }

    pub fn d_log10(&self) -> f64 {
        (self.l0 + 3) as f64 * libm::log10(self.b as f64)
    }

    /// Whether dense routines may enumerate every coordinate.
    pub fn is_dense(&self) -> bool {
        self.l0_is_override && self.d_u64().is_some_and(|d| d <= DENSE_COORDINATE_CAP)
    }

    /// `ℓ = b^{-ℓ₀}`
    pub fn ell(&self) -> f64 {
        libm::pow(self.b as f64, -(self.l0 as f64))
    }

    /// `r_i = i·b^{-ℓ₀-3}` (rounded).
    pub fn r(&self, i: u64) -> f64 {
        i as f64 * libm::pow(self.b as f64, -((self.l0 + 3) as f64))
    }

    /// `s_i = r_i + b^{-ℓ₀}`
    pub fn s(&self, i: u64) -> f64 {
        self.r(i) + self.ell()
    }

    pub fn is_raw(&self, i: u64) -> bool {
        self.d_u64() == Some(i + 1)
    }

    fn check_index(&self, i: u64) -> Result<()> {
        let d = self.d();
        if BigUint::from(i) >= d {
            return Err(Error::IndexOutOfRange { index: i, d: alloc::format!("{d}") });
        }
        Ok(())
    }

    /// `g_i`, the tent translated by `½(r_i + s_i − 1) mod 1`, or the raw
    /// coordinate for `i = d − 1`.
    pub fn coordinate(&self, i: u64) -> Result<PeriodicFunction> {
        self.check_index(i)?;
        if self.is_raw(i) {
            return Ok(PeriodicFunction::raw_coordinate());
        }
        let shift = 0.5 * (self.r(i) + self.s(i) - 1.0);
        let shift = shift - libm::floor(shift);
        // rounding can land exactly on 1.0
        let shift = if shift >= 1.0 { 0.0 } else { shift };
        PeriodicFunction::tent_shift(self.ell(), shift)
    }

    /// The Weierstrass sum of coordinate `i`; errors on the raw coordinate.
    pub fn coordinate_spec(&self, i: u64) -> Result<WeierstrassSpec> {
        let g = self.coordinate(i)?;
        WeierstrassSpec::new(g, self.alpha, self.b)
    }

    /// All tent coordinates (excluding the raw one). Practical mode only.
    pub fn tent_coordinates(&self) -> Result<Vec<PeriodicFunction>> {
        if !self.is_dense() {
            return Err(Error::FamilyTooLarge);
        }
        let n = self.tent_count().to_u64().expect("dense family");
        (0..n).map(|i| self.coordinate(i)).collect()
    }
}

/// `W_{g_i}(x)` within `tol`; the raw coordinate returns `x`.
pub fn eval_coordinate(emb: &EmbeddingSpec, i: u64, x: f64, tol: f64) -> Result<f64> {
    emb.check_index(i)?;
    if emb.is_raw(i) {
        return Ok(x);
    }
    emb.coordinate_spec(i)?.eval(x, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_alpha_values() {
        assert!((compute_c_alpha(0.7).unwrap() - 19.646).abs() < 1e-3);
        assert!((compute_c_alpha(0.5).unwrap() - 28.689).abs() < 1e-3);
        for k in 1..20 {
            assert!(compute_c_alpha(k as f64 * 0.05).unwrap() > 1.0);
        }
        assert!(compute_c_alpha(0.0).is_err());
        assert!(compute_c_alpha(1.0).is_err());
    }

    #[test]
    fn l0_values_are_minimal() {
        assert_eq!(compute_l0(0.5, 2).unwrap(), 39);
        assert_eq!(compute_l0(0.9, 10).unwrap(), 6);
        for (alpha, b) in [(0.5, 2), (0.9, 10), (0.7, 2), (0.3, 3), (0.95, 7)] {
            let t = l0_threshold_log(alpha, b).unwrap();
            let l0 = compute_l0(alpha, b).unwrap() as f64;
            assert!(l0 - 1.0 <= t && t < l0);
        }
    }

    #[test]
    fn practical_family_layout() {
        let emb = build_family(0.7, 2, Some(2)).unwrap();
        assert_eq!(emb.d_u64(), Some(33));
        for i in 0..32u64 {
            assert!((emb.r(i) - i as f64 / 32.0).abs() < 1e-15);
            assert!((emb.s(i) - (i as f64 / 32.0 + 0.25)).abs() < 1e-15);
        }
        assert!(emb.is_raw(32));
        assert!(emb.coordinate(33).is_err());
    }

    #[test]
    fn tent_coordinate_shape() {
        let emb = build_family(0.7, 2, Some(2)).unwrap();
        let g0 = emb.coordinate(0).unwrap();
        assert!((g0.eval(0.25) - 0.5).abs() < 1e-15);
        assert!((g0.eval(0.0) + 0.5).abs() < 1e-15);
        assert!(g0.eval(0.125).abs() < 1e-15);
        // slope law on every coordinate: b^{l0} rising, -1/(1 - b^{-l0}) falling
        for i in 0..32u64 {
            let g = emb.coordinate(i).unwrap();
            let (r, s) = (emb.r(i), emb.s(i));
            let rise = (g.eval(r + 0.75 * (s - r)) - g.eval(r + 0.25 * (s - r))) / (0.5 * (s - r));
            assert!((rise - 4.0).abs() < 1e-9);
            let fall = (g.eval(s + 0.3) - g.eval(s + 0.1)) / 0.2;
            assert!((-2.0..-1.0).contains(&fall));
            assert!((fall + 1.0 / (1.0 - 0.25)).abs() < 1e-9);
        }
    }

    #[test]
    fn theoretical_family_is_lazy() {
        let emb = build_family(0.5, 2, None).unwrap();
        assert_eq!(emb.l0(), 39);
        assert!(!emb.l0_is_override());
        assert_eq!(emb.d(), pow(2, 42) + 1u32);
        assert!(!emb.is_dense());
        assert_eq!(emb.tent_coordinates().unwrap_err(), Error::FamilyTooLarge);
        assert!((emb.c_theory() - 2.595e5).abs() < 1e2);
        let g = emb.coordinate(12345).unwrap();
        assert!(g.eval(0.3).abs() <= 0.5 + 1e-12);
    }

    #[test]
    fn coordinate_evaluation() {
        let emb = build_family(0.7, 2, Some(2)).unwrap();
        assert_eq!(eval_coordinate(&emb, 32, 0.3, 1e-10).unwrap(), 0.3);
        let tol = 1e-10;
        let bound = 0.5 / (1.0 - libm::pow(2.0, -0.7)) + tol;
        for i in [0u64, 5, 31] {
            for x in [0.0, 0.1, 0.77] {
                assert!(eval_coordinate(&emb, i, x, tol).unwrap().abs() <= bound);
            }
        }
        // brute-force oracle for coordinate 0 at 1/8
        let g0 = emb.coordinate(0).unwrap();
        let oracle: f64 = (0..200)
            .map(|k| {
                let arg = 0.125 * libm::pow(2.0, k as f64);
                libm::pow(2.0, -0.7 * k as f64) * g0.eval(arg - libm::floor(arg))
            })
            .sum();
        assert!((eval_coordinate(&emb, 0, 0.125, tol).unwrap() - oracle).abs() <= 2.0 * tol);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_family(1.0, 2, None).is_err());
        assert!(build_family(0.5, 1, None).is_err());
        assert!(build_family(0.5, 2, Some(0)).is_err());
    }
}
