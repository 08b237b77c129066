//! Weierstrass sums `W(x) = Σ_{k≥0} b^{-αk} g(b^k x)` with certified truncation.
//!
//! The phases `b^k x mod 1` are propagated exactly: float arguments are
//! decomposed into dyadic rationals and rational arguments `p/q` are stepped
//! with integer arithmetic. Only the per-term evaluation of `g` rounds, so the
//! truncation bound is the only error that matters at practical tolerances.

use alloc::vec::Vec;
use rand::Rng as _;

use super::periodic::PeriodicFunction;
use crate::error::{Error, Result};
use crate::rng::{rng_for, stream};

/// Below this magnitude a float argument is scaled in floating point before
/// switching to the exact dyadic phase.
const TINY_ARG: f64 = 1.0 / (1u128 << 70) as f64;

/// A Weierstrass function `W_g^{α,b}` with certified constants of `g`.
#[derive(Debug, Clone)]
pub struct WeierstrassSpec {
    g: PeriodicFunction,
    alpha: f64,
    b: u32,
    sup_norm: f64,
    lip: f64,
    osc: f64,
    holder_const: Option<f64>,
}

impl WeierstrassSpec {
    pub fn new(g: PeriodicFunction, alpha: f64, b: u32) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain("alpha must lie in (0, 1]"));
        }
        if b < 2 {
            return Err(Error::domain("b must be an integer >= 2"));
        }
        if !g.is_periodic() {
            return Err(Error::NonPeriodic);
        }
        let sup_norm = g.sup_norm();
        let lip = g.lipschitz();
        let osc = g.oscillation();
        let holder_const = holder_formula(alpha, b, sup_norm, lip);
        Ok(WeierstrassSpec { g, alpha, b, sup_norm, lip, osc, holder_const })
    }

    pub fn g(&self) -> &PeriodicFunction {
        &self.g
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn lipschitz(&self) -> f64 {
        self.lip
    }

    pub fn oscillation(&self) -> f64 {
        self.osc
    }

    /// `b^{-α}`
    pub fn ratio(&self) -> f64 {
        libm::pow(self.b as f64, -self.alpha)
    }

    /// Certified `C_H` with `|W(x) − W(y)| ≤ C_H |x − y|^α`:
    /// `lip·b^{1−α}/(b^{1−α}−1) + 2·sup/(1−b^{-α})`.
    pub fn holder_constant(&self) -> Result<f64> {
        self.holder_const.ok_or(Error::HolderConstantUndefined)
    }

    /// Bound on `|W(x) − W(c)|` for `|x − c| ≤ r`, summing
    /// `b^{-αk} min(lip·b^k·r, osc)` over all k in closed form.
    ///
    /// Never larger than `C_H r^α` and finite also at `α = 1`.
    pub fn modulus(&self, r: f64) -> f64 {
        if r <= 0.0 || self.osc == 0.0 {
            return 0.0;
        }
        let b = self.b as f64;
        let q = self.ratio();
        let mut sum = 0.0;
        let mut weight = 1.0;
        let mut reach = self.lip * r;
        while reach < self.osc {
            sum += weight * reach;
            weight *= q;
            reach *= b;
        }
        (sum + self.osc * weight / (1.0 - q)) * (1.0 + 1e-12)
    }

    /// Least `K` with `sup·b^{-αK}/(1−b^{-α}) ≤ tol`.
    pub fn truncation_depth(&self, tol: f64) -> Result<usize> {
        truncation_depth(self.sup_norm, self.alpha, self.b, tol)
    }

    pub fn evaluator(&self, tol: f64) -> Result<Evaluator<'_>> {
        let depth = self.truncation_depth(tol)?;
        Ok(self.evaluator_with_depth(depth, tol))
    }

    /// An evaluator summing exactly `depth` terms; `tol` is recorded as is.
    pub fn evaluator_with_depth(&self, depth: usize, tol: f64) -> Evaluator<'_> {
        let q = self.ratio();
        let mut weights = Vec::with_capacity(depth);
        let mut w = 1.0;
        for _ in 0..depth {
            weights.push(w);
            w *= q;
        }
        Evaluator { spec: self, weights, tol }
    }

    /// `W(x)` within `tol`.
    pub fn eval(&self, x: f64, tol: f64) -> Result<f64> {
        Ok(self.evaluator(tol)?.eval(x))
    }
}

fn holder_formula(alpha: f64, b: u32, sup: f64, lip: f64) -> Option<f64> {
    if alpha >= 1.0 {
        return None;
    }
    let b = b as f64;
    let gain = libm::pow(b, 1.0 - alpha);
    Some(lip * gain / (gain - 1.0) + 2.0 * sup / (1.0 - libm::pow(b, -alpha)))
}

/// Least `K` with `sup·b^{-αK}/(1−b^{-α}) ≤ tol`.
pub fn truncation_depth(sup_norm: f64, alpha: f64, b: u32, tol: f64) -> Result<usize> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", "tolerance must be positive"));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain("alpha must be positive for the series to converge"));
    }
    if sup_norm == 0.0 {
        return Ok(0);
    }
    let q = libm::pow(b as f64, -alpha);
    let tail = |k: usize| sup_norm * libm::pow(q, k as f64) / (1.0 - q);
    let guess = libm::ceil(libm::log(sup_norm / ((1.0 - q) * tol)) / (alpha * libm::log(b as f64)));
    let mut k = if guess.is_finite() && guess > 0.0 { guess as usize } else { 0 };
    while k > 0 && tail(k - 1) <= tol {
        k -= 1;
    }
    while tail(k) > tol {
        k += 1;
    }
    Ok(k)
}

/// A spec paired with a fixed tolerance and its precomputed weights.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    spec: &'a WeierstrassSpec,
    weights: Vec<f64>,
    tol: f64,
}

impl<'a> Evaluator<'a> {
    pub fn spec(&self) -> &'a WeierstrassSpec {
        self.spec
    }

    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `W(x)` for a float argument, treated as the exact dyadic it encodes.
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.spec.g;
        let b = self.spec.b;
        let mut v = x - libm::floor(x);
        let mut k = 0;
        let mut sum = 0.0;
        while k < self.weights.len() && v != 0.0 && v < TINY_ARG {
            sum += self.weights[k] * g.eval_periodic(v, v);
            v *= b as f64;
            v -= libm::floor(v);
            k += 1;
        }
        if k == self.weights.len() {
            return sum;
        }
        if v == 0.0 {
            let g0 = g.eval_periodic(0.0, 0.0);
            return sum + self.weights[k..].iter().sum::<f64>() * g0;
        }
        let (mantissa, exp) = libm::frexp(v);
        // v = m · 2^{-e} with m < 2^53
        let m = libm::ldexp(mantissa, 53) as u128;
        let e = (53 - exp) as u32;
        debug_assert!(e <= 127);
        let mask = (1u128 << e) - 1;
        let den = (1u128 << e) as f64;
        let mut num = m;
        for &w in &self.weights[k..] {
            let r = num.min((mask + 1) - num);
            sum += w * g.eval_periodic(num as f64 / den, r as f64 / den);
            num = num.wrapping_mul(b as u128) & mask;
        }
        sum
    }

    /// `W(num/den)` with exact integer phases. Requires `num < den` and
    /// `den·b` to fit in 128 bits.
    pub fn eval_rational(&self, num: u128, den: u128) -> Result<f64> {
        if den == 0 || num >= den {
            return Err(Error::invalid("num", "rational point must satisfy 0 <= num < den"));
        }
        if den.checked_mul(self.spec.b as u128).is_none() {
            return Err(Error::Overflow("denominator times b exceeds 128 bits".into()));
        }
        Ok(self.eval_rational_unchecked(num, den))
    }

    #[inline]
    pub(crate) fn eval_rational_unchecked(&self, num: u128, den: u128) -> f64 {
        let g = &self.spec.g;
        let b = self.spec.b as u128;
        let mut p = num;
        let mut sum = 0.0;
        for &w in &self.weights {
            sum += w * g.eval_phase(p, den);
            p = (p * b) % den;
        }
        sum
    }

    /// `W(num / b^exponent)`.
    pub fn eval_badic(&self, num: u128, exponent: u32) -> Result<f64> {
        let den = badic_denominator(self.spec.b, exponent)?;
        self.eval_rational(num, den)
    }
}

/// `b^e` as a `u128`, provided `b^{e+1}` also fits.
pub fn badic_denominator(b: u32, exponent: u32) -> Result<u128> {
    (b as u128)
        .checked_pow(exponent)
        .filter(|d| d.checked_mul(b as u128).is_some())
        .ok_or_else(|| Error::Overflow(alloc::format!("{b}^{exponent} exceeds 128 bits")))
}

/// Largest exponent `e` with `b^{e+2}` representable, capped at 60.
pub(crate) fn sampling_exponent(b: u32) -> u32 {
    let mut e = 1;
    while e < 60 && badic_denominator(b, e + 2).is_ok() {
        e += 1;
    }
    e
}

/// Outcome of [`check_self_affinity`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SelfAffinityReport {
    pub max_residual: f64,
    pub pass: bool,
}

/// Checks `W((x+j)/b) = b^{-α} W(x) + g((x+j)/b)` for random b-adic `x` and
/// every digit `j`; passes when the worst residual is at most `3·tol`.
pub fn check_self_affinity(spec: &WeierstrassSpec, n_samples: usize, seed: u64, tol: f64) -> Result<SelfAffinityReport> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "need at least one sample"));
    }
    let ev = spec.evaluator(tol)?;
    let b = spec.b as u128;
    let e = sampling_exponent(spec.b);
    let den = badic_denominator(spec.b, e)?;
    let den_up = den * b;
    let q = spec.ratio();
    let mut rng = rng_for(seed, stream::SELF_AFFINITY, 0);
    let mut max_residual: f64 = 0.0;
    for _ in 0..n_samples {
        let n = rng.gen_range(0..den);
        let wx = ev.eval_rational_unchecked(n, den);
        for j in 0..b {
            let num = n + j * den;
            let wz = ev.eval_rational_unchecked(num, den_up);
            let gz = spec.g.eval_phase(num, den_up);
            max_residual = max_residual.max((wz - q * wx - gz).abs());
        }
    }
    Ok(SelfAffinityReport { max_residual, pass: max_residual <= 3.0 * tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcore::periodic::combine;
    use crate::funcore::Primitive;
    use alloc::vec;

    fn spec(g: PeriodicFunction, alpha: f64, b: u32) -> WeierstrassSpec {
        WeierstrassSpec::new(g, alpha, b).unwrap()
    }

    /// Plain partial sum with float phases, valid for b = 2 where doubling is exact.
    fn brute_force(g: &PeriodicFunction, alpha: f64, b: u32, x: f64, terms: usize) -> f64 {
        (0..terms)
            .map(|k| {
                let arg = x * libm::pow(b as f64, k as f64);
                libm::pow(b as f64, -alpha * k as f64) * g.eval(arg - libm::floor(arg))
            })
            .sum()
    }

    #[test]
    fn truncation_depth_examples() {
        assert_eq!(truncation_depth(1.0, 0.5, 2, 1e-8).unwrap(), 57);
        let zero = spec(PeriodicFunction::zero(), 0.5, 2);
        assert_eq!(zero.truncation_depth(1e-8).unwrap(), 0);
        assert!(truncation_depth(1.0, 0.0, 2, 1e-8).is_err());
        assert!(truncation_depth(1.0, 0.5, 2, 0.0).is_err());
    }

    #[test]
    fn truncation_depth_monotone_in_tol() {
        let mut tol = 1e-14;
        let mut prev = usize::MAX;
        while tol < 10.0 {
            let k = truncation_depth(2.5, 0.37, 3, tol).unwrap();
            assert!(k <= prev);
            prev = k;
            tol *= 2.0;
        }
    }

    #[test]
    fn zero_function_is_zero() {
        let s = spec(PeriodicFunction::zero(), 0.5, 2);
        assert_eq!(s.eval(0.37, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn cosine_at_origin_is_geometric_series() {
        let s = spec(PeriodicFunction::cosine(), 0.5, 2);
        let oracle: f64 = (0..200).map(|k| libm::pow(2.0, -0.5 * k as f64)).sum();
        let v = s.eval(0.0, 1e-12).unwrap();
        assert!((v - oracle).abs() <= 1e-11);
        assert!((v - 3.414_213_562_373_095).abs() < 1e-9);
    }

    #[test]
    fn triangle_at_half() {
        for alpha in [0.2, 0.5, 0.9, 1.0] {
            let s = spec(PeriodicFunction::triangle(), alpha, 2);
            assert!((s.eval(0.5, 1e-12).unwrap() - 0.5).abs() <= 1e-12);
        }
        let doubled = combine(&[(2.0, &PeriodicFunction::triangle())]).unwrap();
        let s = spec(doubled, 0.6, 2);
        assert!((s.eval(0.5, 1e-12).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn matches_brute_force_for_dyadic_base() {
        let g = PeriodicFunction::new(vec![(1.0, Primitive::Cosine), (0.5, Primitive::TentShift { ell: 0.25, shift: 0.3 })])
            .unwrap();
        let s = spec(g.clone(), 0.7, 2);
        let ev = s.evaluator(1e-12).unwrap();
        for i in 0..50 {
            let x = (i as f64 + 0.123) / 50.0;
            assert!((ev.eval(x) - brute_force(&g, 0.7, 2, x, 200)).abs() <= 2e-12);
        }
    }

    #[test]
    fn float_and_rational_paths_agree() {
        let s = spec(PeriodicFunction::cosine(), 0.4, 3);
        let ev = s.evaluator(1e-11).unwrap();
        for num in [0u128, 1, 5, 1000, 1023] {
            let x = num as f64 / 1024.0;
            assert!((ev.eval(x) - ev.eval_rational(num, 1024).unwrap()).abs() < 1e-12);
        }
        assert!(ev.eval_rational(5, 5).is_err());
    }

    #[test]
    fn tiny_arguments_are_continuous() {
        let s = spec(PeriodicFunction::cosine(), 0.5, 3);
        let ev = s.evaluator(1e-10).unwrap();
        let at0 = ev.eval(0.0);
        assert!((ev.eval(1e-30) - at0).abs() < 1e-6);
    }

    #[test]
    fn holder_constant_formula() {
        let s = spec(PeriodicFunction::cosine(), 0.5, 2);
        let c = s.holder_constant().unwrap();
        let expected = 2.0 * core::f64::consts::PI * libm::sqrt(2.0) / (libm::sqrt(2.0) - 1.0) + 2.0 / (1.0 - libm::pow(2.0, -0.5));
        assert!((c - expected).abs() < 1e-9);
        assert!((c - 28.28).abs() < 0.01);
        assert_eq!(spec(PeriodicFunction::zero(), 0.5, 2).holder_constant().unwrap(), 0.0);
        assert_eq!(spec(PeriodicFunction::triangle(), 1.0, 2).holder_constant(), Err(Error::HolderConstantUndefined));
    }

    #[test]
    fn modulus_is_below_holder_bound() {
        let s = spec(PeriodicFunction::cosine(), 0.3, 2);
        let c = s.holder_constant().unwrap();
        let mut r = 1.0;
        while r > 1e-12 {
            assert!(s.modulus(r) <= c * libm::pow(r, 0.3));
            r *= 0.37;
        }
    }

    #[test]
    fn self_affinity_passes_and_is_deterministic() {
        let s = spec(PeriodicFunction::cosine(), 0.7, 2);
        let a = check_self_affinity(&s, 2000, 11, 1e-10).unwrap();
        let b = check_self_affinity(&s, 2000, 11, 1e-10).unwrap();
        assert!(a.pass, "{a:?}");
        assert_eq!(a, b);
        let z = check_self_affinity(&spec(PeriodicFunction::zero(), 0.7, 2), 10, 1, 1e-10).unwrap();
        assert_eq!(z.max_residual, 0.0);
        assert!(z.pass);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WeierstrassSpec::new(PeriodicFunction::cosine(), 0.0, 2).is_err());
        assert!(WeierstrassSpec::new(PeriodicFunction::cosine(), 1.5, 2).is_err());
        assert!(WeierstrassSpec::new(PeriodicFunction::cosine(), 0.5, 1).is_err());
        assert_eq!(WeierstrassSpec::new(PeriodicFunction::raw_coordinate(), 0.5, 2).unwrap_err(), Error::NonPeriodic);
    }
}
