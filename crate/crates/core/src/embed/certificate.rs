use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::badic::{digit_count, pow, random_below, ratio_ln, signed_ratio_to_f64, BadicPoint};
use crate::error::{Error, Result};
use crate::rng::Rng;

use super::family::EmbeddingSpec;

/// Slack subtracted from relative quantities to absorb floating-point rounding
/// in the log-space arithmetic.
const ROUNDING_SLACK: f64 = 1e-12;

/// Structural checks carried by a certificate; each is decided exactly except
/// `head_sum`, which is a floating-point comparison with wide margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateChecks {
    /// `b^{-(k+ℓ₀+2)} ≤ y − x < b^{-(k+ℓ₀+1)}`
    pub bracketing: bool,
    /// `(j−1)/b^k + i/b^{k+ℓ₀+3} < x ≤ (j−1)/b^k + (i+1)/b^{k+ℓ₀+3}`
    pub i_choice: bool,
    /// both `b^k x mod 1` and `b^k y mod 1` lie on `[r_i, s_i]` (mod 1)
    pub membership: bool,
    /// `C_α < k' − k < 2C_α`
    pub k_prime_window: bool,
    /// `Σ_{k'<k} b^{(1−α)k'} < b^{(1−α)k+ℓ₀}/20`
    pub head_sum: bool,
}

impl CertificateChecks {
    pub fn all(&self) -> bool {
        self.bracketing && self.i_choice && self.membership && self.k_prime_window && self.head_sum
    }
}

/// One replay of the lower-bound chain for the pair `x < y`.
///
/// `term_main`, the three bounds, `lhs` and `rhs` are absolute values (they may
/// underflow to zero for very small separations); the `*_rel` fields carry the
/// same quantities divided by `term_main` and never underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofCertificate {
    pub x: BadicPoint,
    pub y: BadicPoint,
    pub k_xy: u32,
    pub j: BigInt,
    pub i: BigUint,
    pub k_prime: u32,
    pub term_main: f64,
    pub bound_head: f64,
    pub bound_tail: f64,
    pub bound_mid: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: bool,
    pub head_rel: f64,
    pub mid_rel: f64,
    pub tail_rel: f64,
    pub lhs_rel: f64,
    pub rhs_rel: f64,
    /// exact per-term evaluation of `W_{g_i}(y) − W_{g_i}(x)`, relative to `term_main`
    pub direct_rel: f64,
    /// `ln(y − x)`
    pub ln_gap: f64,
    pub checks: CertificateChecks,
}

impl ProofCertificate {
    /// Whether the independent direct evaluation confirms the bound.
    pub fn sound(&self) -> bool {
        !self.verdict || self.direct_rel >= self.rhs_rel
    }

    pub fn direct_difference(&self) -> f64 {
        self.direct_rel * self.term_main
    }
}

/// Exact value of `g_i(u)` as `G / (2·b^e·(b^{ℓ₀}−1))` with `e ≥ u.exponent, ℓ₀+3`.
struct ExactTent<'a> {
    emb: &'a EmbeddingSpec,
    i: &'a BigUint,
}

impl ExactTent<'_> {
    fn common_exponent(&self, u: &BadicPoint, v: &BadicPoint) -> u32 {
        u.exponent().max(v.exponent()).max(self.emb.l0() + 3)
    }

    /// `V` with `(u − r_i) mod 1 = V / b^e`.
    fn offset(&self, u: &BadicPoint, e: u32) -> BigUint {
        let b = self.emb.b();
        let modulus = pow(b, e);
        let r = self.i * pow(b, e - self.emb.l0() - 3);
        let un = u.numerator_at(e);
        if un >= r {
            un - r
        } else {
            un + &modulus - r
        }
    }

    fn on_increasing_branch(&self, v: &BigUint, e: u32) -> bool {
        v * pow(self.emb.b(), self.emb.l0()) <= pow(self.emb.b(), e)
    }

    fn scaled_value(&self, u: &BadicPoint, e: u32) -> BigInt {
        let b = self.emb.b();
        let ell_inv = BigInt::from(pow(b, self.emb.l0()));
        let be = BigInt::from(pow(b, e));
        let v = self.offset(u, e);
        let inc = self.on_increasing_branch(&v, e);
        let v = BigInt::from(v);
        let one = BigInt::one();
        if inc {
            -(&be * (&ell_inv - &one)) + 2 * &ell_inv * v * (&ell_inv - &one)
        } else {
            &be * (&ell_inv - &one) - 2 * (v * &ell_inv - &be)
        }
    }

    fn denominator(&self, e: u32) -> BigUint {
        let b = self.emb.b();
        BigUint::from(2u32) * pow(b, e) * (pow(b, self.emb.l0()) - 1u32)
    }

    /// `g_i(v) − g_i(u)` exactly, rounded to f64.
    fn difference(&self, u: &BadicPoint, v: &BadicPoint) -> f64 {
        let e = self.common_exponent(u, v);
        let num = self.scaled_value(v, e) - self.scaled_value(u, e);
        signed_ratio_to_f64(&num, &self.denominator(e))
    }
}

/// Exact `g_i(u)` for a b-adic `u` (used to cross-check the float evaluator).
pub fn tent_value_exact(emb: &EmbeddingSpec, i: &BigUint, u: &BadicPoint) -> f64 {
    let t = ExactTent { emb, i };
    let e = t.common_exponent(u, u);
    signed_ratio_to_f64(&t.scaled_value(u, e), &t.denominator(e))
}

/// Replays the chain of estimates for `W_{g_i}(y) − W_{g_i}(x)` on an exact pair.
pub fn proof_certificate(emb: &EmbeddingSpec, x: &BadicPoint, y: &BadicPoint) -> Result<ProofCertificate> {
    let b = emb.b();
    if x.base() != b || y.base() != b {
        return Err(Error::invalid("x", "points must be written in the embedding base"));
    }
    if x == y || x.partial_cmp(y) == Some(core::cmp::Ordering::Equal) {
        return Err(Error::DegeneratePair);
    }
    if x > y {
        return Err(Error::invalid("x", "certificates need x < y"));
    }
    let l0 = emb.l0();
    let alpha = emb.alpha();
    let (gap_signed, e) = y.sub(x);
    let gap = gap_signed.magnitude().clone();
    // gap < b^{-l0-1}  <=>  gap·b^{l0+1} < b^e
    if &gap * pow(b, l0 + 1) >= pow(b, e) {
        return Err(Error::PairTooFar);
    }
    let gap_digits = digit_count(&gap, b);
    let k = e - gap_digits - l0 - 1;

    let be = pow(b, e);
    let bracketing = &gap * pow(b, k + l0 + 2) >= be && &gap * pow(b, k + l0 + 1) < be;

    // j = ceil(b^k x), lifted = b^k x − (j − 1) ∈ (0, 1]
    let xn = x.numerator_at(e);
    let scaled = &xn * pow(b, k);
    let (q, r) = scaled.div_rem(&be);
    let j = BigInt::from(if r.is_zero() { q } else { q + 1u32 });
    let j_minus_one = &j - BigInt::one();
    let be_i = BigInt::from(be.clone());
    let lifted = BigInt::from(scaled) - &j_minus_one * &be_i;
    let grid = l0 + 3;
    let lifted = lifted.to_biguint().expect("lifted point is positive");
    let (qi, ri) = (&lifted * pow(b, grid)).div_rem(&be);
    let i_plus_one = if ri.is_zero() { qi } else { qi + 1u32 };
    let i = &i_plus_one - 1u32;
    // the half-open condition, decided on the common denominator b^{k+grid+e}
    let base_cell = &j_minus_one * BigInt::from(pow(b, grid)) + BigInt::from(i.clone());
    let lo = &base_cell * &be_i;
    let hi = (&base_cell + BigInt::one()) * &be_i;
    let xs = BigInt::from(&xn * pow(b, k + grid));
    let i_choice = lo < xs && xs <= hi && i < emb.tent_count();

    let tent = ExactTent { emb, i: &i };
    let xk = x.shift(k);
    let yk = y.shift(k);
    let ek = tent.common_exponent(&xk, &yk);
    let membership = tent.on_increasing_branch(&tent.offset(&xk, ek), ek)
        && tent.on_increasing_branch(&tent.offset(&yk, ek), ek);

    let delta = emb.k_prime_offset();
    let k_prime = k + delta;
    let c = emb.c_alpha();
    let k_prime_window = c < delta as f64 && (delta as f64) < 2.0 * c;

    let lnb = libm::log(b as f64);
    let ln_gap = ratio_ln(&gap, &be);
    let ln_main = ((1.0 - alpha) * k as f64 + l0 as f64) * lnb + ln_gap;
    let rel = |kk: u32| libm::exp((1.0 - alpha) * (kk as f64 - k as f64) * lnb - l0 as f64 * lnb);
    let head_sum_rel: f64 = (0..k).map(rel).sum();
    let head_sum = head_sum_rel < 1.0 / 20.0;
    let head_rel = -2.0 * head_sum_rel;
    let mid_rel = -2.0 * (k + 1..=k_prime).map(rel).sum::<f64>();
    let ln_tail = -alpha * (k_prime + 1) as f64 * lnb - libm::log(1.0 - libm::exp(-alpha * lnb));
    let tail_rel = libm::exp(ln_tail - ln_main);
    let lhs_rel = 1.0 + head_rel + mid_rel - tail_rel - ROUNDING_SLACK;
    let ln_rhs = libm::log(0.7) + (alpha * l0 as f64 - 2.0 * (1.0 - alpha)) * lnb + alpha * ln_gap;
    let rhs_rel = libm::exp(ln_rhs - ln_main);

    let checks = CertificateChecks { bracketing, i_choice, membership, k_prime_window, head_sum };
    let verdict = checks.all() && lhs_rel >= rhs_rel;

    // b^k x mod 1 vanishes once k reaches the exponent, so this sum is finite
    let mut direct_rel = 0.0;
    let last = x.exponent().max(y.exponent());
    for kk in 0..last {
        let d = tent.difference(&x.shift(kk), &y.shift(kk));
        if d != 0.0 {
            direct_rel += d * libm::exp(-alpha * kk as f64 * lnb - ln_main);
        }
    }

    let main = libm::exp(ln_main);
    Ok(ProofCertificate {
        x: x.clone(),
        y: y.clone(),
        k_xy: k,
        j,
        i,
        k_prime,
        term_main: main,
        bound_head: head_rel * main,
        bound_tail: tail_rel * main,
        bound_mid: mid_rel * main,
        lhs: lhs_rel * main,
        rhs: libm::exp(ln_rhs),
        verdict,
        head_rel,
        mid_rel,
        tail_rel,
        lhs_rel,
        rhs_rel,
        direct_rel,
        ln_gap,
        checks,
    })
}

/// A random pair `x < y` with `y − x` in the bracket of scale `k` for a `k`
/// drawn uniformly from `0..=max_k`; both points carry `extra_digits` digits
/// below the bracket. Always satisfies the certificate's distance precondition.
pub fn random_pair(emb: &EmbeddingSpec, rng: &mut Rng, max_k: u32, extra_digits: u32) -> (BadicPoint, BadicPoint) {
    use rand::Rng as _;
    let b = emb.b();
    let k = rng.gen_range(0..=max_k);
    let e = k + emb.l0() + 2 + extra_digits;
    let lo = pow(b, extra_digits);
    let hi = pow(b, extra_digits + 1);
    let gap = &lo + random_below(rng, &(&hi - &lo), b);
    let room = pow(b, e) - &gap;
    let xn = random_below(rng, &room, b);
    let x = BadicPoint::new(xn, e, b).expect("x below 1 - gap");
    let y = x.add_offset(&gap, e).expect("y below 1");
    (x, y)
}
