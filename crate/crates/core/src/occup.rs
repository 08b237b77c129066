//! Occupation measures `λ = W_* L¹` on the value axis, their Fourier
//! transforms and the truncated L² energy `∫_{-Ξ}^{Ξ} |λ̂|²`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::funcore::WeierstrassSpec;
use crate::rng::{rng_for, stream, Rng};

pub const DEFAULT_BINS: usize = 256;
pub const DEFAULT_SAMPLES: usize = 1 << 20;

/// A histogram of a pushforward of Lebesgue measure on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OccupationEstimate {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub masses: Vec<f64>,
    pub density: Vec<f64>,
    pub n_samples: usize,
    /// smallest and largest sampled value
    pub y_min: f64,
    pub y_max: f64,
}

impl OccupationEstimate {
    /// Bins `values` on `n_bins` equal cells of `[lo, hi]`; values outside are
    /// clamped into the end bins.
    pub fn from_values(values: &[f64], lo: f64, hi: f64, n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::invalid("n_bins", "must be >= 1"));
        }
        if values.is_empty() {
            return Err(Error::invalid("n_samples", "must be >= 1"));
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::invalid("range", "need finite lo < hi"));
        }
        let width = (hi - lo) / n_bins as f64;
        let mut counts = alloc::vec![0u64; n_bins];
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in values {
            let idx = libm::floor((v - lo) / width);
            let idx = if idx < 0.0 { 0 } else { (idx as usize).min(n_bins - 1) };
            counts[idx] += 1;
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
        Ok(Self::from_counts(counts, lo, width, values.len(), y_min, y_max))
    }

    fn from_counts(counts: Vec<u64>, lo: f64, width: f64, n: usize, y_min: f64, y_max: f64) -> Self {
        let n_bins = counts.len();
        let bin_edges = (0..=n_bins).map(|k| lo + k as f64 * width).collect();
        let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let density = masses.iter().map(|m| m / width).collect();
        OccupationEstimate { bin_edges, counts, masses, density, n_samples: n, y_min, y_max }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        0.5 * (self.bin_edges[k] + self.bin_edges[k + 1])
    }

    /// Merges each run of `factor` adjacent bins (`factor` must divide the bin count).
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n_bins().is_multiple_of(factor) {
            return Err(Error::invalid("factor", "must divide the number of bins"));
        }
        let counts = self.counts.chunks(factor).map(|c| c.iter().sum()).collect();
        let width = self.bin_width() * factor as f64;
        Ok(Self::from_counts(counts, self.bin_edges[0], width, self.n_samples, self.y_min, self.y_max))
    }

    /// `Σ mass·center`
    pub fn mean(&self) -> f64 {
        (0..self.n_bins()).map(|k| self.masses[k] * self.bin_center(k)).sum()
    }

    /// `Σ mass·e^{iξ·center}`
    pub fn fourier(&self, xi: f64) -> Complex64 {
        (0..self.n_bins()).map(|k| Complex64::from_polar(self.masses[k], xi * self.bin_center(k))).sum()
    }

    /// Inverse of the piecewise-linear CDF.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let mut acc = 0.0;
        for k in 0..self.n_bins() {
            let m = self.masses[k];
            if m > 0.0 && acc + m >= q {
                let frac = ((q - acc) / m).clamp(0.0, 1.0);
                return self.bin_edges[k] + frac * self.bin_width();
            }
            acc += m;
        }
        self.bin_edges[self.n_bins()]
    }

    /// `count` mass-weighted levels, skipping `exclude/2` of the mass at each end.
    pub fn sample_levels(&self, count: usize, exclude: f64, rng: &mut Rng) -> Vec<f64> {
        let half = 0.5 * exclude.clamp(0.0, 1.0);
        (0..count).map(|_| self.quantile(rng.gen_range(half..=1.0 - half))).collect()
    }
}

/// A sampled Fourier transform `ξ ↦ λ̂(ξ)` on `[0, ξ_max]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourierCurve {
    pub xi_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub quadrature_error_bound: f64,
}

impl FourierCurve {
    pub fn xi_max(&self) -> f64 {
        *self.xi_grid.last().expect("nonempty grid")
    }
}

/// `W(u_i)` at one jittered point per cell of the uniform `n`-partition.
pub fn stratified_values(spec: &WeierstrassSpec, n_samples: usize, seed: u64, tol: f64) -> Result<Vec<f64>> {
    let ev = spec.evaluator(tol)?;
    Ok(stratified_points(n_samples, seed).map(|u| ev.eval(u)).collect())
}

fn stratified_points(n: usize, seed: u64) -> impl Iterator<Item = f64> {
    let mut rng = rng_for(seed, stream::HISTOGRAM, 0);
    (0..n).map(move |i| {
        let u = (i as f64 + rng.gen::<f64>()) / n as f64;
        // keep u < 1
        if u >= 1.0 {
            (i as f64) / n as f64
        } else {
            u
        }
    })
}

/// `[min − w, max + w]` split into `n_bins` cells of width `w`.
fn padded_range(values: &[f64], n_bins: usize) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    let w = if spread > 0.0 && n_bins > 2 {
        spread / (n_bins - 2) as f64
    } else if spread > 0.0 {
        spread
    } else {
        1.0 / n_bins as f64
    };
    (lo - w, lo - w + n_bins as f64 * w)
}

fn check_sizes(n_samples: usize, n_bins: usize) -> Result<()> {
    if n_bins == 0 {
        return Err(Error::invalid("n_bins", "must be >= 1"));
    }
    if n_samples < n_bins {
        return Err(Error::invalid("n_samples", "must be >= n_bins"));
    }
    Ok(())
}

/// Histogram of `W(u)` over stratified `u ∈ [0, 1)`.
pub fn occupation_histogram(
    spec: &WeierstrassSpec,
    n_samples: usize,
    n_bins: usize,
    seed: u64,
    tol: f64,
) -> Result<OccupationEstimate> {
    check_sizes(n_samples, n_bins)?;
    let values = stratified_values(spec, n_samples, seed, tol)?;
    let (lo, hi) = padded_range(&values, n_bins);
    OccupationEstimate::from_values(&values, lo, hi, n_bins)
}

/// Histogram of `u cos θ + W(u) sin θ` over the same stratified `u`.
pub fn oblique_occupation(
    spec: &WeierstrassSpec,
    theta: f64,
    n_samples: usize,
    n_bins: usize,
    seed: u64,
    tol: f64,
) -> Result<OccupationEstimate> {
    if !(0.0..2.0 * core::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid("theta", "must lie in [0, 2π)"));
    }
    check_sizes(n_samples, n_bins)?;
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let (c, s) = (snap(libm::cos(theta)), snap(libm::sin(theta)));
    let ev = spec.evaluator(tol)?;
    let values: Vec<f64> = stratified_points(n_samples, seed)
        .map(|u| {
            let w = if s != 0.0 { ev.eval(u) } else { 0.0 };
            u * c + w * s
        })
        .collect();
    let (lo, hi) = padded_range(&values, n_bins);
    OccupationEstimate::from_values(&values, lo, hi, n_bins)
}

/// Midpoint quadrature of `∫₀¹ e^{iξW(u)} du` on `n_xi` equispaced `ξ ∈ [0, ξ_max]`.
///
/// The recorded bound is `ξ_max·(C_H·n^{-α} + tol)`; at `α = 1` the
/// Hölder constant is replaced by the modulus `ω(1/(2n))`.
pub fn empirical_fourier(
    spec: &WeierstrassSpec,
    xi_max: f64,
    n_xi: usize,
    n_samples: usize,
    tol: f64,
) -> Result<FourierCurve> {
    if n_xi < 2 {
        return Err(Error::invalid("n_xi", "must be >= 2"));
    }
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", "must be >= 2"));
    }
    if !(xi_max.is_finite() && xi_max > 0.0) {
        return Err(Error::invalid("xi_max", "must be positive"));
    }
    let ev = spec.evaluator(tol)?;
    let w: Vec<f64> = (0..n_samples).map(|j| ev.eval((j as f64 + 0.5) / n_samples as f64)).collect();
    let xi_grid: Vec<f64> = (0..n_xi).map(|k| xi_max * k as f64 / (n_xi - 1) as f64).collect();
    let (re, im) = phase_sums(&w, xi_max / (n_xi - 1) as f64, n_xi);
    let inv_n = 1.0 / n_samples as f64;
    let mut values: Vec<Complex64> = re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r * inv_n, i * inv_n)).collect();
    values[0] = Complex64::new(1.0, 0.0);
    let spread = match spec.holder_constant() {
        Ok(c) => c * libm::pow(n_samples as f64, -spec.alpha()),
        Err(_) => spec.modulus(0.5 * inv_n),
    };
    Ok(FourierCurve { xi_grid, values, quadrature_error_bound: xi_max * (spread + tol) })
}

/// Steps between exact re-anchoring of the power recurrence.
const PHASE_BLOCK: usize = 64;

/// `Σ_j e^{i k Δ w_j}` for `k = 0..n_xi`, by multiplying by `e^{iΔ w_j}` and
/// re-anchoring with `sincos` every [`PHASE_BLOCK`] steps. Four samples are
/// advanced together.
fn phase_sums(w: &[f64], dxi: f64, n_xi: usize) -> (Vec<f64>, Vec<f64>) {
    let mut re = alloc::vec![0.0; n_xi];
    let mut im = alloc::vec![0.0; n_xi];
    for chunk in w.chunks(4) {
        let mut step_re = [0.0; 4];
        let mut step_im = [0.0; 4];
        for (l, &v) in chunk.iter().enumerate() {
            (step_im[l], step_re[l]) = libm::sincos(dxi * v);
        }
        let mut k0 = 0;
        while k0 < n_xi {
            let k1 = (k0 + PHASE_BLOCK).min(n_xi);
            let mut pr = [0.0; 4];
            let mut pi = [0.0; 4];
            for (l, &v) in chunk.iter().enumerate() {
                (pi[l], pr[l]) = libm::sincos(k0 as f64 * dxi * v);
            }
            for k in k0..k1 {
                let (mut ar, mut ai) = (0.0, 0.0);
                for l in 0..4 {
                    ar += pr[l];
                    ai += pi[l];
                    let next = pr[l] * step_re[l] - pi[l] * step_im[l];
                    pi[l] = pr[l] * step_im[l] + pi[l] * step_re[l];
                    pr[l] = next;
                }
                re[k] += ar;
                im[k] += ai;
            }
            k0 = k1;
        }
    }
    (re, im)
}

/// `E(Ξ) = ∫_{-Ξ}^{Ξ} |λ̂|²`, trapezoid rule on the curve's grid, using
/// `λ̂(−ξ) = conj λ̂(ξ)`; a cutoff between grid points closes with a partial
/// trapezoid on the linear interpolant of `|λ̂|²`.
pub fn l2_energy(curve: &FourierCurve, xi_cutoffs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let xi_max = curve.xi_max();
    if xi_cutoffs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("xi_cutoffs", "must be sorted"));
    }
    let power: Vec<f64> = curve.values.iter().map(|v| v.norm_sqr()).collect();
    let grid = &curve.xi_grid;
    let mut out = Vec::with_capacity(xi_cutoffs.len());
    let mut acc = 0.0;
    let mut k = 0;
    for &cut in xi_cutoffs {
        if !(cut >= 0.0) || cut > xi_max * (1.0 + 1e-12) {
            return Err(Error::CutoffBeyondGrid { cutoff: cut, xi_max });
        }
        let cut = cut.min(xi_max);
        while k + 1 < grid.len() && grid[k + 1] <= cut {
            acc += 0.5 * (power[k] + power[k + 1]) * (grid[k + 1] - grid[k]);
            k += 1;
        }
        let mut e = acc;
        if k + 1 < grid.len() && cut > grid[k] {
            let h = cut - grid[k];
            let frac = h / (grid[k + 1] - grid[k]);
            let p_cut = power[k] + frac * (power[k + 1] - power[k]);
            e += 0.5 * (power[k] + p_cut) * h;
        }
        out.push((cut, 2.0 * e));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcore::PeriodicFunction;

    fn spec(g: PeriodicFunction, alpha: f64) -> WeierstrassSpec {
        WeierstrassSpec::new(g, alpha, 2).unwrap()
    }

    #[test]
    fn zero_function_is_a_dirac() {
        let s = spec(PeriodicFunction::zero(), 0.5);
        let h = occupation_histogram(&s, 1000, 16, 1, 1e-10).unwrap();
        let full: Vec<usize> = (0..16).filter(|&k| h.counts[k] > 0).collect();
        assert_eq!(full.len(), 1);
        let k = full[0];
        assert!(h.bin_edges[k] <= 0.0 && 0.0 < h.bin_edges[k + 1]);
        assert_eq!(h.masses[k], 1.0);
        let f = empirical_fourier(&s, 10.0, 11, 64, 1e-10).unwrap();
        assert!(f.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let e = l2_energy(&f, &[0.0, 2.5, 5.0, 10.0]).unwrap();
        for (xi, en) in e {
            assert!((en - 2.0 * xi).abs() < 1e-12);
        }
    }

    #[test]
    fn masses_sum_to_one_and_refine_exactly() {
        let s = spec(PeriodicFunction::cosine(), 0.6);
        let values = stratified_values(&s, 4096, 3, 1e-10).unwrap();
        let coarse = occupation_histogram(&s, 4096, 32, 3, 1e-10).unwrap();
        assert!((coarse.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(coarse.density.iter().all(|&d| d >= 0.0));
        let (lo, hi) = (coarse.bin_edges[0], coarse.bin_edges[32]);
        let fine = OccupationEstimate::from_values(&values, lo, hi, 64).unwrap();
        assert_eq!(fine.coarsen(2).unwrap().counts, coarse.counts);
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        assert!((coarse.mean() - mean).abs() <= coarse.bin_width() + 1e-10);
    }

    #[test]
    fn takagi_maximum() {
        let s = spec(PeriodicFunction::triangle(), 1.0);
        let h = occupation_histogram(&s, 1 << 16, 64, 7, 1e-12).unwrap();
        assert!((h.y_max - 2.0 / 3.0).abs() < 1e-3);
        assert!(h.y_min >= 0.0);
    }

    #[test]
    fn fourier_normalization_and_modulus() {
        let s = spec(PeriodicFunction::cosine(), 0.5);
        let f = empirical_fourier(&s, 50.0, 51, 2048, 1e-10).unwrap();
        assert_eq!(f.values[0], Complex64::new(1.0, 0.0));
        assert!(f.values.iter().all(|v| v.norm() <= 1.0 + f.quadrature_error_bound));
        let e = l2_energy(&f, &[5.0, 12.5, 25.0, 50.0]).unwrap();
        assert!(e.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(matches!(l2_energy(&f, &[60.0]), Err(Error::CutoffBeyondGrid { .. })));
    }

    #[test]
    fn phase_recurrence_matches_direct_sum() {
        let s = spec(PeriodicFunction::triangle(), 0.4);
        let n = 1003;
        let f = empirical_fourier(&s, 800.0, 1601, n, 1e-10).unwrap();
        let ev = s.evaluator(1e-10).unwrap();
        let w: Vec<f64> = (0..n).map(|j| ev.eval((j as f64 + 0.5) / n as f64)).collect();
        for k in [1usize, 63, 64, 65, 700, 1600] {
            let xi = f.xi_grid[k];
            let direct = w.iter().map(|&v| Complex64::new(libm::cos(xi * v), libm::sin(xi * v))).sum::<Complex64>() / n as f64;
            assert!((direct - f.values[k]).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn histogram_fourier_consistency() {
        let s = spec(PeriodicFunction::cosine(), 0.7);
        let n = 1 << 14;
        let h = occupation_histogram(&s, n, 512, 5, 1e-10).unwrap();
        let f = empirical_fourier(&s, 20.0, 21, n, 1e-10).unwrap();
        for (xi, v) in f.xi_grid.iter().zip(&f.values) {
            let diff = (h.fourier(*xi) - v).norm();
            assert!(diff <= f.quadrature_error_bound + xi * h.bin_width(), "xi={xi}: {diff}");
        }
    }

    #[test]
    fn oblique_special_angles() {
        let s = spec(PeriodicFunction::cosine(), 0.7);
        let n = 1 << 14;
        let flat = oblique_occupation(&s, 0.0, n, 66, 2, 1e-10).unwrap();
        let per_bin = n as f64 / 64.0;
        for k in 0..66 {
            let c = flat.bin_center(k);
            if flat.bin_edges[k] >= 0.0 && flat.bin_edges[k + 1] <= 1.0 {
                assert!((flat.density[k] - 1.0).abs() <= 2.0 / libm::sqrt(per_bin), "bin {k} at {c}");
            }
        }
        let a = oblique_occupation(&s, core::f64::consts::FRAC_PI_2, n, 64, 2, 1e-10).unwrap();
        let b = occupation_histogram(&s, n, 64, 2, 1e-10).unwrap();
        assert_eq!(a, b);
        assert!(oblique_occupation(&s, 7.0, n, 64, 2, 1e-10).is_err());
    }

    #[test]
    fn level_sampling_avoids_the_tails() {
        let s = spec(PeriodicFunction::cosine(), 0.7);
        let h = occupation_histogram(&s, 1 << 12, 64, 2, 1e-10).unwrap();
        let mut rng = rng_for(1, stream::LEVEL_Y, 0);
        let ys = h.sample_levels(100, 0.02, &mut rng);
        let (lo, hi) = (h.quantile(0.01), h.quantile(0.99));
        assert!(ys.iter().all(|&y| y >= lo - 1e-12 && y <= hi + 1e-12));
    }
}
