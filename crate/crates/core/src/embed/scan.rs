use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::funcore::{PeriodicFunction, WeierstrassSpec};
use crate::rng::{rng_for, stream};

use super::family::EmbeddingSpec;

/// Largest grid (points per unit) a scan will materialize.
const MAX_GRID_POINTS: u64 = 1 << 22;

/// Default pair budget per scale before switching to a seeded subsample.
pub const DEFAULT_PAIR_CAP: u64 = 10_000_000;

/// Distance on the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    /// `|x − y|` on `[0, 1]`
    #[default]
    Euclidean,
    /// `min(|x − y|, 1 − |x − y|)` on `ℝ/ℤ`
    Circle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Coordinate indices to use; `None` means all of them.
    pub coords: Option<Vec<u64>>,
    pub tol: f64,
    pub metric: Metric,
    pub seed: u64,
    pub pair_cap: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { coords: None, tol: 1e-10, metric: Metric::Euclidean, seed: 0, pair_cap: DEFAULT_PAIR_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaleExtrema {
    pub scale: u32,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pairs: u64,
    pub sampled: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: (f64, f64),
    pub argmax: (f64, f64),
    pub per_scale: Vec<ScaleExtrema>,
    pub c1_estimate: f64,
    pub c2_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOptions {
    pub tol: f64,
    /// Pairs with `|p − q| ≤ band` grid cells are skipped.
    pub band: u64,
    pub metric: Metric,
    pub seed: u64,
    pub pair_cap: u64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { tol: 1e-10, band: 0, metric: Metric::Euclidean, seed: 0, pair_cap: DEFAULT_PAIR_CAP }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WitnessReport {
    pub min_offdiag_ratio: f64,
    pub arg_pair: (f64, f64),
    /// `(m, minimum at resolution b^{-m})`
    pub decay_trend: Vec<(u32, f64)>,
}

/// `f(n / N)` for `n = 0..count`, exact rational phases for periodic `f`.
fn grid_values(f: &PeriodicFunction, alpha: f64, b: u32, n_grid: u128, count: u128, tol: f64) -> Result<Vec<f64>> {
    if !f.is_periodic() {
        return Ok((0..count).map(|n| n as f64 / n_grid as f64).collect());
    }
    let spec = WeierstrassSpec::new(f.clone(), alpha, b)?;
    let ev = spec.evaluator(tol)?;
    (0..count).map(|n| ev.eval_rational(n % n_grid, n_grid)).collect()
}

fn grid_size(b: u32, m: u32) -> Result<u128> {
    let n = (b as u128).checked_pow(m).filter(|&n| n <= MAX_GRID_POINTS as u128);
    n.ok_or_else(|| Error::invalid("scales", alloc::format!("{b}^{m} grid points exceed the scan limit")))
}

/// Visits pairs `(p, p + h)` for `h ∈ [h_lo, h_hi]`, every pair when the
/// total fits in `cap`, otherwise `cap` uniformly drawn pairs. With `wrap`,
/// `p` ranges over all `n` points and `p + h` is taken mod `n`; otherwise
/// `p + h < n`. Returns `(pairs visited, sampled?)`.
fn visit_pairs(
    n: u64,
    h_lo: u64,
    h_hi: u64,
    wrap: bool,
    cap: u64,
    seed: (u64, u64),
    mut visit: impl FnMut(usize, usize, u64),
) -> (u64, bool) {
    if h_lo > h_hi || h_lo >= n {
        return (0, false);
    }
    let h_hi = h_hi.min(n - 1);
    let total: u64 = if wrap { n * (h_hi - h_lo + 1) } else { (h_lo..=h_hi).map(|h| n - h).sum() };
    if total <= cap {
        for h in h_lo..=h_hi {
            let upper = if wrap { n } else { n - h };
            for p in 0..upper {
                visit(p as usize, ((p + h) % n) as usize, h);
            }
        }
        return (total, false);
    }
    let mut rng = rng_for(seed.0, stream::SCAN, seed.1);
    let mut done = 0;
    while done < cap {
        let p = rng.gen_range(0..n);
        let h = rng.gen_range(h_lo..=h_hi);
        if !wrap && p + h >= n {
            continue;
        }
        visit(p as usize, ((p + h) % n) as usize, h);
        done += 1;
    }
    (cap, true)
}

fn sup_difference(values: &[Vec<f64>], p: usize, q: usize) -> f64 {
    values.iter().fold(0.0, |acc: f64, v| acc.max((v[q] - v[p]).abs()))
}

struct Extremes {
    min: f64,
    max: f64,
    argmin: (f64, f64),
    argmax: (f64, f64),
}

impl Extremes {
    fn new() -> Self {
        Extremes { min: f64::INFINITY, max: 0.0, argmin: (0.0, 0.0), argmax: (0.0, 0.0) }
    }

    fn push(&mut self, ratio: f64, pair: (f64, f64)) {
        if ratio < self.min {
            self.min = ratio;
            self.argmin = pair;
        }
        if ratio > self.max {
            self.max = ratio;
            self.argmax = pair;
        }
    }
}

/// Bi-Hölder ratios of an explicit coordinate family (raw coordinates allowed).
pub fn biholder_scan_family(
    family: &[PeriodicFunction],
    alpha: f64,
    b: u32,
    scales: &[u32],
    opts: &ScanOptions,
) -> Result<ScanReport> {
    if scales.is_empty() {
        return Err(Error::invalid("scales", "at least one scale is required"));
    }
    if family.is_empty() {
        return Err(Error::invalid("coords", "at least one coordinate is required"));
    }
    let finest = *scales.iter().max().expect("nonempty");
    if scales.contains(&0) {
        return Err(Error::invalid("scales", "scales must be >= 1"));
    }
    let n_fine = grid_size(b, finest)?;
    let values = family
        .iter()
        .map(|f| grid_values(f, alpha, b, n_fine, n_fine + 1, opts.tol))
        .collect::<Result<Vec<_>>>()?;

    let mut overall = Extremes::new();
    let mut per_scale = Vec::with_capacity(scales.len());
    for (idx, &m) in scales.iter().enumerate() {
        let n_m = (b as u64).pow(m);
        let stride = (n_fine as u64 / n_m) as usize;
        let h_max = n_m / b as u64;
        let wrap = opts.metric == Metric::Circle;
        let points = if wrap { n_m } else { n_m + 1 };
        let weights: Vec<f64> =
            (0..=h_max).map(|h| libm::pow(h as f64 / n_m as f64, -alpha)).collect();
        let mut local = Extremes::new();
        let (pairs, sampled) = visit_pairs(points, 1, h_max, wrap, opts.pair_cap, (opts.seed, idx as u64), |p, q, h| {
            let r = sup_difference(&values, p * stride, q * stride) * weights[h as usize];
            let (a, c) = (p.min(q), p.max(q));
            local.push(r, (a as f64 / n_m as f64, c as f64 / n_m as f64));
        });
        if pairs == 0 {
            continue;
        }
        per_scale.push(ScaleExtrema { scale: m, min_ratio: local.min, max_ratio: local.max, pairs, sampled });
        overall.push(local.min, local.argmin);
        overall.push(local.max, local.argmax);
    }
    if per_scale.is_empty() {
        return Err(Error::invalid("scales", "no pairs at the requested scales"));
    }
    Ok(ScanReport {
        min_ratio: overall.min,
        max_ratio: overall.max,
        argmin: overall.argmin,
        argmax: overall.argmax,
        per_scale,
        c1_estimate: overall.min,
        c2_estimate: overall.max,
    })
}

/// Empirical `c₁, c₂` of the embedding over b-adic grids, ℓ∞ norm.
pub fn biholder_scan(emb: &EmbeddingSpec, scales: &[u32], opts: &ScanOptions) -> Result<ScanReport> {
    if !emb.is_dense() {
        return Err(Error::FamilyTooLarge);
    }
    let d = emb.d_u64().expect("dense family");
    let family = match &opts.coords {
        Some(idx) => idx.iter().map(|&i| emb.coordinate(i)).collect::<Result<Vec<_>>>()?,
        None => (0..d).map(|i| emb.coordinate(i)).collect::<Result<Vec<_>>>()?,
    };
    biholder_scan_family(&family, emb.alpha(), emb.b(), scales, opts)
}

/// Smallest off-diagonal `max_i |W_{g_i}(x) − W_{g_i}(y)| / |x − y|^α` on the
/// grids `b^{-4}, …, b^{-grid_m}` of `[0, 1)`.
pub fn witness_search(
    family: &[PeriodicFunction],
    alpha: f64,
    b: u32,
    grid_m: u32,
    opts: &WitnessOptions,
) -> Result<WitnessReport> {
    if grid_m < 4 {
        return Err(Error::invalid("grid_m", "must be >= 4"));
    }
    if family.is_empty() {
        return Err(Error::invalid("family", "at least one function is required"));
    }
    let n_fine = grid_size(b, grid_m)?;
    let values = family
        .iter()
        .map(|f| grid_values(f, alpha, b, n_fine, n_fine, opts.tol))
        .collect::<Result<Vec<_>>>()?;

    let mut overall = Extremes::new();
    let mut decay_trend = Vec::new();
    for m in 4..=grid_m {
        let n_m = (b as u64).pow(m);
        let stride = (n_fine as u64 / n_m) as usize;
        let wrap = opts.metric == Metric::Circle;
        let h_hi = if wrap { n_m / 2 } else { n_m - 1 };
        let mut local = Extremes::new();
        let (pairs, _) =
            visit_pairs(n_m, opts.band + 1, h_hi, wrap, opts.pair_cap, (opts.seed, m as u64), |p, q, h| {
                let dist = h as f64 / n_m as f64;
                let r = sup_difference(&values, p * stride, q * stride) / libm::pow(dist, alpha);
                let (a, c) = (p.min(q), p.max(q));
                local.push(r, (a as f64 / n_m as f64, c as f64 / n_m as f64));
            });
        if pairs == 0 {
            continue;
        }
        decay_trend.push((m, local.min));
        overall.push(local.min, local.argmin);
    }
    Ok(WitnessReport { min_offdiag_ratio: overall.min, arg_pair: overall.argmin, decay_trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::build_family;

    #[test]
    fn raw_coordinate_scan() {
        let family = [PeriodicFunction::raw_coordinate()];
        for m in [6u32, 10] {
            let r = biholder_scan_family(&family, 0.5, 2, &[m], &ScanOptions::default()).unwrap();
            let expected = libm::pow(2.0, -(m as f64) / 2.0);
            assert!((r.min_ratio - expected).abs() < 1e-12);
            assert!((r.max_ratio - libm::pow(0.5, 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn theoretical_family_is_rejected() {
        let emb = build_family(0.5, 2, None).unwrap();
        assert_eq!(biholder_scan(&emb, &[4], &ScanOptions::default()).unwrap_err(), Error::FamilyTooLarge);
    }

    #[test]
    fn subsampling_is_deterministic() {
        let emb = build_family(0.7, 2, Some(2)).unwrap();
        let opts = ScanOptions { pair_cap: 500, seed: 9, ..ScanOptions::default() };
        let a = biholder_scan(&emb, &[6, 7], &opts).unwrap();
        let b = biholder_scan(&emb, &[6, 7], &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.per_scale.iter().all(|s| s.sampled && s.pairs == 500));
    }

    #[test]
    fn cosine_witness_is_exact_zero() {
        let r = witness_search(&[PeriodicFunction::cosine()], 0.6, 3, 5, &WitnessOptions::default()).unwrap();
        assert_eq!(r.min_offdiag_ratio, 0.0);
        assert!((r.arg_pair.0 + r.arg_pair.1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_metric_wraps() {
        let f = [PeriodicFunction::triangle()];
        let opts = ScanOptions { metric: Metric::Circle, ..ScanOptions::default() };
        let r = biholder_scan_family(&f, 0.5, 2, &[5], &opts).unwrap();
        assert_eq!(r.per_scale[0].pairs, 32 * 16);
        assert!(r.min_ratio.is_finite());
    }
}
