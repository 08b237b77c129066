//! Certified box counting for level sets `W^{-1}({y})` and graphs, level
//! point extraction, discrete Riesz energies and log-log regression.
//!
//! An interval `I` of side `δ` with center `c` is discarded only when
//! `|W(c) − y| > ω(δ/2) + tol`, where `ω` is the certified modulus of
//! [`WeierstrassSpec::modulus`]. Counts are therefore supersets of the true
//! box counts.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::funcore::{Evaluator, WeierstrassSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxCountRecord {
    pub m: u32,
    pub box_side: f64,
    pub count: u64,
    pub pruned: u64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub m_lo: u32,
    pub m_hi: u32,
    pub scales_used: Vec<u32>,
    /// scales in range skipped because their count was zero
    pub excluded: Vec<u32>,
}

/// Evaluation tolerance at each depth, relative to the pruning radius.
const RELATIVE_TOL: f64 = 1e-2;
/// Finest tolerance used by the subdivision.
const MIN_TOL: f64 = 1e-13;

struct LevelPlan<'a> {
    evaluators: Vec<Evaluator<'a>>,
    radius: Vec<f64>,
    den: Vec<u128>,
}

impl<'a> LevelPlan<'a> {
    fn new(spec: &'a WeierstrassSpec, m_max: u32) -> Result<Self> {
        let b = spec.b() as u128;
        let mut evaluators = Vec::with_capacity(m_max as usize + 1);
        let mut radius = Vec::with_capacity(m_max as usize + 1);
        let mut den = Vec::with_capacity(m_max as usize + 1);
        for m in 0..=m_max {
            let side = libm::pow(b as f64, -(m as f64));
            let omega = spec.modulus(0.5 * side);
            let tol = (RELATIVE_TOL * omega).max(MIN_TOL);
            let ev = spec.evaluator(tol)?;
            // centers (2n+1)/(2b^m) need 2b^{m+1} in 128 bits
            let d = b
                .checked_pow(m)
                .and_then(|p| p.checked_mul(2))
                .filter(|d| d.checked_mul(b).is_some())
                .ok_or_else(|| Error::Overflow(alloc::format!("depth {m} exceeds 128-bit phases")))?;
            radius.push(omega + ev.tol());
            evaluators.push(ev);
            den.push(d);
        }
        Ok(LevelPlan { evaluators, radius, den })
    }

    fn center_value(&self, m: u32, n: u64) -> f64 {
        let m = m as usize;
        self.evaluators[m].eval_rational_unchecked(2 * n as u128 + 1, self.den[m])
    }
}

fn check_depth(m_max: u32) -> Result<()> {
    if m_max < 4 {
        return Err(Error::invalid("m_max", "must be >= 4"));
    }
    Ok(())
}

/// Certified box counts for several levels at once; `result[k]` belongs to `ys[k]`.
///
/// Each depth evaluates `W` once per distinct child interval needed by any level.
pub fn box_count_levels(spec: &WeierstrassSpec, ys: &[f64], m_max: u32) -> Result<Vec<Vec<BoxCountRecord>>> {
    spec.holder_constant()?;
    check_depth(m_max)?;
    Ok(subdivide(spec, ys, m_max)?.0)
}

pub fn box_count_level(spec: &WeierstrassSpec, y: f64, m_max: u32) -> Result<Vec<BoxCountRecord>> {
    Ok(box_count_levels(spec, &[y], m_max)?.pop().expect("one level"))
}

type Retained = Vec<Vec<u64>>;

fn subdivide(spec: &WeierstrassSpec, ys: &[f64], m_max: u32) -> Result<(Vec<Vec<BoxCountRecord>>, Retained)> {
    let plan = LevelPlan::new(spec, m_max)?;
    let b = spec.b() as u64;
    let mut records: Vec<Vec<BoxCountRecord>> = ys.iter().map(|_| Vec::with_capacity(m_max as usize + 1)).collect();
    let root = plan.center_value(0, 0);
    let mut alive: Retained = ys
        .iter()
        .map(|&y| if (root - y).abs() <= plan.radius[0] { alloc::vec![0u64] } else { Vec::new() })
        .collect();
    for (k, rec) in records.iter_mut().enumerate() {
        let count = alive[k].len() as u64;
        rec.push(BoxCountRecord { m: 0, box_side: 1.0, count, pruned: 1 - count, certified: true });
    }
    for m in 1..=m_max {
        let mut union: Vec<u64> = alive.iter().flatten().flat_map(|&n| (0..b).map(move |j| n * b + j)).collect();
        union.sort_unstable();
        union.dedup();
        let values: Vec<f64> = union.iter().map(|&n| plan.center_value(m, n)).collect();
        let radius = plan.radius[m as usize];
        let side = libm::pow(b as f64, -(m as f64));
        for (k, &y) in ys.iter().enumerate() {
            let mut next = Vec::new();
            let mut pos = 0;
            let mut tried = 0u64;
            for &parent in &alive[k] {
                for j in 0..b {
                    let child = parent * b + j;
                    while union[pos] < child {
                        pos += 1;
                    }
                    tried += 1;
                    if (values[pos] - y).abs() <= radius {
                        next.push(child);
                    }
                }
            }
            let count = next.len() as u64;
            records[k].push(BoxCountRecord { m, box_side: side, count, pruned: tried - count, certified: true });
            alive[k] = next;
        }
    }
    Ok((records, alive))
}

/// Centers of depth-`m` intervals that survive the certificate and whose
/// endpoint values bracket `y` (a sign change, or an endpoint within the
/// evaluation tolerance of `y`).
pub fn extract_level_points(spec: &WeierstrassSpec, y: f64, m: u32) -> Result<Vec<f64>> {
    check_depth(m)?;
    let (_, mut alive) = subdivide(spec, &[y], m)?;
    let cells = alive.pop().expect("one level");
    let b = spec.b() as u128;
    let den = b.pow(m);
    let ev = spec.evaluator(MIN_TOL.max(1e-12))?;
    let at = |n: u128| ev.eval_rational_unchecked(n % den, den) - y;
    let slack = 2.0 * ev.tol();
    Ok(cells
        .into_iter()
        .filter(|&n| {
            let (lo, hi) = (at(n as u128), at(n as u128 + 1));
            lo * hi <= 0.0 || lo.abs() <= slack || hi.abs() <= slack
        })
        .map(|n| (2 * n + 1) as f64 / (2 * den) as f64)
        .collect())
}

/// Graph box counts: per column of width `b^{-m}`, `⌈osc/b^{-m}⌉ + 1` boxes,
/// with the oscillation from the samples in the column plus `2ω(h/2)` for the
/// sample spacing `h`. Each finest column gets the smallest power of `b` that
/// is at least 256 samples, reduced to keep the total at or below 2²⁴ but never
/// below 16.
pub fn box_count_graph(spec: &WeierstrassSpec, m_max: u32, tol: f64) -> Result<Vec<BoxCountRecord>> {
    check_depth(m_max)?;
    const SAMPLE_BUDGET: u64 = 1 << 24;
    const MIN_PER_COLUMN: u64 = 16;
    const TARGET_PER_COLUMN: u64 = 256;
    let b = spec.b() as u64;
    let columns = b.checked_pow(m_max).filter(|&c| c <= 1 << 24).ok_or_else(|| {
        Error::invalid("m_max", "graph grid too large")
    })?;
    let mut per_column = 1;
    while per_column < TARGET_PER_COLUMN && columns * per_column * b <= SAMPLE_BUDGET {
        per_column *= b;
    }
    let per_column = per_column.max(MIN_PER_COLUMN);
    let samples = columns * per_column;
    let ev = spec.evaluator(tol)?;
    let den = samples as u128;
    let pad = spec.modulus(0.5 / samples as f64) + ev.tol();
    // per finest column: min and max over its samples, endpoints shared
    let mut lo = Vec::with_capacity(columns as usize);
    let mut hi = Vec::with_capacity(columns as usize);
    let mut prev = ev.eval_rational_unchecked(0, den);
    for c in 0..columns {
        let (mut a, mut z) = (prev, prev);
        for s in 1..=per_column {
            let n = c * per_column + s;
            let v = ev.eval_rational_unchecked((n as u128) % den, den);
            a = a.min(v);
            z = z.max(v);
            prev = v;
        }
        lo.push(a);
        hi.push(z);
    }
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in (0..=m_max).rev() {
        let side = libm::pow(b as f64, -(m as f64));
        let count: u64 = lo
            .iter()
            .zip(&hi)
            .map(|(a, z)| libm::ceil((z - a + 2.0 * pad) / side) as u64 + 1)
            .sum();
        out.push(BoxCountRecord { m, box_side: side, count, pruned: 0, certified: true });
        if m > 0 {
            lo = lo.chunks(b as usize).map(|c| c.iter().copied().fold(f64::INFINITY, f64::min)).collect();
            hi = hi.chunks(b as usize).map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
        }
    }
    out.reverse();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RieszEnergy {
    pub energy: f64,
    /// ordered pairs at distance zero, left out of the sum
    pub duplicate_pairs: u64,
}

/// `(1/n²) Σ_{a≠b} |p_a − p_b|^{-s}` over ordered pairs of distinct points.
pub fn riesz_energy(points: &[f64], s: f64) -> Result<RieszEnergy> {
    if !(s > 0.0) {
        return Err(Error::invalid("s", "must be positive"));
    }
    let n = points.len();
    if n <= 1 {
        return Ok(RieszEnergy { energy: 0.0, duplicate_pairs: 0 });
    }
    let mut sum = 0.0;
    let mut dup = 0;
    for a in 0..n {
        for c in a + 1..n {
            let d = (points[a] - points[c]).abs();
            if d == 0.0 {
                dup += 2;
            } else {
                sum += 2.0 * libm::pow(d, -s);
            }
        }
    }
    Ok(RieszEnergy { energy: sum / (n as f64 * n as f64), duplicate_pairs: dup })
}

/// Least-squares slope of `ln count` against `m ln b` over `m_lo..=m_hi`.
pub fn dimension_fit(records: &[BoxCountRecord], b: u32, m_lo: u32, m_hi: u32) -> Result<DimensionEstimate> {
    let lnb = libm::log(b as f64);
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for r in records.iter().filter(|r| (m_lo..=m_hi).contains(&r.m)) {
        if r.count > 0 {
            used.push(*r);
        } else {
            excluded.push(r.m);
        }
    }
    if used.len() < 3 {
        return Err(Error::InsufficientScales(used.len()));
    }
    let n = used.len() as f64;
    let x0 = used[0].m as f64 * lnb;
    let y0 = libm::log(used[0].count as f64);
    let xs: Vec<f64> = used.iter().map(|r| r.m as f64 * lnb - x0).collect();
    let ys: Vec<f64> = used.iter().map(|r| libm::log(r.count as f64) - y0).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    let slope = if ys.iter().all(|&y| y == 0.0) { 0.0 } else { sxy / sxx };
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| {
        let e = y - ym - slope * (x - xm);
        e * e
    })
    .sum();
    let stderr = if used.len() > 2 { libm::sqrt(ssr / (n - 2.0) / sxx) } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    let intercept = y0 + ym - slope * (x0 + xm);
    Ok(DimensionEstimate {
        slope,
        intercept,
        stderr,
        r_squared,
        m_lo,
        m_hi,
        scales_used: used.iter().map(|r| r.m).collect(),
        excluded,
    })
}

/// Middle half of the available scales (drops a quarter at each end).
pub fn default_fit_range(records: &[BoxCountRecord]) -> Option<(u32, u32)> {
    let lo = records.iter().map(|r| r.m).min()?;
    let hi = records.iter().map(|r| r.m).max()?;
    let span = hi - lo;
    Some((lo + span / 4, hi - span / 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcore::PeriodicFunction;

    fn cosine(alpha: f64) -> WeierstrassSpec {
        WeierstrassSpec::new(PeriodicFunction::cosine(), alpha, 2).unwrap()
    }

    fn rec(m: u32, count: u64) -> BoxCountRecord {
        BoxCountRecord { m, box_side: libm::pow(2.0, -(m as f64)), count, pruned: 0, certified: true }
    }

    #[test]
    fn far_level_prunes_everything() {
        let s = cosine(0.7);
        let y = s.sup_norm() / (1.0 - s.ratio()) + s.holder_constant().unwrap() + 1.0;
        let r = box_count_level(&s, y, 8).unwrap();
        assert!(r.iter().all(|r| r.count == 0));
        assert!(box_count_level(&WeierstrassSpec::new(PeriodicFunction::cosine(), 1.0, 2).unwrap(), 0.0, 8).is_err());
        assert!(box_count_level(&s, 0.0, 3).is_err());
    }

    #[test]
    fn retained_cells_contain_known_crossings() {
        let s = cosine(0.7);
        let ev = s.evaluator(1e-12).unwrap();
        for x in [0.3, 0.61, 0.875] {
            let y = ev.eval(x);
            let (_, alive) = subdivide(&s, &[y], 12).unwrap();
            let cell = libm::floor(x * 4096.0) as u64;
            assert!(alive[0].contains(&cell) || (x * 4096.0 == cell as f64 && alive[0].contains(&(cell - 1))));
        }
    }

    #[test]
    fn counts_are_nested() {
        let s = cosine(0.7);
        let many = box_count_levels(&s, &[0.0, 0.5, 1.3], 12).unwrap();
        for (k, &y) in [0.0, 0.5, 1.3].iter().enumerate() {
            assert_eq!(many[k], box_count_level(&s, y, 12).unwrap());
            for w in many[k].windows(2) {
                assert!(w[1].count <= 2 * w[0].count);
                assert_eq!(w[1].count + w[1].pruned, 2 * w[0].count);
            }
        }
    }

    #[test]
    fn graph_counts_sandwich() {
        let s = cosine(0.7);
        let recs = box_count_graph(&s, 10, 1e-10).unwrap();
        let ch = s.holder_constant().unwrap();
        for r in &recs {
            let bm = libm::pow(2.0, r.m as f64);
            assert!(r.count as f64 >= bm);
            assert!(r.count as f64 <= bm * (ch * libm::pow(bm, 0.3) + 2.0));
        }
    }

    #[test]
    fn level_points() {
        let s = cosine(0.7);
        assert!(extract_level_points(&s, 100.0, 8).unwrap().is_empty());
        let ev = s.evaluator(1e-12).unwrap();
        let y = ev.eval_rational(1, 4).unwrap();
        let pts = extract_level_points(&s, y, 10).unwrap();
        assert!(pts.iter().any(|p| (p - 0.25).abs() <= 1.0 / 1024.0));
        let takagi = WeierstrassSpec::new(PeriodicFunction::triangle(), 1.0, 2).unwrap();
        let pts = extract_level_points(&takagi, 0.0, 10).unwrap();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|&p| !(1.0 / 1024.0..=1.0 - 1.0 / 1024.0).contains(&p)));
    }

    #[test]
    fn riesz_examples() {
        assert_eq!(riesz_energy(&[0.3], 0.5).unwrap().energy, 0.0);
        assert!((riesz_energy(&[0.0, 1.0], 0.5).unwrap().energy - 0.5).abs() < 1e-15);
        let d = riesz_energy(&[0.2, 0.2, 0.7], 0.5).unwrap();
        assert_eq!(d.duplicate_pairs, 2);
        let grid = |n: usize| (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect::<Vec<_>>();
        let e1 = riesz_energy(&grid(200), 0.5).unwrap().energy;
        let e2 = riesz_energy(&grid(800), 0.5).unwrap().energy;
        // ∬|u−v|^{-1/2} = 8/3
        assert!(e1 < 8.0 / 3.0 && e2 < 8.0 / 3.0 && e2 > e1);
    }

    #[test]
    fn regression_examples() {
        let synth: Vec<_> = (4..16).map(|m| rec(m, libm::round(libm::pow(2.0, 1.3 * m as f64)) as u64)).collect();
        let fit = dimension_fit(&synth, 2, 4, 15).unwrap();
        assert!((fit.slope - 1.3).abs() < 0.02);
        let flat: Vec<_> = (4..10).map(|m| rec(m, 17)).collect();
        assert_eq!(dimension_fit(&flat, 2, 4, 9).unwrap().slope, 0.0);
        let mut holes = synth.clone();
        holes[3].count = 0;
        let fit = dimension_fit(&holes, 2, 4, 15).unwrap();
        assert_eq!(fit.excluded, alloc::vec![7]);
        assert!(!fit.scales_used.contains(&7));
        assert_eq!(dimension_fit(&synth[..2], 2, 0, 20).unwrap_err(), Error::InsufficientScales(2));
        assert_eq!(default_fit_range(&synth), Some((6, 13)));
    }
}
