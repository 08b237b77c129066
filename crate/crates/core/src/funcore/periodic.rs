//! Periodic Lipschitz functions built from a handful of primitives.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative inflation applied to bounds computed in floating point.
const BOUND_SLACK: f64 = 1e-12;

/// A periodic piecewise-linear function given by its values at sorted
/// breakpoints in `[0, 1)`; the last segment wraps to `breakpoints[0] + 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "TableParts"))]
pub struct PiecewiseTable {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct TableParts {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<TableParts> for PiecewiseTable {
    type Error = Error;

    fn try_from(p: TableParts) -> Result<Self> {
        PiecewiseTable::new(p.breakpoints, p.values)
    }
}

impl PiecewiseTable {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::MalformedTable("no breakpoints".into()));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::MalformedTable(alloc::format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::MalformedTable("non-finite entry".into()));
        }
        if breakpoints.iter().any(|&p| !(0.0..1.0).contains(&p)) {
            return Err(Error::MalformedTable("breakpoints must lie in [0, 1)".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedTable("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewiseTable { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `u ∈ [0, 1)`.
    #[inline]
    pub fn eval_reduced(&self, u: f64) -> f64 {
        let bp = &self.breakpoints;
        let v = &self.values;
        let n = bp.len();
        if n == 1 {
            return v[0];
        }
        let idx = bp.partition_point(|&p| p <= u);
        if idx == 0 || idx == n {
            // wrap segment from bp[n-1] to bp[0] + 1
            let start = bp[n - 1];
            let width = bp[0] + 1.0 - start;
            let pos = if idx == 0 { u + 1.0 - start } else { u - start };
            v[n - 1] + (v[0] - v[n - 1]) * (pos / width)
        } else {
            let (p0, p1) = (bp[idx - 1], bp[idx]);
            v[idx - 1] + (v[idx] - v[idx - 1]) * ((u - p0) / (p1 - p0))
        }
    }

    /// Segment slopes, including the wrap-around segment.
    fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.breakpoints.len();
        (0..n).filter(move |_| n > 1).map(move |i| {
            let (p0, v0) = (self.breakpoints[i], self.values[i]);
            let (p1, v1) = if i + 1 < n {
                (self.breakpoints[i + 1], self.values[i + 1])
            } else {
                (self.breakpoints[0] + 1.0, self.values[0])
            };
            (v1 - v0) / (p1 - p0)
        })
    }

    pub fn lipschitz(&self) -> f64 {
        self.slopes().fold(0.0, |m, s| m.max(s.abs()))
    }

    fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Building blocks of a [`PeriodicFunction`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Primitive {
    /// `cos 2πx`
    Cosine,
    /// `sin 2πx`
    Sine,
    /// `dist(x, ℤ)`
    Triangle,
    /// The tent `h̄_ℓ(x − shift)`: slope `−1/(1−ℓ)` on `[0, (1−ℓ)/2)`, slope
    /// `1/ℓ` up to `(1+ℓ)/2`, then slope `−1/(1−ℓ)` back to zero at 1.
    TentShift { ell: f64, shift: f64 },
    /// Periodic piecewise-linear interpolation.
    PiecewiseLinear(PiecewiseTable),
    /// The arc parameter `x` itself. Not periodic.
    RawCoordinate,
}

/// Three-branch tent on `[0, 1)`, extended with period one.
#[inline]
pub fn tent(ell: f64, x: f64) -> f64 {
    let u = x - libm::floor(x);
    if u < 0.5 * (1.0 - ell) {
        -u / (1.0 - ell)
    } else if u < 0.5 * (1.0 + ell) {
        u / ell - 0.5 / ell
    } else {
        (1.0 - u) / (1.0 - ell)
    }
}

impl Primitive {
    fn validate(&self) -> Result<()> {
        match self {
            Primitive::TentShift { ell, shift } => {
                if !(ell.is_finite() && *ell > 0.0 && *ell <= 0.5) {
                    return Err(Error::invalid("ell", "tent width must lie in (0, 1/2]"));
                }
                if !(shift.is_finite() && (0.0..1.0).contains(shift)) {
                    return Err(Error::invalid("shift", "tent shift must lie in [0, 1)"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Direct evaluation, used when compiling tables and as a reference.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Primitive::Cosine => libm::cos(2.0 * PI * x),
            Primitive::Sine => libm::sin(2.0 * PI * x),
            Primitive::Triangle => {
                let u = x - libm::floor(x);
                u.min(1.0 - u)
            }
            Primitive::TentShift { ell, shift } => tent(*ell, x - shift),
            Primitive::PiecewiseLinear(t) => t.eval_reduced(x - libm::floor(x)),
            Primitive::RawCoordinate => x,
        }
    }

    /// Breakpoints in `[0, 1)` when the primitive is piecewise linear.
    fn breakpoints(&self) -> Option<Vec<f64>> {
        let wrap = |p: f64| p - libm::floor(p);
        match self {
            Primitive::Triangle => Some(alloc::vec![0.0, 0.5]),
            Primitive::TentShift { ell, shift } => Some(alloc::vec![
                wrap(shift + 0.5 * (1.0 - ell)),
                wrap(shift + 0.5 * (1.0 + ell)),
            ]),
            Primitive::PiecewiseLinear(t) => Some(t.breakpoints.clone()),
            Primitive::Cosine | Primitive::Sine | Primitive::RawCoordinate => None,
        }
    }
}

/// A weighted sum of primitives.
///
/// All piecewise-linear terms are merged into one table at construction so
/// evaluation costs one binary search plus one cosine regardless of the
/// number of terms.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "FunctionTerms", into = "FunctionTerms"))]
pub struct PeriodicFunction {
    terms: Vec<(f64, Primitive)>,
    table: Option<PiecewiseTable>,
    cos_weight: f64,
    sin_weight: f64,
    raw_weight: f64,
}

/// Serialized form: `{"terms": [{"weight": 1.0, "kind": "cosine"}, ...]}`.
#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct FunctionTerms {
    terms: Vec<Term>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct Term {
    weight: f64,
    #[serde(flatten)]
    primitive: Primitive,
}

#[cfg(feature = "serde")]
impl TryFrom<FunctionTerms> for PeriodicFunction {
    type Error = Error;

    fn try_from(f: FunctionTerms) -> Result<Self> {
        let terms: Vec<_> = f.terms.into_iter().map(|t| (t.weight, t.primitive)).collect();
        if terms.len() == 1 && terms[0] == (1.0, Primitive::RawCoordinate) {
            return Ok(PeriodicFunction::raw_coordinate());
        }
        PeriodicFunction::new(terms)
    }
}

#[cfg(feature = "serde")]
impl From<PeriodicFunction> for FunctionTerms {
    fn from(f: PeriodicFunction) -> Self {
        FunctionTerms { terms: f.terms.into_iter().map(|(weight, primitive)| Term { weight, primitive }).collect() }
    }
}

impl PeriodicFunction {
    /// Builds a periodic function. `RawCoordinate` terms are rejected; use
    /// [`PeriodicFunction::raw_coordinate`] for the identity coordinate.
    pub fn new(terms: Vec<(f64, Primitive)>) -> Result<Self> {
        if terms.iter().any(|(_, p)| matches!(p, Primitive::RawCoordinate)) {
            return Err(Error::NonPeriodic);
        }
        Self::build(terms)
    }

    /// The non-periodic identity `x ↦ x`.
    pub fn raw_coordinate() -> Self {
        Self::build(alloc::vec![(1.0, Primitive::RawCoordinate)]).expect("raw coordinate is valid")
    }

    pub fn zero() -> Self {
        Self::build(Vec::new()).expect("empty sum is valid")
    }

    pub fn single(p: Primitive) -> Result<Self> {
        Self::new(alloc::vec![(1.0, p)])
    }

    pub fn cosine() -> Self {
        Self::single(Primitive::Cosine).expect("cosine is valid")
    }

    pub fn triangle() -> Self {
        Self::single(Primitive::Triangle).expect("triangle is valid")
    }

    pub fn tent_shift(ell: f64, shift: f64) -> Result<Self> {
        Self::single(Primitive::TentShift { ell, shift })
    }

    fn build(terms: Vec<(f64, Primitive)>) -> Result<Self> {
        for (w, p) in &terms {
            if !w.is_finite() {
                return Err(Error::invalid("weight", "weights must be finite"));
            }
            p.validate()?;
        }
        let mut cos_weight = 0.0;
        let mut sin_weight = 0.0;
        let mut raw_weight = 0.0;
        let mut bps: Vec<f64> = Vec::new();
        let mut pl_terms: Vec<(f64, &Primitive)> = Vec::new();
        for (w, p) in &terms {
            match p {
                Primitive::Cosine => cos_weight += w,
                Primitive::Sine => sin_weight += w,
                Primitive::RawCoordinate => raw_weight += w,
                _ => {
                    bps.extend(p.breakpoints().expect("piecewise-linear primitive"));
                    pl_terms.push((*w, p));
                }
            }
        }
        let table = if pl_terms.is_empty() {
            None
        } else {
            bps.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
            bps.dedup();
            let values = bps.iter().map(|&x| pl_terms.iter().map(|(w, p)| w * p.eval(x)).sum()).collect();
            Some(PiecewiseTable::new(bps, values)?)
        };
        Ok(PeriodicFunction { terms, table, cos_weight, sin_weight, raw_weight })
    }

    pub fn terms(&self) -> &[(f64, Primitive)] {
        &self.terms
    }

    /// The merged piecewise-linear part, if any.
    pub fn table(&self) -> Option<&PiecewiseTable> {
        self.table.as_ref()
    }

    pub fn is_periodic(&self) -> bool {
        self.raw_weight == 0.0 && !self.terms.iter().any(|(_, p)| matches!(p, Primitive::RawCoordinate))
    }

    /// `g(x)`, with `x` reduced modulo one for the periodic part.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - libm::floor(x);
        let mut v = self.eval_periodic(u, u.min(1.0 - u));
        if self.raw_weight != 0.0 {
            v += self.raw_weight * x;
        }
        v
    }

    /// Periodic part at a reduced phase `u ∈ [0, 1)`; `r` is the distance
    /// from `u` to the nearest integer, which keeps cosine exactly even.
    #[inline]
    pub(crate) fn eval_periodic(&self, u: f64, r: f64) -> f64 {
        let mut v = 0.0;
        if self.cos_weight != 0.0 {
            v += self.cos_weight * libm::cos(2.0 * PI * r);
        }
        if self.sin_weight != 0.0 {
            v += self.sin_weight * libm::sin(2.0 * PI * u);
        }
        if let Some(t) = &self.table {
            v += t.eval_reduced(u);
        }
        v
    }

    /// Periodic part at the exact phase `num / den` (`num < den`).
    #[inline]
    pub fn eval_phase(&self, num: u128, den: u128) -> f64 {
        let r = num.min(den - num);
        let df = den as f64;
        self.eval_periodic(num as f64 / df, r as f64 / df)
    }

    /// Term-by-term evaluation that bypasses the merged table.
    pub fn eval_termwise(&self, x: f64) -> f64 {
        self.terms.iter().map(|(w, p)| w * p.eval(x)).sum()
    }

    /// Amplitude of the trigonometric part `a cos 2πx + c sin 2πx`.
    fn amplitude(&self) -> f64 {
        libm::hypot(self.cos_weight, self.sin_weight)
    }

    /// `x ↦ g(x − s)`. Piecewise-linear terms are rotated exactly as tables
    /// and trigonometric terms are rewritten in the cosine/sine basis.
    pub fn translate(&self, s: f64) -> Result<PeriodicFunction> {
        if !s.is_finite() {
            return Err(Error::invalid("shift", "must be finite"));
        }
        if !self.is_periodic() {
            return Err(Error::NonPeriodic);
        }
        let s = s - libm::floor(s);
        let (sn, cs) = libm::sincos(2.0 * PI * s);
        let mut terms = Vec::new();
        let trig = |w: f64| w != 0.0;
        // cos(2π(x−s)) = cos 2πs·cos 2πx + sin 2πs·sin 2πx
        // sin(2π(x−s)) = cos 2πs·sin 2πx − sin 2πs·cos 2πx
        let c = self.cos_weight * cs - self.sin_weight * sn;
        let d = self.cos_weight * sn + self.sin_weight * cs;
        if trig(c) {
            terms.push((c, Primitive::Cosine));
        }
        if trig(d) {
            terms.push((d, Primitive::Sine));
        }
        if let Some(t) = &self.table {
            let mut pts: Vec<(f64, f64)> = t
                .breakpoints
                .iter()
                .zip(&t.values)
                .map(|(&p, &v)| {
                    let q = p + s;
                    (if q >= 1.0 { q - 1.0 } else { q }, v)
                })
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|a, b| a.0 == b.0);
            let (bp, vals) = pts.into_iter().unzip();
            terms.push((1.0, Primitive::PiecewiseLinear(PiecewiseTable::new(bp, vals)?)));
        }
        PeriodicFunction::new(terms)
    }

    /// Certified bound on `sup |g|` over one period (on `[0, 1]` for the raw
    /// coordinate). Exact for the piecewise-linear part, analytic for cosine.
    pub fn sup_norm(&self) -> f64 {
        let table = self.table.as_ref().map_or(0.0, |t| {
            let (lo, hi) = t.min_max();
            lo.abs().max(hi.abs())
        });
        inflate(table + self.amplitude() + self.raw_weight.abs())
    }

    /// Certified Lipschitz bound: exact for the merged piecewise-linear part,
    /// `2π|w|` for cosine.
    pub fn lipschitz(&self) -> f64 {
        let table = self.table.as_ref().map_or(0.0, PiecewiseTable::lipschitz);
        inflate(table + 2.0 * PI * self.amplitude() + self.raw_weight.abs())
    }

    /// Certified bound on `sup g − inf g`.
    pub fn oscillation(&self) -> f64 {
        let table = self.table.as_ref().map_or(0.0, |t| {
            let (lo, hi) = t.min_max();
            hi - lo
        });
        inflate(table + 2.0 * self.amplitude() + self.raw_weight.abs())
    }
}

fn inflate(v: f64) -> f64 {
    v * (1.0 + BOUND_SLACK)
}

/// Weighted sum of periodic functions, `Σ w_i f_i`.
pub fn combine(parts: &[(f64, &PeriodicFunction)]) -> Result<PeriodicFunction> {
    let terms = parts
        .iter()
        .flat_map(|(w, f)| f.terms.iter().map(move |(wi, p)| (w * wi, p.clone())))
        .collect();
    PeriodicFunction::build(terms)
}
