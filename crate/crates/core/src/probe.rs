//! Random probes `W_t = W + Σ t_i W_{g_i}` and prevalence experiments.
//!
//! Seeds for probe `p` of an experiment with master seed `s`:
//! `t` from `derive_seed(s, PROBE, p)`, the occupation histogram from
//! `derive_seed(s, HISTOGRAM, p)`, the level samples from
//! `derive_seed(s, LEVEL_Y, p)` and the linearity check from
//! `derive_seed(s, PAIRS, p)`. Records can be regenerated one at a time.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::embed::{eval_coordinate, EmbeddingSpec};
use crate::error::{Error, Result};
use crate::funcore::{combine, PeriodicFunction, WeierstrassSpec};
use crate::levelset::{box_count_levels, dimension_fit, BoxCountRecord};
use crate::occup::{empirical_fourier, l2_energy, occupation_histogram};
use crate::rng::{derive_seed, rng_for, stream};

/// A point `t` drawn uniformly from the ball of the given radius.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeSample {
    pub t: Vec<f64>,
    pub radius: f64,
    pub seed: u64,
    pub coordinate_indices: Vec<u64>,
}

/// Uniform sample from the `n_coords`-dimensional ball, coordinates `0..n_coords`.
pub fn sample_t(n_coords: usize, radius: f64, seed: u64) -> Result<ProbeSample> {
    sample_probe((0..n_coords as u64).collect(), radius, seed)
}

pub fn sample_probe(coordinate_indices: Vec<u64>, radius: f64, seed: u64) -> Result<ProbeSample> {
    let n = coordinate_indices.len();
    if n == 0 {
        return Err(Error::invalid("n_coords", "must be >= 1"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid("radius", "must be positive"));
    }
    let mut rng = rng_for(seed, stream::PROBE, 0);
    let t = loop {
        let z: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = libm::sqrt(z.iter().map(|v| v * v).sum());
        if norm > 0.0 {
            let r = radius * libm::pow(rng.gen::<f64>(), 1.0 / n as f64);
            break z.into_iter().map(|v| v * r / norm).collect();
        }
    };
    Ok(ProbeSample { t, radius, seed, coordinate_indices })
}

/// `base.g + Σ t_i g_i` as a Weierstrass spec with the base parameters.
pub fn perturbed_spec(base: &WeierstrassSpec, emb: &EmbeddingSpec, probe: &ProbeSample) -> Result<WeierstrassSpec> {
    if !emb.is_dense() {
        return Err(Error::FamilyTooLarge);
    }
    if base.b() != emb.b() || base.alpha() != emb.alpha() {
        return Err(Error::invalid("base", "alpha and b must match the embedding"));
    }
    if probe.t.len() != probe.coordinate_indices.len() {
        return Err(Error::invalid("t", "length must match coordinate_indices"));
    }
    if probe.coordinate_indices.iter().any(|&i| emb.is_raw(i)) {
        return Err(Error::NonPeriodicPerturbation);
    }
    let coords = probe.coordinate_indices.iter().map(|&i| emb.coordinate(i)).collect::<Result<Vec<_>>>()?;
    let mut parts: Vec<(f64, &PeriodicFunction)> = Vec::with_capacity(coords.len() + 1);
    parts.push((1.0, base.g()));
    parts.extend(probe.t.iter().copied().zip(coords.iter()));
    WeierstrassSpec::new(combine(&parts)?, base.alpha(), base.b())
}

/// Worst `|W_t(x) − W(x) − Σ t_i W_{g_i}(x)|` over `n` random `x`.
pub fn linearity_residual(
    base: &WeierstrassSpec,
    emb: &EmbeddingSpec,
    probe: &ProbeSample,
    perturbed: &WeierstrassSpec,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<f64> {
    let mut rng = rng_for(seed, stream::PAIRS, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let x: f64 = rng.gen();
        let mut expected = base.eval(x, tol)?;
        for (&i, &t) in probe.coordinate_indices.iter().zip(&probe.t) {
            expected += t * eval_coordinate(emb, i, x, tol)?;
        }
        worst = worst.max((perturbed.eval(x, tol)? - expected).abs());
    }
    Ok(worst)
}

/// Frequency grid and cutoffs for the energy curve of each probe.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyConfig {
    pub xi_max: f64,
    pub n_xi: usize,
    pub n_samples: usize,
    pub cutoffs: Vec<f64>,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig { xi_max: 800.0, n_xi: 1601, n_samples: 1 << 16, cutoffs: alloc::vec![200.0, 400.0, 800.0] }
    }
}

/// Regression window for level-set slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FitWindow {
    /// From the first depth whose pruning radius `ω(δ/2)` is at most
    /// `fraction` of the sampled value range, down to `m_max`; always at
    /// least [`MIN_FIT_DEPTHS`] depths.
    Certified { fraction: f64 },
    Fixed { m_lo: u32, m_hi: u32 },
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow::Certified { fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ExperimentConfig {
    pub base: PeriodicFunction,
    pub alpha: f64,
    pub b: u32,
    pub l0: u32,
    /// Perturbed coordinates; `None` means every tent coordinate.
    pub coords: Option<Vec<u64>>,
    pub probes: usize,
    pub levels_per_probe: usize,
    pub radius: f64,
    pub seed: u64,
    pub m_max: u32,
    pub hist_samples: usize,
    pub hist_bins: usize,
    /// Mass excluded from the level sampling, split between both tails.
    pub mass_exclude: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub fit: FitWindow,
    pub energy: Option<EnergyConfig>,
    pub linearity_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            base: PeriodicFunction::cosine(),
            alpha: 0.7,
            b: 2,
            l0: 2,
            coords: None,
            probes: 20,
            levels_per_probe: 50,
            radius: 1.0,
            seed: 0,
            m_max: 24,
            hist_samples: 1 << 16,
            hist_bins: 256,
            mass_exclude: 0.02,
            epsilon: 0.1,
            tol: 1e-10,
            fit: FitWindow::default(),
            energy: None,
            linearity_points: 20,
        }
    }
}

impl ExperimentConfig {
    /// Checks every field against the preconditions of the routines it feeds.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("alpha", "must lie in (0, 1)"));
        }
        if self.b < 2 {
            return Err(Error::invalid("b", "must be >= 2"));
        }
        if self.l0 == 0 {
            return Err(Error::invalid("l0", "must be >= 1"));
        }
        if !self.base.is_periodic() {
            return Err(Error::invalid("base", "must be periodic"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid("radius", "must be positive"));
        }
        if self.m_max < 4 {
            return Err(Error::invalid("m_max", "must be >= 4"));
        }
        if self.hist_bins == 0 || self.hist_samples < self.hist_bins {
            return Err(Error::invalid("hist_samples", "need hist_samples >= hist_bins >= 1"));
        }
        if !(0.0..1.0).contains(&self.mass_exclude) {
            return Err(Error::invalid("mass_exclude", "must lie in [0, 1)"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::invalid("epsilon", "must be >= 0"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        match self.fit {
            FitWindow::Certified { fraction } if !(fraction > 0.0) => {
                return Err(Error::invalid("fit.fraction", "must be positive"))
            }
            FitWindow::Fixed { m_lo, m_hi } if m_lo + 2 > m_hi || m_hi > self.m_max => {
                return Err(Error::invalid("fit", "need m_lo + 2 <= m_hi <= m_max"))
            }
            _ => {}
        }
        if let Some(e) = &self.energy {
            if !(e.xi_max > 0.0) || e.n_xi < 2 || e.n_samples < 2 {
                return Err(Error::invalid("energy", "need xi_max > 0, n_xi >= 2, n_samples >= 2"));
            }
            if e.cutoffs.iter().any(|&c| !(c >= 0.0 && c <= e.xi_max)) || e.cutoffs.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::invalid("energy.cutoffs", "must be sorted and within [0, xi_max]"));
            }
        }
        let emb = self.embedding()?;
        if let Some(c) = &self.coords {
            if c.is_empty() {
                return Err(Error::invalid("coords", "must not be empty"));
            }
            if c.iter().any(|&i| emb.is_raw(i)) {
                return Err(Error::NonPeriodicPerturbation);
            }
            let d = emb.d_u64().unwrap_or(u64::MAX);
            if c.iter().any(|&i| i >= d) {
                return Err(Error::invalid("coords", "index out of range"));
            }
        }
        if !emb.is_dense() {
            return Err(Error::invalid("l0", "embedding too large for dense perturbations"));
        }
        Ok(())
    }

    pub fn embedding(&self) -> Result<EmbeddingSpec> {
        EmbeddingSpec::new(self.alpha, self.b, Some(self.l0))
    }

    fn coordinate_indices(&self, emb: &EmbeddingSpec) -> Vec<u64> {
        match &self.coords {
            Some(c) => c.clone(),
            None => (0..emb.d_u64().expect("dense") - 1).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelSlope {
    pub y: f64,
    /// `None` when fewer than three scales carried boxes.
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentRecord {
    pub probe_index: usize,
    pub probe: ProbeSample,
    pub base_id: String,
    pub sampling: String,
    pub fit_lo: u32,
    pub fit_hi: u32,
    pub levels: Vec<LevelSlope>,
    pub energy: Vec<(f64, f64)>,
    pub median_slope: Option<f64>,
    pub fraction_within: f64,
    pub linearity_residual: f64,
    pub linearity_pass: bool,
}

/// Shortest certified regression window.
pub const MIN_FIT_DEPTHS: u32 = 4;

/// Depth window for the level-set regression of `spec`.
pub fn fit_window(spec: &WeierstrassSpec, window: FitWindow, value_range: f64, m_max: u32) -> (u32, u32) {
    match window {
        FitWindow::Fixed { m_lo, m_hi } => (m_lo, m_hi),
        FitWindow::Certified { fraction } => {
            let b = spec.b() as f64;
            let lo = (0..=m_max)
                .find(|&m| spec.modulus(0.5 * libm::pow(b, -(m as f64))) <= fraction * value_range)
                .unwrap_or(m_max);
            (lo.min(m_max.saturating_sub(MIN_FIT_DEPTHS - 1)), m_max)
        }
    }
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// One probe of [`prevalence_experiment`]; independent of every other index.
pub fn run_probe(config: &ExperimentConfig, index: usize) -> Result<ExperimentRecord> {
    config.validate()?;
    let emb = config.embedding()?;
    let base = WeierstrassSpec::new(config.base.clone(), config.alpha, config.b)?;
    let i = index as u64;
    let probe = sample_probe(config.coordinate_indices(&emb), config.radius, derive_seed(config.seed, stream::PROBE, i))?;
    let spec = perturbed_spec(&base, &emb, &probe)?;

    let residual = linearity_residual(
        &base,
        &emb,
        &probe,
        &spec,
        config.linearity_points,
        derive_seed(config.seed, stream::PAIRS, i),
        config.tol,
    )?;

    let hist = occupation_histogram(
        &spec,
        config.hist_samples,
        config.hist_bins,
        derive_seed(config.seed, stream::HISTOGRAM, i),
        config.tol,
    )?;
    let energy = match &config.energy {
        Some(e) => l2_energy(&empirical_fourier(&spec, e.xi_max, e.n_xi, e.n_samples, config.tol)?, &e.cutoffs)?,
        None => Vec::new(),
    };

    let mut y_rng = rng_for(config.seed, stream::LEVEL_Y, i);
    let ys = hist.sample_levels(config.levels_per_probe, config.mass_exclude, &mut y_rng);
    let (m_lo, m_hi) = fit_window(&spec, config.fit, hist.y_max - hist.y_min, config.m_max);
    let counts: Vec<Vec<BoxCountRecord>> = if ys.is_empty() { Vec::new() } else { box_count_levels(&spec, &ys, config.m_max)? };
    let levels: Vec<LevelSlope> = ys
        .iter()
        .zip(&counts)
        .map(|(&y, recs)| match dimension_fit(recs, config.b, m_lo, m_hi) {
            Ok(f) => LevelSlope { y, slope: Some(f.slope), stderr: Some(f.stderr) },
            Err(_) => LevelSlope { y, slope: None, stderr: None },
        })
        .collect();
    let mut slopes: Vec<f64> = levels.iter().filter_map(|l| l.slope).collect();
    let target = 1.0 - config.alpha;
    let within = slopes.iter().filter(|&&s| (s - target).abs() <= config.epsilon).count();
    let fraction_within = if levels.is_empty() { 0.0 } else { within as f64 / levels.len() as f64 };
    let median_slope = median(&mut slopes);

    Ok(ExperimentRecord {
        probe_index: index,
        probe,
        base_id: alloc::format!("{:?}", config.base.terms()),
        sampling: String::from("uniform ball proxy for Lebesgue-almost-every t"),
        fit_lo: m_lo,
        fit_hi: m_hi,
        levels,
        energy,
        median_slope,
        fraction_within,
        linearity_residual: residual,
        linearity_pass: residual <= 3.0 * config.tol,
    })
}

/// All probes in index order.
pub fn prevalence_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    (0..config.probes).map(|p| run_probe(config, p)).collect()
}
