//! One function per subcommand. Each resolves its arguments, validates them,
//! runs the core routine and returns the artifacts to write.

use std::path::PathBuf;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use weierstrass_core::badic::BadicPoint;
use weierstrass_core::embed::{
    biholder_scan, l0_threshold_log, proof_certificate, random_pair, witness_search, EmbeddingSpec, Metric,
    ProofCertificate, ScanOptions, WitnessOptions, DEFAULT_PAIR_CAP,
};
use weierstrass_core::levelset::{box_count_graph, box_count_levels, default_fit_range, dimension_fit};
use weierstrass_core::occup::{
    empirical_fourier, l2_energy, oblique_occupation, occupation_histogram, OccupationEstimate, DEFAULT_BINS,
    DEFAULT_SAMPLES,
};
use weierstrass_core::probe::{run_probe, EnergyConfig, ExperimentConfig, ExperimentRecord, FitWindow};
use weierstrass_core::raster::{render_zero_loci, ZeroLociCounts, ZeroLociOptions};
use weierstrass_core::rng::{rng_for, stream};
use weierstrass_core::{PeriodicFunction, Primitive, WeierstrassSpec};

use crate::cli::*;
use crate::config::{require, resolve, GSpec};
use crate::error::{LabError, Result};
use crate::formats::{box_count_table, ndjson, Cell, Table};

/// Bytes destined for a file, or stdout when `path` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

/// Everything a subcommand produces: artifacts plus a human summary for stderr.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
}

impl Outcome {
    fn single(path: Option<PathBuf>, bytes: Vec<u8>, summary: impl Into<String>) -> Self {
        Outcome { artifacts: vec![Artifact { path, bytes }], summary: summary.into() }
    }
}

pub fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Constants(a) => constants(a),
        Command::Family(a) => family(a),
        Command::Certify(a) => certify(a),
        Command::Scan(a) => scan(a),
        Command::Witness(a) => witness(a),
        Command::Occupation(a) => occupation(a),
        Command::Fourier(a) => fourier(a),
        Command::Energy(a) => energy(a),
        Command::Oblique(a) => oblique(a),
        Command::Levelset(a) => levelset(a),
        Command::Graphdim(a) => graphdim(a),
        Command::ProbeRun(a) => probe_run(a),
        Command::Figure(a) => figure(a),
    }
}

fn check_alpha(alpha: f64, closed: bool) -> Result<()> {
    let ok = alpha > 0.0 && (alpha < 1.0 || (closed && alpha == 1.0));
    require(ok, "alpha", if closed { "must lie in (0, 1]" } else { "must lie in (0, 1)" })
}

fn check_b(b: u32) -> Result<()> {
    require(b >= 2, "b", "must be an integer >= 2")
}

fn check_tol(tol: f64) -> Result<()> {
    require(tol.is_finite() && tol > 0.0, "tol", "must be positive")
}

struct FunctionParams {
    spec: WeierstrassSpec,
    tol: f64,
}

fn function_params(f: &FunctionArgs) -> Result<FunctionParams> {
    let alpha = f.alpha.unwrap_or(0.7);
    let b = f.b.unwrap_or(2);
    let tol = f.tol.unwrap_or(1e-10);
    check_alpha(alpha, true)?;
    check_b(b)?;
    check_tol(tol)?;
    let g = f.g.clone().unwrap_or(GSpec::Named("cosine".into())).build()?;
    Ok(FunctionParams { spec: WeierstrassSpec::new(g, alpha, b)?, tol })
}

fn embedding(e: &EmbeddingArgs) -> Result<EmbeddingSpec> {
    let alpha = e.alpha.unwrap_or(0.7);
    let b = e.b.unwrap_or(2);
    check_alpha(alpha, false)?;
    check_b(b)?;
    if let Some(l0) = e.l0 {
        require(l0 >= 1, "l0", "must be >= 1")?;
    }
    Ok(EmbeddingSpec::new(alpha, b, e.l0)?)
}

pub fn eval(args: &EvalArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let xs = match &a.x {
        Some(xs) => {
            require(xs.iter().all(|x| x.is_finite()), "x", "must be finite")?;
            xs.clone()
        }
        None => {
            let n = a.n.unwrap_or(16);
            require(n >= 1, "n", "must be >= 1")?;
            (0..=n).map(|i| i as f64 / n as f64).collect()
        }
    };
    let ev = p.spec.evaluator(p.tol)?;
    let mut t = Table::new(&["x", "w"]);
    for &x in &xs {
        t.push(vec![x.into(), ev.eval(x).into()]);
    }
    Ok(Outcome::single(a.io.out, t.to_bytes(), format!("{} points, depth {}", xs.len(), ev.depth())))
}

#[derive(Debug, Serialize)]
struct ConstantsReport {
    alpha: f64,
    b: u32,
    c_alpha: f64,
    l0_threshold_log: f64,
    l0: u32,
    l0_is_override: bool,
    k_prime_offset: u32,
    c_theory: f64,
    d: String,
    d_log10: f64,
}

pub fn constants(args: &ConstantsArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let emb = embedding(&a.embedding)?;
    let r = ConstantsReport {
        alpha: emb.alpha(),
        b: emb.b(),
        c_alpha: emb.c_alpha(),
        l0_threshold_log: l0_threshold_log(emb.alpha(), emb.b())?,
        l0: emb.l0(),
        l0_is_override: emb.l0_is_override(),
        k_prime_offset: emb.k_prime_offset(),
        c_theory: emb.c_theory(),
        d: emb.d().to_string(),
        d_log10: emb.d_log10(),
    };
    let mut bytes = serde_json::to_vec_pretty(&r).map_err(|e| LabError::Numeric(e.to_string()))?;
    bytes.push(b'\n');
    Ok(Outcome::single(a.io.out, bytes, format!("C_alpha = {}, l0 = {}", r.c_alpha, r.l0)))
}

pub fn family(args: &FamilyArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let emb = embedding(&a.embedding)?;
    let limit = a.limit.unwrap_or(64);
    require(limit >= 1, "limit", "must be >= 1")?;
    let shown = emb.d_u64().map_or(limit, |d| (d - 1).min(limit));
    let mut t = Table::new(&["index", "kind", "r", "s", "ell", "shift"]);
    for i in 0..shown {
        let shift = match emb.coordinate(i)?.terms() {
            [(_, Primitive::TentShift { shift, .. })] => *shift,
            _ => f64::NAN,
        };
        t.push(vec![i.into(), "tent".into(), emb.r(i).into(), emb.s(i).into(), emb.ell().into(), shift.into()]);
    }
    let raw = emb.d() - BigUint::from(1u8);
    t.push(vec![
        Cell::Text(raw.to_string()),
        "raw".into(),
        f64::NAN.into(),
        f64::NAN.into(),
        f64::NAN.into(),
        f64::NAN.into(),
    ]);
    Ok(Outcome::single(a.io.out, t.to_bytes(), format!("d = {} ({} tent rows listed)", emb.d(), shown)))
}

fn certificate_row(index: usize, c: &ProofCertificate) -> Vec<Cell> {
    vec![
        index.into(),
        c.x.to_f64().into(),
        c.y.to_f64().into(),
        c.ln_gap.into(),
        c.k_xy.into(),
        c.k_prime.into(),
        Cell::Text(c.i.to_string()),
        c.head_rel.into(),
        c.mid_rel.into(),
        c.tail_rel.into(),
        c.lhs_rel.into(),
        c.rhs_rel.into(),
        c.direct_rel.into(),
        c.checks.bracketing.into(),
        c.checks.i_choice.into(),
        c.checks.membership.into(),
        c.checks.k_prime_window.into(),
        c.checks.head_sum.into(),
        c.verdict.into(),
        c.sound().into(),
    ]
}

const CERTIFICATE_HEADER: [&str; 20] = [
    "index",
    "x",
    "y",
    "ln_gap",
    "k_xy",
    "k_prime",
    "i",
    "head_rel",
    "mid_rel",
    "tail_rel",
    "lhs_rel",
    "rhs_rel",
    "direct_rel",
    "bracketing",
    "i_choice",
    "membership",
    "k_prime_window",
    "head_sum",
    "verdict",
    "sound",
];

fn parse_numerator(field: &str, s: &str) -> Result<BigUint> {
    s.trim().parse().map_err(|_| LabError::config(field, "must be a non-negative decimal integer"))
}

pub fn certify(args: &CertifyArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let emb = embedding(&a.embedding)?;
    let certs: Vec<ProofCertificate> = match (&a.x, &a.y) {
        (Some(x), Some(y)) => {
            let e = a.exponent.ok_or_else(|| LabError::config("exponent", "required with x and y"))?;
            let x = BadicPoint::new(parse_numerator("x", x)?, e, emb.b())?;
            let y = BadicPoint::new(parse_numerator("y", y)?, e, emb.b())?;
            vec![proof_certificate(&emb, &x, &y)?]
        }
        (None, None) => {
            let n = a.pairs.unwrap_or(100);
            require(n >= 1, "pairs", "must be >= 1")?;
            let max_k = a.max_k.unwrap_or(20);
            let extra = a.extra_digits.unwrap_or(2);
            let seed = a.seed.unwrap_or(0);
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng_for(seed, stream::PAIRS, i as u64);
                    let (x, y) = random_pair(&emb, &mut rng, max_k, extra);
                    proof_certificate(&emb, &x, &y)
                })
                .collect::<std::result::Result<Vec<_>, _>>()?
        }
        _ => return Err(LabError::config("y", "x and y must be given together")),
    };
    let mut t = Table::new(&CERTIFICATE_HEADER);
    for (i, c) in certs.iter().enumerate() {
        t.push(certificate_row(i, c));
    }
    let ok = certs.iter().filter(|c| c.verdict && c.checks.all() && c.sound()).count();
    Ok(Outcome::single(a.io.out, t.to_bytes(), format!("{ok}/{} certificates verified", certs.len())))
}

pub fn scan(args: &ScanArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let mut e = a.embedding.clone();
    e.l0 = Some(e.l0.unwrap_or(2));
    let emb = embedding(&e)?;
    let tol = a.tol.unwrap_or(1e-10);
    check_tol(tol)?;
    let pair_cap = a.pair_cap.unwrap_or(DEFAULT_PAIR_CAP);
    require(pair_cap >= 1, "pair_cap", "must be >= 1")?;
    let scales = a.scales.clone().unwrap_or_else(|| (4..=12).collect());
    let opts = ScanOptions {
        coords: a.coords.clone(),
        tol,
        metric: a.metric.map_or(Metric::Euclidean, Metric::from),
        seed: a.seed.unwrap_or(0),
        pair_cap,
    };
    let r = biholder_scan(&emb, &scales, &opts)?;
    let mut t = Table::new(&["scale", "min_ratio", "max_ratio", "pairs", "sampled"]);
    for s in &r.per_scale {
        t.push(vec![s.scale.into(), s.min_ratio.into(), s.max_ratio.into(), s.pairs.into(), s.sampled.into()]);
    }
    let summary = format!(
        "c1 ≈ {} at {:?}, c2 ≈ {} at {:?}",
        r.c1_estimate, r.argmin, r.c2_estimate, r.argmax
    );
    Ok(Outcome::single(a.io.out, t.to_bytes(), summary))
}

fn translates(g: &PeriodicFunction, shifts: &[f64]) -> Result<Vec<PeriodicFunction>> {
    shifts.iter().map(|&s| g.translate(s).map_err(LabError::from)).collect()
}

pub fn witness(args: &WitnessArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let shifts = a.shifts.clone().unwrap_or_else(|| vec![0.0]);
    require(!shifts.is_empty() && shifts.iter().all(|s| s.is_finite()), "shifts", "need at least one finite shift")?;
    let pair_cap = a.pair_cap.unwrap_or(DEFAULT_PAIR_CAP);
    require(pair_cap >= 1, "pair_cap", "must be >= 1")?;
    let fam = translates(p.spec.g(), &shifts)?;
    let opts = WitnessOptions {
        tol: p.tol,
        band: a.band.unwrap_or(4),
        metric: a.metric.map_or(Metric::Euclidean, Metric::from),
        seed: a.seed.unwrap_or(0),
        pair_cap,
    };
    let r = witness_search(&fam, p.spec.alpha(), p.spec.b(), a.grid_m.unwrap_or(12), &opts)?;
    let mut t = Table::new(&["m", "min_ratio"]);
    for &(m, v) in &r.decay_trend {
        t.push(vec![m.into(), v.into()]);
    }
    let summary = format!("min off-diagonal ratio {} at {:?}", r.min_offdiag_ratio, r.arg_pair);
    Ok(Outcome::single(a.io.out, t.to_bytes(), summary))
}

fn histogram_table(h: &OccupationEstimate) -> Table {
    let mut t = Table::new(&["lo", "hi", "count", "mass", "density"]);
    for k in 0..h.n_bins() {
        t.push(vec![
            h.bin_edges[k].into(),
            h.bin_edges[k + 1].into(),
            h.counts[k].into(),
            h.masses[k].into(),
            h.density[k].into(),
        ]);
    }
    t
}

fn sample_sizes(samples: Option<usize>, bins: Option<usize>) -> Result<(usize, usize)> {
    let samples = samples.unwrap_or(DEFAULT_SAMPLES);
    let bins = bins.unwrap_or(DEFAULT_BINS);
    require(bins >= 1, "bins", "must be >= 1")?;
    require(samples >= bins, "samples", "must be >= bins")?;
    Ok((samples, bins))
}

pub fn occupation(args: &OccupationArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let (n, bins) = sample_sizes(a.samples, a.bins)?;
    let h = occupation_histogram(&p.spec, n, bins, a.seed.unwrap_or(0), p.tol)?;
    let summary = format!("range [{}, {}], mean {}", h.y_min, h.y_max, h.mean());
    Ok(Outcome::single(a.io.out, histogram_table(&h).to_bytes(), summary))
}

pub fn oblique(args: &ObliqueArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let (n, bins) = sample_sizes(a.samples, a.bins)?;
    let theta = a.theta.unwrap_or(std::f64::consts::FRAC_PI_2);
    require((0.0..2.0 * std::f64::consts::PI).contains(&theta), "theta", "must lie in [0, 2π)")?;
    let h = oblique_occupation(&p.spec, theta, n, bins, a.seed.unwrap_or(0), p.tol)?;
    let summary = format!("theta {theta}: range [{}, {}]", h.y_min, h.y_max);
    Ok(Outcome::single(a.io.out, histogram_table(&h).to_bytes(), summary))
}

struct FourierParams {
    xi_max: f64,
    n_xi: usize,
    samples: usize,
}

fn fourier_params(a: &FourierArgs) -> Result<FourierParams> {
    let xi_max = a.xi_max.unwrap_or(800.0);
    let n_xi = a.n_xi.unwrap_or(1601);
    let samples = a.samples.unwrap_or(DEFAULT_SAMPLES);
    require(xi_max.is_finite() && xi_max > 0.0, "xi_max", "must be positive")?;
    require(n_xi >= 2, "n_xi", "must be >= 2")?;
    require(samples >= 2, "samples", "must be >= 2")?;
    Ok(FourierParams { xi_max, n_xi, samples })
}

pub fn fourier(args: &FourierArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let f = fourier_params(&a)?;
    let c = empirical_fourier(&p.spec, f.xi_max, f.n_xi, f.samples, p.tol)?;
    let mut t = Table::new(&["xi", "re", "im", "abs2"]);
    for (xi, v) in c.xi_grid.iter().zip(&c.values) {
        t.push(vec![(*xi).into(), v.re.into(), v.im.into(), v.norm_sqr().into()]);
    }
    let summary = format!("quadrature error bound {}", c.quadrature_error_bound);
    Ok(Outcome::single(a.io.out, t.to_bytes(), summary))
}

pub fn energy(args: &EnergyArgs) -> Result<Outcome> {
    let a = resolve(args, args.fourier.io.config.as_deref())?;
    let p = function_params(&a.fourier.function)?;
    let f = fourier_params(&a.fourier)?;
    let cutoffs = a.cutoffs.clone().unwrap_or_else(|| vec![200.0, 400.0, 800.0]);
    require(cutoffs.windows(2).all(|w| w[0] <= w[1]), "cutoffs", "must be sorted")?;
    require(cutoffs.iter().all(|&c| (0.0..=f.xi_max).contains(&c)), "cutoffs", "must lie within [0, xi_max]")?;
    let c = empirical_fourier(&p.spec, f.xi_max, f.n_xi, f.samples, p.tol)?;
    let e = l2_energy(&c, &cutoffs)?;
    let mut t = Table::new(&["cutoff", "energy"]);
    for &(xi, v) in &e {
        t.push(vec![xi.into(), v.into()]);
    }
    let summary = format!("quadrature error bound {}", c.quadrature_error_bound);
    Ok(Outcome::single(a.fourier.io.out, t.to_bytes(), summary))
}

fn fit_range(range: &Option<Vec<u32>>, m_max: u32) -> Result<Option<(u32, u32)>> {
    match range.as_deref() {
        None => Ok(None),
        Some(&[lo, hi]) => {
            require(lo + 2 <= hi && hi <= m_max, "fit_range", "need lo + 2 <= hi <= m_max")?;
            Ok(Some((lo, hi)))
        }
        Some(_) => Err(LabError::config("fit_range", "expected two values lo,hi")),
    }
}

pub fn levelset(args: &LevelsetArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let ys = a.y.clone().ok_or_else(|| LabError::config("y", "at least one level is required"))?;
    require(!ys.is_empty() && ys.iter().all(|y| y.is_finite()), "y", "need finite levels")?;
    let m_max = a.m_max.unwrap_or(16);
    require(m_max >= 4, "m_max", "must be >= 4")?;
    let range = fit_range(&a.fit_range, m_max)?;
    let counts = box_count_levels(&p.spec, &ys, m_max)?;
    let mut t = Table::new(&["y", "m", "box_side", "count", "pruned", "certified"]);
    let mut summary = Vec::new();
    for (y, recs) in ys.iter().zip(&counts) {
        for r in recs {
            t.push(vec![(*y).into(), r.m.into(), r.box_side.into(), r.count.into(), r.pruned.into(), r.certified.into()]);
        }
        let (lo, hi) = range.or_else(|| default_fit_range(recs)).expect("records exist");
        summary.push(match dimension_fit(recs, p.spec.b(), lo, hi) {
            Ok(f) => format!("y = {y}: slope {} ± {} over m = {lo}..={hi}", f.slope, f.stderr),
            Err(e) => format!("y = {y}: {e}"),
        });
    }
    Ok(Outcome::single(a.io.out, t.to_bytes(), summary.join("\n")))
}

pub fn graphdim(args: &GraphdimArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let p = function_params(&a.function)?;
    let m_max = a.m_max.unwrap_or(16);
    require(m_max >= 4, "m_max", "must be >= 4")?;
    let (lo, hi) = fit_range(&a.fit_range, m_max)?.unwrap_or((6.min(m_max - 2), m_max));
    let recs = box_count_graph(&p.spec, m_max, p.tol)?;
    let fit = dimension_fit(&recs, p.spec.b(), lo, hi)?;
    let summary = format!("slope {} ± {} over m = {lo}..={hi} (r² = {})", fit.slope, fit.stderr, fit.r_squared);
    Ok(Outcome::single(a.io.out, box_count_table(&recs).to_bytes(), summary))
}

/// The experiment described by `probe-run` arguments.
pub fn experiment_config(a: &ProbeRunArgs) -> Result<ExperimentConfig> {
    let d = ExperimentConfig::default();
    let fit = match (fit_range(&a.fit_range, a.m_max.unwrap_or(d.m_max))?, a.fit_fraction) {
        (Some(_), Some(_)) => return Err(LabError::config("fit_range", "conflicts with fit_fraction")),
        (Some((m_lo, m_hi)), None) => FitWindow::Fixed { m_lo, m_hi },
        (None, Some(fraction)) => FitWindow::Certified { fraction },
        (None, None) => d.fit,
    };
    let energy = if a.energy.unwrap_or(false) {
        let e = EnergyConfig::default();
        Some(EnergyConfig {
            xi_max: a.xi_max.unwrap_or(e.xi_max),
            n_xi: a.n_xi.unwrap_or(e.n_xi),
            n_samples: a.energy_samples.unwrap_or(e.n_samples),
            cutoffs: a.cutoffs.clone().unwrap_or(e.cutoffs),
        })
    } else {
        None
    };
    let base = match &a.base {
        Some(g) => g.build()?,
        None => d.base.clone(),
    };
    let cfg = ExperimentConfig {
        base,
        alpha: a.alpha.unwrap_or(d.alpha),
        b: a.b.unwrap_or(d.b),
        l0: a.l0.unwrap_or(d.l0),
        coords: a.coords.clone().or(d.coords),
        probes: a.probes.unwrap_or(d.probes),
        levels_per_probe: a.levels_per_probe.unwrap_or(d.levels_per_probe),
        radius: a.radius.unwrap_or(d.radius),
        seed: a.seed.unwrap_or(d.seed),
        m_max: a.m_max.unwrap_or(d.m_max),
        hist_samples: a.hist_samples.unwrap_or(d.hist_samples),
        hist_bins: a.hist_bins.unwrap_or(d.hist_bins),
        mass_exclude: a.mass_exclude.unwrap_or(d.mass_exclude),
        epsilon: a.epsilon.unwrap_or(d.epsilon),
        tol: a.tol.unwrap_or(d.tol),
        fit,
        energy,
        linearity_points: a.linearity_points.unwrap_or(d.linearity_points),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// All probes, computed in parallel and returned in index order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    (0..cfg.probes)
        .into_par_iter()
        .map(|i| run_probe(cfg, i))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(LabError::from)
}

pub fn probe_run(args: &ProbeRunArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let cfg = experiment_config(&a)?;
    let records = run_experiment(&cfg)?;
    let medians: Vec<String> =
        records.iter().map(|r| r.median_slope.map_or("none".into(), |m| format!("{m:.4}"))).collect();
    let summary = format!(
        "{} probes ({}); median slopes [{}]",
        records.len(),
        records.first().map_or("", |r| r.sampling.as_str()),
        medians.join(", ")
    );
    Ok(Outcome::single(a.io.out, ndjson(&records)?, summary))
}

#[derive(Debug, Serialize)]
struct FigureMeta {
    g: String,
    g_caveat: &'static str,
    alpha: f64,
    b: u32,
    shifts: Vec<f64>,
    c: f64,
    resolution: usize,
    band: usize,
    metric: MetricArg,
    format: &'static str,
    counts: ZeroLociCounts,
}

pub fn figure(args: &FigureArgs) -> Result<Outcome> {
    let a = resolve(args, args.io.config.as_deref())?;
    let out = a.io.out.clone().ok_or_else(|| LabError::config("out", "an image path is required"))?;
    let alpha = a.alpha.unwrap_or(0.7);
    let b = a.b.unwrap_or(2);
    let tol = a.tol.unwrap_or(1e-12);
    check_alpha(alpha, true)?;
    check_b(b)?;
    check_tol(tol)?;
    let gspec = a.g.clone().unwrap_or(GSpec::Named("triangle".into()));
    let g = gspec.build()?;
    let shifts = a.shifts.clone().unwrap_or_else(|| vec![0.0, 0.214, 0.534]);
    require((1..=3).contains(&shifts.len()), "shifts", "between one and three shifts are supported")?;
    require(shifts.iter().all(|s| s.is_finite()), "shifts", "must be finite")?;
    let metric = a.metric.unwrap_or(MetricArg::Euclidean);
    let opts = ZeroLociOptions {
        c: a.c.unwrap_or(0.2),
        resolution: a.resolution.unwrap_or(1024),
        band: a.band.unwrap_or(4),
        metric: metric.into(),
        tol,
    };
    require(opts.c.is_finite() && opts.c >= 0.0, "c", "must be finite and non-negative")?;
    require(opts.resolution >= 64, "resolution", "must be >= 64")?;
    let z = render_zero_loci(&shifts, &g, alpha, b, &opts)?;
    let meta = FigureMeta {
        g: gspec.id(),
        g_caveat: "the reference figure's base function is not given in closed form; this rendering uses the stated g",
        alpha,
        b,
        shifts,
        c: opts.c,
        resolution: opts.resolution,
        band: opts.band,
        metric,
        format: if z.image.format().channels() == 1 { "P5" } else { "P6" },
        counts: z.counts.clone(),
    };
    let mut meta_bytes = serde_json::to_vec_pretty(&meta).map_err(|e| LabError::Numeric(e.to_string()))?;
    meta_bytes.push(b'\n');
    let summary = format!(
        "{} pixels shaded in every channel outside the {}-pixel band",
        z.counts.all_shaded_outside_band, opts.band
    );
    Ok(Outcome {
        artifacts: vec![
            Artifact { path: Some(out), bytes: z.image.to_pnm() },
            Artifact { path: a.meta.clone(), bytes: meta_bytes },
        ],
        summary,
    })
}
