//! Command-line surface of `wlab`.
//!
//! Each flag's help text states the precondition checked before dispatch.
//! The same keys may be supplied in a JSON `--config` file; flags win.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use weierstrass_core::embed::Metric;

use crate::config::GSpec;

#[derive(Debug, Parser)]
#[command(name = "wlab", version, about = "Numerical laboratory for lacunary Weierstrass sums")]
pub struct Cli {
    /// Worker threads, >= 1 (default: logical cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate W_g at points, CSV `x,w`
    Eval(EvalArgs),
    /// Embedding constants C_alpha, l0, c_theory and d, JSON
    Constants(ConstantsArgs),
    /// Coordinates of the tent embedding, CSV
    Family(FamilyArgs),
    /// Replay the bi-Hölder proof on random or given b-adic pairs, CSV
    Certify(CertifyArgs),
    /// Empirical bi-Hölder ratios of a dense embedding per scale, CSV
    Scan(ScanArgs),
    /// Smallest off-diagonal ratio for translates of g, CSV per grid
    Witness(WitnessArgs),
    /// Occupation histogram of W, CSV
    Occupation(OccupationArgs),
    /// Empirical Fourier transform of the occupation measure, CSV
    Fourier(FourierArgs),
    /// L² energy E(Ξ) of the occupation measure, CSV
    Energy(EnergyArgs),
    /// θ-oblique occupation histogram, CSV
    Oblique(ObliqueArgs),
    /// Certified box counts of level sets, CSV
    Levelset(LevelsetArgs),
    /// Certified box counts of the graph and its slope, CSV
    Graphdim(GraphdimArgs),
    /// Random-probe level-set and energy experiment, NDJSON
    ProbeRun(ProbeRunArgs),
    /// Zero-loci raster for up to three translates, PGM/PPM
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricArg {
    Euclidean,
    Circle,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Circle => Metric::Circle,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct IoArgs {
    /// JSON config with the same keys as the flags; flags override it
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FunctionArgs {
    /// Base function: cosine, sine, triangle, zero, or a JSON object
    /// `{"terms":[{"weight":1.0,"kind":"cosine"},...]}` (default: cosine)
    #[arg(long)]
    pub g: Option<GSpec>,
    /// Hölder exponent, 0 < alpha <= 1 (default: 0.7)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Base, integer b >= 2 (default: 2)
    #[arg(long)]
    pub b: Option<u32>,
    /// Truncation tolerance, tol > 0 (default: 1e-10)
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Points, comma separated, finite
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    /// Uniform grid i/n for i = 0..=n when --x is absent, n >= 1 (default: 16)
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingArgs {
    /// Hölder exponent, 0 < alpha < 1 (default: 0.7)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Base, integer b >= 2 (default: 2)
    #[arg(long)]
    pub b: Option<u32>,
    /// Override of l0 >= 1 (default: the theoretical value)
    #[arg(long)]
    pub l0: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub embedding: EmbeddingArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub embedding: EmbeddingArgs,
    /// Number of tent coordinates listed, >= 1 (default: 64); the raw coordinate is always last
    #[arg(long)]
    pub limit: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub embedding: EmbeddingArgs,
    /// Random pairs to certify, >= 1 (default: 100); ignored with --x/--y
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Largest separation scale k_xy of random pairs (default: 20)
    #[arg(long)]
    pub max_k: Option<u32>,
    /// Extra b-adic digits of random gaps (default: 2)
    #[arg(long)]
    pub extra_digits: Option<u32>,
    /// Seed (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Numerator of x = X / b^exponent, decimal integer
    #[arg(long)]
    pub x: Option<String>,
    /// Numerator of y = Y / b^exponent, decimal integer, y > x
    #[arg(long)]
    pub y: Option<String>,
    /// Common exponent of --x and --y
    #[arg(long)]
    pub exponent: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub embedding: EmbeddingArgs,
    /// Grid exponents m >= 1, comma separated (default: 4..=12)
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<u32>>,
    /// Coordinate indices, comma separated (default: all)
    #[arg(long, value_delimiter = ',')]
    pub coords: Option<Vec<u64>>,
    /// Distance on the parameter domain (default: euclidean)
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Truncation tolerance, tol > 0 (default: 1e-10)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Pairs per scale before seeded subsampling, >= 1 (default: 1e7)
    #[arg(long)]
    pub pair_cap: Option<u64>,
    /// Seed of the subsample (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Translations s_i of g, comma separated, at least one (default: 0)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub shifts: Option<Vec<f64>>,
    /// Finest grid exponent, >= 4 (default: 12)
    #[arg(long)]
    pub grid_m: Option<u32>,
    /// Diagonal band skipped, in grid cells (default: 4)
    #[arg(long)]
    pub band: Option<u64>,
    /// Distance on the parameter domain (default: euclidean)
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Pairs per grid before seeded subsampling, >= 1 (default: 1e7)
    #[arg(long)]
    pub pair_cap: Option<u64>,
    /// Seed of the subsample (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct OccupationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Stratified samples, samples >= bins (default: 2^20)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Histogram bins, >= 1 (default: 256)
    #[arg(long)]
    pub bins: Option<usize>,
    /// Seed of the stratified jitter (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ObliqueArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Projection angle, 0 <= theta < 2π (default: π/2)
    #[arg(long)]
    pub theta: Option<f64>,
    /// Stratified samples, samples >= bins (default: 2^20)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Histogram bins, >= 1 (default: 256)
    #[arg(long)]
    pub bins: Option<usize>,
    /// Seed of the stratified jitter (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FourierArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Largest frequency, xi_max > 0 (default: 800)
    #[arg(long)]
    pub xi_max: Option<f64>,
    /// Frequency grid points, >= 2 (default: 1601)
    #[arg(long)]
    pub n_xi: Option<usize>,
    /// Midpoint quadrature nodes, >= 2 (default: 2^20)
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub fourier: FourierArgs,
    /// Sorted cutoffs within [0, xi_max], comma separated (default: 200,400,800)
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct LevelsetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Levels y, comma separated, finite
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Option<Vec<f64>>,
    /// Finest depth, m_max >= 4 with 2b^(m_max+2) below 2^128 (default: 16)
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Regression window lo,hi with lo + 2 <= hi <= m_max (default: middle half)
    #[arg(long, value_delimiter = ',')]
    pub fit_range: Option<Vec<u32>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphdimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Finest column depth, m_max >= 4 with b^m_max <= 2^24 (default: 16)
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Regression window lo,hi with lo + 2 <= hi <= m_max (default: 6,m_max)
    #[arg(long, value_delimiter = ',')]
    pub fit_range: Option<Vec<u32>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeRunArgs {
    /// Base function, as for `eval` (default: cosine)
    #[arg(long)]
    pub base: Option<GSpec>,
    /// Hölder exponent, 0 < alpha < 1 (default: 0.7)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Base, integer b >= 2 (default: 2)
    #[arg(long)]
    pub b: Option<u32>,
    /// Embedding depth l0 >= 1 with at most 65536 coordinates (default: 2)
    #[arg(long)]
    pub l0: Option<u32>,
    /// Perturbed tent coordinates (default: all)
    #[arg(long, value_delimiter = ',')]
    pub coords: Option<Vec<u64>>,
    /// Probe samples, >= 0 (default: 20)
    #[arg(long)]
    pub probes: Option<usize>,
    /// Levels per probe (default: 50)
    #[arg(long)]
    pub levels_per_probe: Option<usize>,
    /// Radius of the uniform probe ball, > 0 (default: 1)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Master seed (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Finest box-count depth, >= 4 (default: 24)
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Histogram samples, >= hist_bins (default: 65536)
    #[arg(long)]
    pub hist_samples: Option<usize>,
    /// Histogram bins, >= 1 (default: 256)
    #[arg(long)]
    pub hist_bins: Option<usize>,
    /// Mass excluded from level sampling, in [0, 1) (default: 0.02)
    #[arg(long)]
    pub mass_exclude: Option<f64>,
    /// Half-width of the slope window around 1 - alpha, >= 0 (default: 0.1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Truncation tolerance, > 0 (default: 1e-10)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Certified fit window: smallest depth with ω(b^-m/2) <= fraction · range, > 0 (default: 0.1)
    #[arg(long)]
    pub fit_fraction: Option<f64>,
    /// Fixed fit window lo,hi instead of the certified one
    #[arg(long, value_delimiter = ',')]
    pub fit_range: Option<Vec<u32>>,
    /// Also record the occupation energy curve
    #[arg(long)]
    pub energy: Option<bool>,
    /// Energy: largest frequency (default: 800)
    #[arg(long)]
    pub xi_max: Option<f64>,
    /// Energy: frequency grid points (default: 1601)
    #[arg(long)]
    pub n_xi: Option<usize>,
    /// Energy: quadrature nodes (default: 65536)
    #[arg(long)]
    pub energy_samples: Option<usize>,
    /// Energy: sorted cutoffs (default: 200,400,800)
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<f64>>,
    /// Linearity check points per probe (default: 20)
    #[arg(long)]
    pub linearity_points: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FigureArgs {
    /// Base function, as for `eval` (default: triangle)
    #[arg(long)]
    pub g: Option<GSpec>,
    /// Hölder exponent, 0 < alpha <= 1 (default: 0.7)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Base, integer b >= 2 (default: 2)
    #[arg(long)]
    pub b: Option<u32>,
    /// Translations, one to three (default: 0,0.214,0.534)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub shifts: Option<Vec<f64>>,
    /// Shading constant, c >= 0 (default: 0.2)
    #[arg(long)]
    pub c: Option<f64>,
    /// Pixels per side, >= 64 (default: 1024)
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Diagonal band half-width in pixels (default: 4)
    #[arg(long)]
    pub band: Option<usize>,
    /// Distance on the parameter domain (default: euclidean)
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Truncation tolerance, > 0 (default: 1e-12)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Metadata JSON path (default: stdout)
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub io: IoArgs,
}
