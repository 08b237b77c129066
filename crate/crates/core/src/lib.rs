//! Numerical laboratory for lacunary Weierstrass sums `Σ b^{-αk} g(b^k x)`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure and
//! deterministic: sample loops run in a fixed order and every random stream is
//! derived from an explicit 64-bit seed (see [`rng`]). File formats, the CLI
//! and thread-level parallelism live in the `weierstrass-lab` companion crate.
//!
//! Module map:
//!
//! - [`funcore`]: periodic Lipschitz functions and Weierstrass sums with a
//!   certified truncation error.
//! - [`badic`]: exact b-adic rationals for sub-machine-precision separations.
//! - [`embed`]: the tent-function embedding family, its constants, per-pair
//!   proof certificates and empirical bi-Hölder scans.
//! - [`occup`]: occupation histograms, empirical Fourier transforms and L² energy.
//! - [`levelset`]: certified box counting for level sets and graphs.
//! - [`probe`]: random probe perturbations and prevalence experiments.
//! - [`raster`]: zero-loci rendering into an in-memory raster.

#![no_std]

extern crate alloc;

pub mod badic;
pub mod embed;
pub mod error;
pub mod funcore;
pub mod levelset;
pub mod occup;
pub mod probe;
pub mod raster;
pub mod rng;

pub use error::{Error, Result};
pub use funcore::{PeriodicFunction, Primitive, WeierstrassSpec};
