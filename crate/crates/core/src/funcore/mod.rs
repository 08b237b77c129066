//! Periodic Lipschitz functions and their Weierstrass sums.

mod periodic;
mod weierstrass;

pub use periodic::{combine, tent, PeriodicFunction, PiecewiseTable, Primitive};
pub use weierstrass::{
    badic_denominator, check_self_affinity, truncation_depth, Evaluator, SelfAffinityReport, WeierstrassSpec,
};

