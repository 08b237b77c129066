//! The tent-function embedding `x ↦ (W_{g_0}(x), …, W_{g_{d−1}}(x))`.

mod certificate;
mod family;
mod scan;

pub use certificate::{proof_certificate, random_pair, tent_value_exact, CertificateChecks, ProofCertificate};
pub use family::{
    build_family, compute_c_alpha, compute_l0, eval_coordinate, l0_threshold_log, EmbeddingSpec,
    DENSE_COORDINATE_CAP,
};
pub use scan::{biholder_scan, biholder_scan_family, DEFAULT_PAIR_CAP, witness_search, Metric, ScaleExtrema, ScanOptions, ScanReport, WitnessOptions, WitnessReport};
