//! Randomized computation of continuous data from fair coin flips.
//!
//! The crate turns a stream of fair bits into certified samples of
//! real-valued distributions: exact dyadic interval arithmetic at the bottom,
//! semi-inverse CDF sampling and Cantor-space realizers in the middle, and
//! Brownian motion paths carrying verifiable modulus-of-continuity
//! certificates on top. The `oracle` module provides independent float-based
//! constructions and statistical tests used to cross-check the exact
//! samplers, and `suites` bundles them into reusable validation suites.

pub mod bitsource;
pub mod dyadic;
pub mod measures;
pub mod oracle;
pub mod realizer;
pub mod suites;
pub mod wiener;

pub use bitsource::{rho_b_enclosure, BitSourceError, BitStream, Word};
pub use dyadic::{compare_strict, Dyadic, DyadicError, DyadicInterval, Ladder, StrictCmp};
pub use measures::{
    sample_real, DistributionRegistry, MeasureError, RealSample, RefinableSample, SemiInverseCdf,
};
pub use oracle::{
    donsker, estimate_c_distribution, karhunen_loeve, kolmogorov_p, ks_test, ks_two_sample,
    levy_ciesielski, CTable, EmpiricalCdf, KsReport, OracleError, OracleRegistry,
    PathConstruction,
};
pub use realizer::{
    interval_partition, push_bits, CylinderWeights, IntervalPartition, PartitionCell,
    ProductWeights, RealizerError, WeightTable,
};
pub use suites::{run_suite, shipped_c_table, CheckResult, SuiteReport, ALPHA, SUITE_NAMES};

/// Size the global worker pool used by batch estimators. Returns an error if
/// a pool is already running, which callers may ignore: the pool then keeps
/// its original size.
pub fn configure_thread_pool(
    threads: usize,
) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()
}
pub use wiener::{
    binary_moc, certificate_violations, compute_c, moc_table, sample_c, sample_path,
    sample_path_unfiltered, sample_path_with_cap, CParameter, LevyModulus, ModulusFamily,
    ModulusRegistry, PathCertificate, PathDiagnostics, WienerError, WienerPath,
};
