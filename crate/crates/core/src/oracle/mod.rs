//! Independent reference constructions and statistical cross-checks.
//!
//! Everything here exists to validate the exact samplers from the outside:
//! series and random-walk constructions of Brownian motion that share no
//! code with the midpoint-refinement sampler, Kolmogorov–Smirnov tests
//! against exact quantile functions, and the empirical tabulation of the
//! modulus-parameter distribution that the path sampler draws from by
//! default.

pub mod constructions;
pub mod ks;

pub use constructions::{
    donsker, karhunen_loeve, levy_ciesielski, PathConstruction, RandomWalkConstruction,
    SchauderBasis, SchauderConstruction, SineSeriesConstruction,
};
pub use ks::{kolmogorov_p, ks_test, ks_test_with_grid, ks_two_sample, KsReport, ReferenceGrid};

use crate::bitsource::{BitSourceError, BitStream};
use crate::dyadic::{dyadic_to_rational, Dyadic};
use crate::measures::{MeasureError, TableCdf};
use crate::wiener::{compute_c, ModulusFamily, WienerError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Bits(#[from] BitSourceError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Wiener(#[from] WienerError),
    #[error("need at least 20 samples, got {0}")]
    TooFewSamples(usize),
    #[error("construction {0:?} is not registered (available: {1})")]
    UnknownConstruction(String, String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Named path constructions, selectable at runtime.
pub struct OracleRegistry {
    map: BTreeMap<String, Arc<dyn PathConstruction>>,
}

impl OracleRegistry {
    pub fn empty() -> Self {
        OracleRegistry { map: BTreeMap::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(SchauderConstruction));
        r.register(Arc::new(SineSeriesConstruction));
        r.register(Arc::new(RandomWalkConstruction));
        r
    }

    pub fn register(&mut self, c: Arc<dyn PathConstruction>) {
        self.map.insert(c.id().to_string(), c);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(|s| s.as_str())
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn PathConstruction>, OracleError> {
        self.map.get(name).cloned().ok_or_else(|| {
            OracleError::UnknownConstruction(
                name.to_string(),
                self.names().collect::<Vec<_>>().join(", "),
            )
        })
    }
}

/// Sorted sample values with their step CDF (heights k/N).
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<Dyadic>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<Dyadic>) -> Result<Self, OracleError> {
        if values.is_empty() {
            return Err(OracleError::InvalidInput("empty sample".to_string()));
        }
        values.sort();
        Ok(EmpiricalCdf { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[Dyadic] {
        &self.sorted
    }

    /// Fraction of samples ≤ x.
    pub fn fraction_at_or_below(&self, x: &Dyadic) -> f64 {
        self.sorted.partition_point(|v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Exact breakpoint rows (x_(k), k/N) prefixed with (x_(1), 0), the form
    /// the table-CDF loader accepts. Repeated sample values become atoms.
    pub fn breakpoint_rows(&self) -> Vec<(BigRational, BigRational)> {
        let n = BigInt::from(self.sorted.len());
        let mut rows = Vec::with_capacity(self.sorted.len() + 1);
        rows.push((dyadic_to_rational(&self.sorted[0]), BigRational::zero()));
        for (i, v) in self.sorted.iter().enumerate() {
            rows.push((
                dyadic_to_rational(v),
                BigRational::new(BigInt::from(i + 1), n.clone()),
            ));
        }
        rows
    }
}

/// Result of tabulating the modulus parameter empirically.
#[derive(Debug, Clone)]
pub struct CTable {
    /// CSV text loadable as a `table:` distribution, with a metadata header
    /// recording how it was generated.
    pub csv: String,
    /// Fraction of paths already dominated at the parameter floor c = 1.
    pub floor_rate: f64,
    /// Set when the floor rate exceeds 1/2: the modulus family is then
    /// likely mis-specified for the process being measured.
    pub warning: Option<String>,
    /// The sorted parameter midpoints behind the table.
    pub c_values: Vec<Dyadic>,
}

/// Tabulate the distribution of the least dominating modulus parameter:
/// sample `n_paths` triangular-series paths on the dyadic grid of the given
/// depth, recover each path's parameter, and serialize the empirical CDF.
pub fn estimate_c_distribution(
    n_paths: usize,
    depth: usize,
    fam: &dyn ModulusFamily,
    stream: &mut BitStream,
    seed_label: &str,
) -> Result<CTable, OracleError> {
    if n_paths < 100 {
        return Err(OracleError::InvalidInput(format!(
            "need at least 100 paths for a usable table, got {n_paths}"
        )));
    }
    if depth == 0 || depth > 12 {
        return Err(OracleError::InvalidInput(format!(
            "grid depth must be in 1..=12, got {depth}"
        )));
    }
    let mut key: u64 = 0;
    for _ in 0..64 {
        key = (key << 1) | u64::from(stream.next_bit()?);
    }
    let root = stream.substream(key);
    let grid: Vec<Dyadic> = (0..=(1usize << depth))
        .map(|k| Dyadic::new(BigInt::from(k), -(depth as i64)))
        .collect();
    let results: Vec<(Dyadic, bool)> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut s = root.substream(i as u64);
            let values = levy_ciesielski(depth as u32, &mut s, &grid, 20)?;
            let c = compute_c(&values, fam, 10)?;
            Ok((c.c.midpoint(), c.below_floor))
        })
        .collect::<Result<_, OracleError>>()?;
    let floors = results.iter().filter(|(_, f)| *f).count();
    let floor_rate = floors as f64 / n_paths as f64;
    let warning = (floor_rate > 0.5).then(|| {
        format!(
            "{:.0}% of paths are dominated at the parameter floor; \
             the modulus family looks mis-specified for this process",
            floor_rate * 100.0
        )
    });
    let cdf = EmpiricalCdf::new(results.into_iter().map(|(c, _)| c).collect())?;
    let table = TableCdf::with_id("cdist".to_string(), cdf.breakpoint_rows())
        .map_err(OracleError::Measure)?;
    let csv = table.to_csv_string(&[
        ("n_paths", n_paths.to_string()),
        ("depth", depth.to_string()),
        ("family", fam.family_id().to_string()),
        ("seed", seed_label.to_string()),
    ]);
    Ok(CTable { csv, floor_rate, warning, c_values: cdf.sorted })
}
