//! Command-line interface: certified sampling of reals and Brownian paths
//! from fair coin flips, reference oracles, and validation suites.
//!
//! All randomness is routed through one root bit stream derived from
//! `--seed`; each subcommand works in its own substream, and item `i` of a
//! `--count` batch in a substream of that, so output bytes are a pure
//! function of argv. Exit codes: 0 success, 1 validation or runtime error,
//! 2 statistical-suite failure.

mod render;

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use randreal::measures::TableCdf;
use randreal::{
    estimate_c_distribution, push_bits, run_suite, sample_c, sample_path_with_cap, sample_real,
    shipped_c_table, BitStream, DistributionRegistry, Ladder, LevyModulus, OracleRegistry,
    SemiInverseCdf, WeightTable, WienerPath, SUITE_NAMES,
};
use render::{decimal_exact, parse_dyadic_times, DyadicJson, IntervalJson};
use serde::Serialize;

/// Coin-flip budget for one real-valued draw.
const DRAW_BIT_CAP: u64 = 1 << 20;
/// Enclosure width 2^-10 for modulus parameters drawn from a distribution.
const C_PRECISION: u32 = 10;

#[derive(Parser)]
#[command(
    name = "randreal",
    version,
    about = "Certified sampling of continuous data from fair coin flips",
    disable_help_subcommand = true
)]
struct Cli {
    /// Root seed for deterministic runs; omitted, the OS entropy pool seeds the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Upper bound on any requested precision, and the bit budget per
    /// realizer output bit and per accept/reject comparison.
    #[arg(long, global = true, default_value_t = 256)]
    precision_cap: u32,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for --count batches and suite internals.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Print the number of coin flips consumed to stderr after the run.
    #[arg(long, global = true)]
    report_bits: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw reals as certified enclosures of width at most 2^-precision.
    SampleReal {
        /// Distribution: uniform | gaussian | cantor | dirac:<r> | table:<file.csv>
        #[arg(long)]
        dist: String,
        /// Enclosure width bound, as a power of two.
        #[arg(long)]
        precision: u32,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Transform fair bits into bits distributed per a cylinder-weight table.
    Push {
        /// JSON map from bit-string cylinders to exact rational weights.
        #[arg(long)]
        weights: PathBuf,
        /// Number of output bits per run.
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Sample Brownian paths carrying a modulus-of-continuity certificate.
    SamplePath {
        /// Dyadic grid depth: values at k/2^depth.
        #[arg(long)]
        depth: usize,
        /// Enclosure width bound for grid values, as a power of two.
        #[arg(long)]
        precision: u32,
        /// Parameter distribution: a CDF table file or dirac:<C>.
        /// Defaults to the shipped empirical table.
        #[arg(long)]
        c_dist: Option<String>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Override the global --format for this subcommand.
        #[arg(long, value_enum)]
        emit: Option<Format>,
    },
    /// Run a reference construction of Brownian motion at given times.
    Oracle {
        /// schauder | kl | donsker
        construction: String,
        /// Size knob: truncation level, series length, or step count.
        #[arg(long)]
        n: u64,
        /// Comma-separated dyadic times in [0,1], e.g. 1/4,1/2,3/4.
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Enclosure width bound for series constructions.
        #[arg(long, default_value_t = 12)]
        precision: u32,
    },
    /// Tabulate the empirical distribution of the least dominating modulus
    /// parameter over sampled paths, and write it as a CDF table.
    EstimateCdist {
        #[arg(long)]
        paths: usize,
        /// Dyadic grid depth the parameter is recovered on.
        #[arg(long)]
        depth: usize,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a validation suite and emit its JSON report.
    Validate {
        /// marginals | certificates | realizer
        #[arg(long)]
        suite: String,
    },
}

enum CliError {
    /// Bad arguments, unreadable inputs, or a runtime sampling failure.
    Validation(String),
    /// A statistical suite ran to completion and failed.
    SuiteFailure(String),
}

macro_rules! from_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}
from_err!(
    randreal::MeasureError,
    randreal::RealizerError,
    randreal::WienerError,
    randreal::OracleError,
    randreal::BitSourceError
);

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::SuiteFailure(msg)) => {
            eprintln!("{msg}");
            std::process::exit(2);
        }
    }
}

/// Substream keys, one per subcommand.
mod tag {
    pub const SAMPLE_REAL: u64 = 1;
    pub const PUSH: u64 = 2;
    pub const SAMPLE_PATH: u64 = 3;
    pub const ORACLE: u64 = 4;
    pub const ESTIMATE: u64 = 5;
}

fn run(cli: Cli) -> Result<(), CliError> {
    let root = match cli.seed {
        Some(s) => BitStream::from_seed(s),
        None => BitStream::from_entropy(),
    };
    let threads = cli.threads.max(1);
    let bits: u64;

    match &cli.cmd {
        Cmd::SampleReal { dist, precision, count } => {
            require_precision(*precision, cli.precision_cap)?;
            let d = DistributionRegistry::with_defaults().build(dist)?;
            let sub = root.substream(tag::SAMPLE_REAL);
            let items = parallel_items(*count, threads, |i| {
                let mut s = sub.substream(i);
                let r = sample_real(&d, &mut s, *precision, DRAW_BIT_CAP)?;
                Ok((r, s.total_consumed()))
            })?;
            bits = items.iter().map(|(_, b)| b).sum();
            emit_sample_real(cli.format, dist, *precision, &items);
        }
        Cmd::Push { weights, depth, count } => {
            let table = WeightTable::from_json_path(weights)?;
            let ladder = Ladder::with_cap(cli.precision_cap);
            let sub = root.substream(tag::PUSH);
            let items = parallel_items(*count, threads, |i| {
                let mut s = sub.substream(i);
                let w = push_bits(&table, &mut s, *depth, &ladder)?;
                Ok((w.to_string(), s.total_consumed()))
            })?;
            bits = items.iter().map(|(_, b)| b).sum();
            emit_push(cli.format, weights, *depth, &items);
        }
        Cmd::SamplePath { depth, precision, c_dist, count, emit } => {
            require_precision(*precision, cli.precision_cap)?;
            let cdist = build_c_dist(c_dist.as_deref())?;
            let fam = LevyModulus;
            let cap = cli.precision_cap;
            let sub = root.substream(tag::SAMPLE_PATH);
            let items = parallel_items(*count, threads, |i| {
                let mut s = sub.substream(i);
                let c = sample_c(&cdist, &mut s, C_PRECISION)?;
                let p = sample_path_with_cap(&fam, &c, &mut s, *depth, *precision, cap)?;
                Ok((p, s.total_consumed()))
            })?;
            bits = items.iter().map(|(_, b)| b).sum();
            emit_paths(emit.unwrap_or(cli.format), &items);
        }
        Cmd::Oracle { construction, n, t, count, precision } => {
            require_precision(*precision, cli.precision_cap)?;
            let ctor = OracleRegistry::with_defaults().get(construction)?;
            let ts = parse_dyadic_times(t).map_err(CliError::Validation)?;
            let sub = root.substream(tag::ORACLE);
            let items = parallel_items(*count, threads, |i| {
                let mut s = sub.substream(i);
                let values = ctor.sample(*n, &mut s, &ts, *precision)?;
                Ok((values, s.total_consumed()))
            })?;
            bits = items.iter().map(|(_, b)| b).sum();
            emit_oracle(cli.format, construction, *n, *precision, &ts, &items);
        }
        Cmd::EstimateCdist { paths, depth, out } => {
            configure_rayon(threads);
            let mut s = root.substream(tag::ESTIMATE);
            let label = match cli.seed {
                Some(v) => v.to_string(),
                None => "entropy".to_string(),
            };
            let table = estimate_c_distribution(*paths, *depth, &LevyModulus, &mut s, &label)?;
            std::fs::write(out, &table.csv).map_err(|e| {
                CliError::Validation(format!("cannot write {}: {e}", out.display()))
            })?;
            bits = s.total_consumed();
            emit_estimate(cli.format, *paths, *depth, &table, out);
        }
        Cmd::Validate { suite } => {
            configure_rayon(threads);
            let seed = match cli.seed {
                Some(s) => s,
                None => {
                    let mut e = BitStream::from_entropy();
                    let mut k = 0u64;
                    for _ in 0..64 {
                        k = (k << 1) | u64::from(e.next_bit()?);
                    }
                    k
                }
            };
            let report = run_suite(suite, seed).ok_or_else(|| {
                CliError::Validation(format!(
                    "unknown suite {suite:?}; available: {}",
                    SUITE_NAMES.join(", ")
                ))
            })?;
            println!("{}", report.to_json_string());
            if cli.report_bits {
                eprintln!("bits consumed: untracked (suites manage their own streams)");
            }
            if !report.passed {
                return Err(CliError::SuiteFailure(format!(
                    "suite {suite} failed; see report above"
                )));
            }
            return Ok(());
        }
    }

    if cli.report_bits {
        eprintln!("bits consumed: {bits}");
    }
    Ok(())
}

fn require_precision(precision: u32, cap: u32) -> Result<(), CliError> {
    if precision > cap {
        return Err(CliError::Validation(format!(
            "precision {precision} exceeds --precision-cap {cap}"
        )));
    }
    Ok(())
}

fn build_c_dist(spec: Option<&str>) -> Result<Arc<dyn SemiInverseCdf>, CliError> {
    match spec {
        None => Ok(Arc::new(shipped_c_table()) as Arc<dyn SemiInverseCdf>),
        Some(s) if s.starts_with("dirac:") => {
            Ok(DistributionRegistry::with_defaults().build(s)?)
        }
        Some(path) => Ok(Arc::new(TableCdf::from_csv_path(path)?) as Arc<dyn SemiInverseCdf>),
    }
}

fn configure_rayon(threads: usize) {
    // Best-effort: later calls with a pool already built are a no-op.
    let _ = rayon_build(threads);
}

fn rayon_build(threads: usize) -> Result<(), Box<dyn std::error::Error>> {
    randreal::configure_thread_pool(threads)?;
    Ok(())
}

/// Run `f` on indices 0..count across worker threads; results are returned
/// in index order, and the lowest-index error wins, so output does not
/// depend on the thread count.
fn parallel_items<T, F>(count: usize, threads: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(u64) -> Result<T, CliError> + Sync,
{
    let workers = threads.max(1).min(count.max(1));
    if workers == 1 {
        return (0..count as u64).map(f).collect();
    }
    let mut merged: Vec<Option<Result<T, CliError>>> = Vec::with_capacity(count);
    merged.resize_with(count, || None);
    std::thread::scope(|sc| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                sc.spawn(move || {
                    (w..count)
                        .step_by(workers)
                        .map(|i| (i, f(i as u64)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker thread panicked") {
                merged[i] = Some(r);
            }
        }
    });
    merged
        .into_iter()
        .map(|slot| slot.expect("every index is assigned to a worker"))
        .collect()
}

// ---------------------------------------------------------------------------
// Output rendering. JSON carries exact mantissa/exponent pairs; CSV carries
// exact finite decimals (every endpoint is a dyadic rational).

#[derive(Serialize)]
struct RealRow {
    index: u64,
    lo: DyadicJson,
    hi: DyadicJson,
    decimal: String,
    bits_used: u64,
}

#[derive(Serialize)]
struct RealDoc<'a> {
    dist: &'a str,
    precision: u32,
    samples: Vec<RealRow>,
}

fn emit_sample_real(
    format: Format,
    dist: &str,
    precision: u32,
    items: &[(randreal::RealSample, u64)],
) {
    match format {
        Format::Json => {
            let doc = RealDoc {
                dist,
                precision,
                samples: items
                    .iter()
                    .enumerate()
                    .map(|(i, (r, b))| RealRow {
                        index: i as u64,
                        lo: DyadicJson::of(r.value.lo()),
                        hi: DyadicJson::of(r.value.hi()),
                        decimal: r.value.to_decimal_string(),
                        bits_used: *b,
                    })
                    .collect(),
            };
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Csv => {
            let mut out = String::from("index,lo,hi,bits_used\n");
            for (i, (r, b)) in items.iter().enumerate() {
                out.push_str(&format!(
                    "{i},{},{},{b}\n",
                    decimal_exact(r.value.lo()),
                    decimal_exact(r.value.hi())
                ));
            }
            print!("{out}");
        }
    }
}

#[derive(Serialize)]
struct PushRow {
    index: u64,
    bits: String,
    bits_used: u64,
}

#[derive(Serialize)]
struct PushDoc {
    weights: String,
    depth: usize,
    outputs: Vec<PushRow>,
}

fn emit_push(format: Format, weights: &PathBuf, depth: usize, items: &[(String, u64)]) {
    match format {
        Format::Json => {
            let doc = PushDoc {
                weights: weights.display().to_string(),
                depth,
                outputs: items
                    .iter()
                    .enumerate()
                    .map(|(i, (w, b))| PushRow { index: i as u64, bits: w.clone(), bits_used: *b })
                    .collect(),
            };
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Csv => {
            let mut out = String::from("index,bits,bits_used\n");
            for (i, (w, b)) in items.iter().enumerate() {
                out.push_str(&format!("{i},{w},{b}\n"));
            }
            print!("{out}");
        }
    }
}

#[derive(Serialize)]
struct PathValue {
    t: String,
    lo: DyadicJson,
    hi: DyadicJson,
    decimal: String,
}

#[derive(Serialize)]
struct CertJson {
    family: String,
    #[serde(rename = "C")]
    c: IntervalJson,
    moc: Vec<u32>,
}

#[derive(Serialize)]
struct DiagJson {
    rejections: u64,
    cap_redraws: u64,
    bits_used: u64,
}

#[derive(Serialize)]
struct PathDoc {
    depth: usize,
    grid: &'static str,
    values: Vec<PathValue>,
    cert: CertJson,
    diagnostics: DiagJson,
}

fn path_doc(p: &WienerPath, stream_bits: u64) -> PathDoc {
    PathDoc {
        depth: p.depth,
        grid: "dyadic",
        values: p
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| PathValue {
                t: format!("{k}/2^{}", p.depth),
                lo: DyadicJson::of(v.lo()),
                hi: DyadicJson::of(v.hi()),
                decimal: v.to_decimal_string(),
            })
            .collect(),
        cert: CertJson {
            family: p.cert.family.clone(),
            c: IntervalJson::of(&p.cert.c),
            moc: p.cert.moc.clone(),
        },
        diagnostics: DiagJson {
            rejections: p.diagnostics.rejections,
            cap_redraws: p.diagnostics.cap_redraws,
            bits_used: stream_bits,
        },
    }
}

fn emit_paths(format: Format, items: &[(WienerPath, u64)]) {
    match format {
        Format::Json => {
            if items.len() == 1 {
                let doc = path_doc(&items[0].0, items[0].1);
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                let docs: Vec<PathDoc> =
                    items.iter().map(|(p, b)| path_doc(p, *b)).collect();
                println!("{}", serde_json::to_string_pretty(&docs).expect("serializable"));
            }
        }
        Format::Csv => {
            let mut out = String::new();
            for (i, (p, b)) in items.iter().enumerate() {
                let moc: Vec<String> = p.cert.moc.iter().map(|m| m.to_string()).collect();
                out.push_str(&format!(
                    "# path {i}: family={} C={} rejections={} cap_redraws={} bits_used={} moc={}\n",
                    p.cert.family,
                    p.cert.c.to_decimal_string(),
                    p.diagnostics.rejections,
                    p.diagnostics.cap_redraws,
                    b,
                    moc.join(";")
                ));
            }
            out.push_str("path,k,t,lo,hi\n");
            for (i, (p, _)) in items.iter().enumerate() {
                for (k, v) in p.values.iter().enumerate() {
                    out.push_str(&format!(
                        "{i},{k},{k}/2^{},{},{}\n",
                        p.depth,
                        decimal_exact(v.lo()),
                        decimal_exact(v.hi())
                    ));
                }
            }
            print!("{out}");
        }
    }
}

#[derive(Serialize)]
struct OracleValue {
    t: String,
    lo: DyadicJson,
    hi: DyadicJson,
    decimal: String,
}

#[derive(Serialize)]
struct OracleRow {
    index: u64,
    values: Vec<OracleValue>,
}

#[derive(Serialize)]
struct OracleDoc<'a> {
    construction: &'a str,
    order: u64,
    precision: u32,
    t: Vec<String>,
    samples: Vec<OracleRow>,
}

fn emit_oracle(
    format: Format,
    construction: &str,
    order: u64,
    precision: u32,
    ts: &[randreal::Dyadic],
    items: &[(Vec<randreal::DyadicInterval>, u64)],
) {
    let t_strings: Vec<String> = ts.iter().map(decimal_exact).collect();
    match format {
        Format::Json => {
            let doc = OracleDoc {
                construction,
                order,
                precision,
                t: t_strings.clone(),
                samples: items
                    .iter()
                    .enumerate()
                    .map(|(i, (vs, _))| OracleRow {
                        index: i as u64,
                        values: vs
                            .iter()
                            .zip(&t_strings)
                            .map(|(v, t)| OracleValue {
                                t: t.clone(),
                                lo: DyadicJson::of(v.lo()),
                                hi: DyadicJson::of(v.hi()),
                                decimal: v.to_decimal_string(),
                            })
                            .collect(),
                    })
                    .collect(),
            };
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Csv => {
            let mut out = String::from("index,t,lo,hi\n");
            for (i, (vs, _)) in items.iter().enumerate() {
                for (v, t) in vs.iter().zip(&t_strings) {
                    out.push_str(&format!(
                        "{i},{t},{},{}\n",
                        decimal_exact(v.lo()),
                        decimal_exact(v.hi())
                    ));
                }
            }
            print!("{out}");
        }
    }
}

#[derive(Serialize)]
struct EstimateDoc<'a> {
    paths: usize,
    depth: usize,
    family: &'a str,
    floor_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
    out: String,
}

fn emit_estimate(
    format: Format,
    paths: usize,
    depth: usize,
    table: &randreal::CTable,
    out: &PathBuf,
) {
    let doc = EstimateDoc {
        paths,
        depth,
        family: "levy",
        floor_rate: table.floor_rate,
        warning: table.warning.clone(),
        out: out.display().to_string(),
    };
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Csv => {
            println!("paths,depth,family,floor_rate,out");
            println!("{paths},{depth},levy,{},{}", table.floor_rate, out.display());
        }
    }
}
