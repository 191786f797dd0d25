//! Seeded, reusable validation suites.
//!
//! Every check is a deterministic function of its seed: it derives all
//! randomness from one root bit stream through keyed substreams, measures
//! what the library promises (pushforward frequencies, certified structure,
//! statistical marginals), and reports a structured result. The named
//! suites bundle the checks for the command-line `validate` subcommand; the
//! acceptance tests call the same functions at their documented scales.

use crate::bitsource::BitStream;
use crate::dyadic::transcendental::sqrt2_enclosure;
use crate::dyadic::{
    compare_strict, parse_rational, rational_cmp_dyadic, Dyadic, DyadicInterval, Ladder,
    StrictCmp,
};
use crate::measures::{sample_real, DistributionRegistry, SemiInverseCdf, TableCdf};
use crate::oracle::{
    donsker, ks_test_with_grid, ks_two_sample, levy_ciesielski, ReferenceGrid,
};
use crate::realizer::{push_bits, RealizerError, WeightTable};
use crate::wiener::{
    binary_moc, certificate_violations, compute_c, sample_c, sample_path, LevyModulus,
    ModulusFamily,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::sync::Arc;
use std::time::Instant;

/// Significance level shared by every statistical subtest.
pub const ALPHA: f64 = 0.01;

/// The result of one named check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst p-value across the check's statistical subtests, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub detail: String,
    pub seconds: f64,
}

/// A bundle of checks run under one seed.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite reports always serialize")
    }
}

pub const SUITE_NAMES: [&str; 3] = ["marginals", "certificates", "realizer"];

/// Run a named suite at its documented scale. `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    let checks = match name {
        "realizer" => vec![
            check_pushforward_frequencies(seed, 5, 100_000),
            check_endpoint_partiality(seed, 1000),
        ],
        "marginals" => vec![
            check_inverse_transform(seed, 20, 10_000),
            check_semi_inverse_structure(),
            check_marginal_fidelity(seed, 5000, 2000),
            check_oracle_sanity(seed, 5000),
        ],
        "certificates" => vec![
            check_modulus_points(),
            check_certificate_soundness(seed, 1000),
            check_parameter_roundtrip(seed, 1000),
        ],
        _ => return None,
    };
    Some(SuiteReport {
        suite: name.to_string(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// The empirical modulus-parameter distribution shipped with the crate,
/// generated by `examples/gen_c_table.rs` (parameters in its header).
pub fn shipped_c_table() -> TableCdf {
    static CSV: &str = include_str!("../data/levy_c_table.csv");
    TableCdf::from_csv_str_with_id("cdist".to_string(), CSV)
        .expect("the shipped parameter table is valid")
}

fn shipped_c_dist() -> Arc<dyn SemiInverseCdf> {
    Arc::new(shipped_c_table())
}

fn es<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

type Outcome = Result<(bool, Option<f64>, String), String>;

fn timed(name: &str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let t = Instant::now();
    let (passed, p_value, detail) =
        f().unwrap_or_else(|e| (false, None, format!("error: {e}")));
    CheckResult {
        name: name.to_string(),
        passed,
        p_value,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Pushforward correctness at depth 3: for randomized weight tables, the
/// empirical frequency of every output cylinder over many runs stays within
/// 4 binomial standard deviations of its weight. Runtime target: 30 s.
pub fn check_pushforward_frequencies(seed: u64, tables: usize, runs: usize) -> CheckResult {
    timed("pushforward-frequencies", || {
        let start = Instant::now();
        let root = BitStream::from_seed(seed);
        let ladder = Ladder::with_cap(4096);
        let mut worst_z = 0.0f64;
        for ti in 0..tables {
            let mut tstream = root.substream(2 * ti as u64);
            let table = WeightTable::random(3, 16, &mut tstream).map_err(es)?;
            let inputs = root.substream(2 * ti as u64 + 1);
            let mut counts = [0u64; 8];
            for r in 0..runs {
                let mut s = inputs.substream(r as u64);
                let w = push_bits(&table, &mut s, 3, &ladder).map_err(es)?;
                counts[w.index_in_level() as usize] += 1;
            }
            for (i, cnt) in counts.iter().enumerate() {
                let p = table.leaf_weights()[i].to_f64().ok_or("weight out of f64 range")?;
                let sigma = (p * (1.0 - p) / runs as f64).sqrt();
                let dev = (*cnt as f64 / runs as f64 - p).abs();
                let z = if sigma > 0.0 {
                    dev / sigma
                } else if dev == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst_z = worst_z.max(z);
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < 30.0;
        Ok((
            worst_z <= 4.0 && in_time,
            None,
            format!(
                "{tables} random depth-3 tables x {runs} runs: worst cylinder deviation \
                 {worst_z:.2} sigma (limit 4); {secs:.1} s (target 30)"
            ),
        ))
    })
}

/// Partiality of the realizer at a partition endpoint: with weights
/// {1/3, 2/3}, the input 0101... encodes exactly 1/3 and must stall at
/// every budget, while random inputs terminate.
pub fn check_endpoint_partiality(seed: u64, random_inputs: usize) -> CheckResult {
    timed("endpoint-partiality", || {
        let table =
            WeightTable::from_leaves(vec![frac(1, 3), frac(2, 3)]).map_err(es)?;
        let mut stall_caps = Vec::new();
        for cap in [64u32, 256, 1024] {
            let mut endpoint_input = BitStream::cycling(vec![false, true]);
            match push_bits(&table, &mut endpoint_input, 1, &Ladder::with_cap(cap)) {
                Err(RealizerError::Stall { bits, cap: reported, .. }) => {
                    if reported != cap || bits < u64::from(cap) {
                        return Ok((
                            false,
                            None,
                            format!("stall at cap {cap} reported cap {reported}, bits {bits}"),
                        ));
                    }
                    stall_caps.push(cap);
                }
                Err(e) => return Err(es(e)),
                Ok(w) => {
                    return Ok((
                        false,
                        None,
                        format!("endpoint input produced output {w:?} under cap {cap}"),
                    ))
                }
            }
        }
        let root = BitStream::from_seed(seed);
        let ladder = Ladder::with_cap(256);
        let mut terminated = 0usize;
        for i in 0..random_inputs {
            let mut s = root.substream(i as u64);
            if push_bits(&table, &mut s, 1, &ladder).is_ok() {
                terminated += 1;
            }
        }
        Ok((
            terminated == random_inputs,
            None,
            format!(
                "input 0101... stalled at caps {stall_caps:?}; {terminated}/{random_inputs} \
                 random inputs terminated"
            ),
        ))
    })
}

/// Inverse-transform sampling reproduces each built-in law: one-sample KS
/// at significance `ALPHA` per repetition, at least 19 of 20 repetitions
/// passing per distribution, and point-mass enclosures containing the mass.
pub fn check_inverse_transform(seed: u64, reps: usize, samples: usize) -> CheckResult {
    timed("inverse-transform", || {
        let reg = DistributionRegistry::with_defaults();
        let root = BitStream::from_seed(seed);
        let mut detail = Vec::new();
        let mut all_pass = true;
        let mut worst_p = f64::INFINITY;
        for (di, name) in ["uniform", "gaussian", "cantor"].iter().enumerate() {
            let dist = reg.build(name).map_err(es)?;
            let grid = ReferenceGrid::new(&dist).map_err(es)?;
            let dist_root = root.substream(1 + di as u64);
            let mut passes = 0usize;
            for rep in 0..reps {
                let rep_root = dist_root.substream(rep as u64);
                let mut xs = Vec::with_capacity(samples);
                for i in 0..samples {
                    let mut s = rep_root.substream(i as u64);
                    let v = sample_real(&dist, &mut s, 12, 4096).map_err(es)?;
                    xs.push(v.value.midpoint());
                }
                let r = ks_test_with_grid(&xs, &grid).map_err(es)?;
                if r.p_value > ALPHA {
                    passes += 1;
                }
                worst_p = worst_p.min(r.p_value);
            }
            if passes + 1 < reps {
                all_pass = false;
            }
            detail.push(format!("{name} {passes}/{reps}"));
        }
        let dirac = reg.build("dirac:1/3").map_err(es)?;
        let q = parse_rational("1/3").map_err(es)?;
        let dirac_root = root.substream(64);
        let mut contained = 0usize;
        let dirac_draws = 100usize;
        for i in 0..dirac_draws {
            let mut s = dirac_root.substream(i as u64);
            let v = sample_real(&dirac, &mut s, 20, 4096).map_err(es)?.value;
            if rational_cmp_dyadic(&q, v.lo()) != Ordering::Less
                && rational_cmp_dyadic(&q, v.hi()) != Ordering::Greater
            {
                contained += 1;
            }
        }
        if contained != dirac_draws {
            all_pass = false;
        }
        detail.push(format!("dirac enclosures {contained}/{dirac_draws} contain 1/3"));
        Ok((all_pass, Some(worst_p), detail.join("; ")))
    })
}

/// Structural soundness of every built-in semi-inverse on a 2^8-point grid:
/// the lower inverse never certifiably exceeds the upper one, and both are
/// monotone in the quantile, at precision 2^-16.
pub fn check_semi_inverse_structure() -> CheckResult {
    timed("semi-inverse-structure", || {
        let reg = DistributionRegistry::with_defaults();
        let mut dists: Vec<(String, Arc<dyn SemiInverseCdf>)> = Vec::new();
        for name in ["uniform", "gaussian", "cantor", "dirac:1/3"] {
            dists.push((name.to_string(), reg.build(name).map_err(es)?));
        }
        dists.push(("shipped-table".to_string(), shipped_c_dist()));
        let n = 16u32;
        let mut violations = Vec::new();
        for (name, d) in &dists {
            let mut prev: Option<(DyadicInterval, DyadicInterval)> = None;
            for k in 1..256i64 {
                let t = DyadicInterval::point(Dyadic::from_pow2_ratio(k, 8));
                let lo = d.eval_lower(&t, n).map_err(es)?;
                let hi = d.eval_upper(&t, n).map_err(es)?;
                if compare_strict(&lo, &hi) == StrictCmp::Gt {
                    violations.push(format!("{name}: F<({k}/256) > F>({k}/256)"));
                }
                if let Some((plo, phi)) = &prev {
                    if compare_strict(plo, &lo) == StrictCmp::Gt {
                        violations.push(format!("{name}: F< decreases at {k}/256"));
                    }
                    if compare_strict(phi, &hi) == StrictCmp::Gt {
                        violations.push(format!("{name}: F> decreases at {k}/256"));
                    }
                }
                prev = Some((lo, hi));
            }
        }
        let ok = violations.is_empty();
        let detail = if ok {
            format!(
                "{} distributions x 255 grid points: no certified order or \
                 monotonicity violation at 2^-16",
                dists.len()
            )
        } else {
            violations.join("; ")
        };
        Ok((ok, None, detail))
    })
}

/// Point facts about the default modulus family: exact zero at gap zero,
/// the tabulated value at (1/4, 1), and the first two-dyadic refinement.
pub fn check_modulus_points() -> CheckResult {
    timed("modulus-points", || {
        let fam = LevyModulus;
        let one = DyadicInterval::point(Dyadic::one());
        let w0 = fam.omega(&DyadicInterval::zero(), &one, 16);
        let zero_exact = w0.is_point() && w0.lo().is_zero();
        let w = fam.omega(
            &DyadicInterval::point(Dyadic::from_pow2_ratio(1, 2)),
            &one,
            20,
        );
        let reference = parse_rational("0.832554611157697756353164644895").map_err(es)?;
        let tol = BigRational::new(BigInt::from(1), BigInt::from(1) << 16);
        let ref_lo = &reference - &tol;
        let ref_hi = &reference + &tol;
        let encloses = rational_cmp_dyadic(&ref_hi, w.lo()) != Ordering::Less
            && rational_cmp_dyadic(&ref_lo, w.hi()) != Ordering::Greater
            && w.width_within(16);
        let moc = binary_moc(&fam, &one, 0).map_err(es)?;
        let ok = zero_exact && encloses && moc == 2;
        Ok((
            ok,
            None,
            format!(
                "omega(0,1) exact zero: {zero_exact}; omega(1/4,1) = {} encloses \
                 0.83255 +- 2^-16: {encloses}; binary refinement at target 1: {moc} (want 2)",
                w.to_decimal_string()
            ),
        ))
    })
}

/// Certificate soundness at depth 6 with the parameter drawn from the
/// shipped table: an exhaustive recheck of every grid pair finds no
/// certified violation of any accepted certificate. Runtime target: 60 s.
pub fn check_certificate_soundness(seed: u64, n_paths: usize) -> CheckResult {
    timed("certificate-soundness", || {
        let start = Instant::now();
        let fam = LevyModulus;
        let cdist = shipped_c_dist();
        let root = BitStream::from_seed(seed);
        let mut violating_paths = 0usize;
        let mut total_rejections = 0u64;
        for i in 0..n_paths {
            let mut s = root.substream(i as u64);
            let c = sample_c(&cdist, &mut s, 10).map_err(es)?;
            let path = sample_path(&fam, &c, &mut s, 6, 12).map_err(es)?;
            total_rejections += path.diagnostics.rejections;
            if !certificate_violations(&path, &fam, 20).is_empty() {
                violating_paths += 1;
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < 60.0;
        Ok((
            violating_paths == 0 && in_time,
            None,
            format!(
                "{n_paths} accepted depth-6 paths ({total_rejections} rejected draws along \
                 the way): {violating_paths} certified violations over all grid pairs; \
                 {secs:.1} s (target 60)"
            ),
        ))
    })
}

/// Marginal fidelity of the rejection sampler with the shipped parameter
/// table: W(1) and W(1/2) against their Gaussian laws, and two-sample
/// agreement with the series and random-walk constructions at quarter
/// points.
pub fn check_marginal_fidelity(seed: u64, marginal_paths: usize, cross_paths: usize) -> CheckResult {
    timed("marginal-fidelity", || {
        let fam = LevyModulus;
        let cdist = shipped_c_dist();
        let gaussian: Arc<dyn SemiInverseCdf> =
            DistributionRegistry::with_defaults().build("gaussian").map_err(es)?;
        let ggrid = ReferenceGrid::new(&gaussian).map_err(es)?;
        let root = BitStream::from_seed(seed);
        let sqrt2 = sqrt2_enclosure(40).midpoint();

        let paths = marginal_paths.max(cross_paths);
        let deep = root.substream(1);
        let mut w_one = Vec::with_capacity(marginal_paths);
        let mut w_half_scaled = Vec::with_capacity(marginal_paths);
        let mut sampler: [Vec<Dyadic>; 3] = Default::default();
        for i in 0..paths {
            let mut s = deep.substream(i as u64);
            let c = sample_c(&cdist, &mut s, 10).map_err(es)?;
            let path = sample_path(&fam, &c, &mut s, 6, 12).map_err(es)?;
            if i < marginal_paths {
                w_one.push(path.values[64].midpoint());
                // W(1/2) ~ N(0, 1/2), so sqrt(2) W(1/2) is standard
                w_half_scaled.push(&path.values[32].midpoint() * &sqrt2);
            }
            if i < cross_paths {
                for (k, slot) in [16usize, 32, 48].into_iter().enumerate() {
                    sampler[k].push(path.values[slot].midpoint());
                }
            }
        }
        let r_one = ks_test_with_grid(&w_one, &ggrid).map_err(es)?;
        let r_half = ks_test_with_grid(&w_half_scaled, &ggrid).map_err(es)?;

        let ts = [
            Dyadic::from_pow2_ratio(1, 2),
            Dyadic::from_pow2_ratio(1, 1),
            Dyadic::from_pow2_ratio(3, 2),
        ];
        let series = root.substream(3);
        let mut lc: [Vec<Dyadic>; 3] = Default::default();
        for i in 0..cross_paths {
            let mut s = series.substream(i as u64);
            let vals = levy_ciesielski(10, &mut s, &ts, 14).map_err(es)?;
            for (k, v) in vals.iter().enumerate() {
                lc[k].push(v.midpoint());
            }
        }
        let walk = root.substream(4);
        let mut dk: [Vec<Dyadic>; 3] = Default::default();
        for i in 0..cross_paths {
            let mut s = walk.substream(i as u64);
            let vals = donsker(10_000, &mut s, &ts).map_err(es)?;
            for (k, v) in vals.into_iter().enumerate() {
                dk[k].push(v);
            }
        }
        let mut ps: Vec<(String, f64)> = vec![
            ("W(1) vs N(0,1)".to_string(), r_one.p_value),
            ("W(1/2) vs N(0,1/2)".to_string(), r_half.p_value),
        ];
        for (k, t) in ["1/4", "1/2", "3/4"].into_iter().enumerate() {
            ps.push((
                format!("sampler vs series at t={t}"),
                ks_two_sample(&sampler[k], &lc[k]).map_err(es)?.p_value,
            ));
            ps.push((
                format!("sampler vs walk at t={t}"),
                ks_two_sample(&sampler[k], &dk[k]).map_err(es)?.p_value,
            ));
            ps.push((
                format!("series vs walk at t={t}"),
                ks_two_sample(&lc[k], &dk[k]).map_err(es)?.p_value,
            ));
        }
        let worst = ps.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min);
        let failing: Vec<String> = ps
            .iter()
            .filter(|(_, p)| *p <= ALPHA)
            .map(|(l, p)| format!("{l}: p={p:.4}"))
            .collect();
        let ok = failing.is_empty();
        let detail = if ok {
            format!(
                "{marginal_paths} depth-6 paths for the Gaussian marginals \
                 ({cross_paths} shared with the quarter-point cross checks): \
                 all {} subtests above p={ALPHA}",
                ps.len()
            )
        } else {
            format!("failing subtests: {}", failing.join("; "))
        };
        Ok((ok, Some(worst), detail))
    })
}

/// Parameter recovery never certifiably overshoots the generator: paths
/// sampled at a fixed parameter C=2 always admit a recovered parameter
/// whose certified bracket stays at or below 2. The grid only
/// under-approximates the true supremum of increments, so recovered
/// parameters are biased downward, never upward.
pub fn check_parameter_roundtrip(seed: u64, n_paths: usize) -> CheckResult {
    timed("parameter-roundtrip", || {
        let fam = LevyModulus;
        let two = Dyadic::from_int(2);
        let c = DyadicInterval::point(two.clone());
        let root = BitStream::from_seed(seed);
        let mut overshoots = 0usize;
        let mut floor_hits = 0usize;
        for i in 0..n_paths {
            let mut s = root.substream(i as u64);
            let path = sample_path(&fam, &c, &mut s, 4, 12).map_err(es)?;
            let rec = compute_c(&path.values, &fam, 8).map_err(es)?;
            if rec.below_floor {
                floor_hits += 1;
            }
            if rec.c.lo() > &two {
                overshoots += 1;
            }
        }
        Ok((
            overshoots == 0,
            None,
            format!(
                "{n_paths} depth-4 paths at fixed C=2: {overshoots} recovered parameters \
                 certifiably above 2 ({floor_hits} at the floor); grid increments only \
                 under-approximate the modulus, so recovery is downward-biased by design"
            ),
        ))
    })
}

/// Sanity of the reference constructions themselves: random-walk and
/// series marginals at t=1 against N(0,1), and bit-exact agreement of
/// truncated series on coarse dyadic grids.
pub fn check_oracle_sanity(seed: u64, runs: usize) -> CheckResult {
    timed("oracle-sanity", || {
        let gaussian: Arc<dyn SemiInverseCdf> =
            DistributionRegistry::with_defaults().build("gaussian").map_err(es)?;
        let ggrid = ReferenceGrid::new(&gaussian).map_err(es)?;
        let one = [Dyadic::one()];
        let root = BitStream::from_seed(seed);

        let walk = root.substream(1);
        let mut dvals = Vec::with_capacity(runs);
        for i in 0..runs {
            let mut s = walk.substream(i as u64);
            dvals.push(donsker(10_000, &mut s, &one).map_err(es)?.remove(0));
        }
        let r_walk = ks_test_with_grid(&dvals, &ggrid).map_err(es)?;

        let series = root.substream(2);
        let mut lvals = Vec::with_capacity(runs);
        for i in 0..runs {
            let mut s = series.substream(i as u64);
            lvals.push(levy_ciesielski(10, &mut s, &one, 14).map_err(es)?.remove(0).midpoint());
        }
        let r_series = ks_test_with_grid(&lvals, &ggrid).map_err(es)?;

        let stability = root.substream(3);
        let mut exact = true;
        for rep in 0..10u64 {
            for (grid_depth, n_small, n_big) in [(3usize, 3u32, 9u32), (5, 5, 8)] {
                let ts: Vec<Dyadic> = (0..=(1i64 << grid_depth))
                    .map(|k| Dyadic::from_pow2_ratio(k, grid_depth as u32))
                    .collect();
                let mut sa = stability.substream(rep);
                let mut sb = stability.substream(rep);
                let a = levy_ciesielski(n_small, &mut sa, &ts, 16).map_err(es)?;
                let b = levy_ciesielski(n_big, &mut sb, &ts, 16).map_err(es)?;
                if a.len() != b.len()
                    || a.iter().zip(&b).any(|(x, y)| x.lo() != y.lo() || x.hi() != y.hi())
                {
                    exact = false;
                }
            }
        }
        let worst = r_walk.p_value.min(r_series.p_value);
        let ok = r_walk.p_value > ALPHA && r_series.p_value > ALPHA && exact;
        Ok((
            ok,
            Some(worst),
            format!(
                "{runs} runs at t=1: random walk (10^4 steps) p={:.4}, series (10 levels) \
                 p={:.4}; truncated series bit-exact on coarse grids: {exact}",
                r_walk.p_value, r_series.p_value
            ),
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_loads_and_is_supported_above_one() {
        let t = shipped_c_table();
        let n = t.breakpoints().count();
        assert!(n > 100, "table has only {n} rows");
        let one = BigRational::new(BigInt::from(1), BigInt::from(1));
        assert!(t.breakpoints().all(|(x, _)| *x >= one));
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("everything", 1).is_none());
        for name in SUITE_NAMES {
            // the names are at least dispatchable; running them here would
            // repeat the acceptance workload
            assert!(SUITE_NAMES.contains(&name));
        }
    }

    #[test]
    fn reports_serialize_with_stable_fields() {
        let report = SuiteReport {
            suite: "demo".into(),
            seed: 7,
            passed: true,
            checks: vec![CheckResult {
                name: "x".into(),
                passed: true,
                p_value: None,
                detail: "d".into(),
                seconds: 0.5,
            }],
        };
        let s = report.to_json_string();
        assert!(s.contains("\"suite\": \"demo\""));
        assert!(s.contains("\"seed\": 7"));
        assert!(!s.contains("p_value"));
    }

    #[test]
    fn endpoint_partiality_holds_at_small_scale() {
        let r = check_endpoint_partiality(5, 50);
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn pushforward_frequencies_hold_at_small_scale() {
        let r = check_pushforward_frequencies(5, 2, 4000);
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn structure_and_modulus_points_hold() {
        let r = check_semi_inverse_structure();
        assert!(r.passed, "{}", r.detail);
        let m = check_modulus_points();
        assert!(m.passed, "{}", m.detail);
    }
}
