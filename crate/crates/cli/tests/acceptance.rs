//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`; the harness result line
//! mirrors it). Scales and tolerances are pinned here.
//!
//! Statistical criteria run at a fixed seed; the underlying checks target
//! designs whose false-failure rate at significance 0.01 is small but not
//! zero, so the pinned seed is part of the pinned tolerance.

use std::process::Command;

use randreal::suites::{
    check_certificate_soundness, check_endpoint_partiality, check_inverse_transform,
    check_marginal_fidelity, check_modulus_points, check_oracle_sanity,
    check_parameter_roundtrip, check_pushforward_frequencies, check_semi_inverse_structure,
    CheckResult,
};

const SEED: u64 = 7;

fn report(criterion: &str, r: &CheckResult) {
    println!(
        "{criterion}: {} — {} ({:.1} s)",
        if r.passed { "PASS" } else { "FAIL" },
        r.detail,
        r.seconds
    );
    assert!(r.passed, "{criterion} failed: {}", r.detail);
}

#[test]
fn criterion_01_pushforward_frequencies() {
    // 5 random depth-3 weight tables, 1e5 realizer runs each; every cylinder
    // within 4 binomial sigma; under 30 s.
    report(
        "criterion 1 (pushforward frequencies)",
        &check_pushforward_frequencies(SEED, 5, 100_000),
    );
}

#[test]
fn criterion_02_endpoint_partiality() {
    // Weights {1/3, 2/3}: the alternating input stalls at every tested cap;
    // 1e3 random inputs all terminate.
    report(
        "criterion 2 (endpoint partiality)",
        &check_endpoint_partiality(SEED, 1_000),
    );
}

#[test]
fn criterion_03_inverse_transform() {
    // KS at 0.01 on 1e4 samples for uniform/gaussian/cantor, >= 19 of 20
    // seeds per distribution; every point-mass enclosure contains its atom.
    report(
        "criterion 3 (inverse transform)",
        &check_inverse_transform(SEED, 20, 10_000),
    );
}

#[test]
fn criterion_04_semi_inverse_structure() {
    // Lower CDF <= upper CDF and both monotone on a 2^8 grid at width 2^-16
    // for every built-in distribution.
    report(
        "criterion 4 (semi-inverse structure)",
        &check_semi_inverse_structure(),
    );
}

#[test]
fn criterion_05_modulus_points() {
    // omega(0,c) = 0 exactly; omega(1/4,1) within 2^-16 of the reference;
    // the binary modulus at target 0 is 2.
    report("criterion 5 (modulus point values)", &check_modulus_points());
}

#[test]
fn criterion_06_certificate_soundness() {
    // 1e3 accepted depth-6 paths; zero certified pair violations over the
    // full grid; under 60 s.
    report(
        "criterion 6 (certificate soundness)",
        &check_certificate_soundness(SEED, 1_000),
    );
}

#[test]
fn criterion_07_marginal_fidelity() {
    // With the bundled parameter table: W(1) and W(1/2) pass KS against
    // their Gaussian laws at 0.01 on 5e3 paths; quarter-point marginals
    // agree with the series and walk references by two-sample KS at 0.01.
    report(
        "criterion 7 (marginal fidelity)",
        &check_marginal_fidelity(SEED, 5_000, 2_000),
    );
}

#[test]
fn criterion_08_parameter_roundtrip() {
    // Parameters recovered from paths generated at the point parameter 2
    // never certifiably exceed 2, over 1e3 paths (grid recovery reads the
    // supremum on a finite grid, so it is biased low, never high).
    report(
        "criterion 8 (parameter round trip)",
        &check_parameter_roundtrip(SEED, 1_000),
    );
}

#[test]
fn criterion_09_oracle_sanity() {
    // Walk (1e4 steps) and triangular-series (10 levels) endpoint marginals
    // pass KS against N(0,1) at 0.01; the series is bit-exact on dyadic
    // grids once the truncation level covers them.
    report("criterion 9 (oracle sanity)", &check_oracle_sanity(SEED, 5_000));
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-reproducibility of the binary under a fixed seed.

fn run_cli(args: &[&str]) -> (Vec<u8>, Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_randreal"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.stderr, out.status.code().unwrap_or(-1))
}

fn assert_reproducible(args: &[&str]) {
    let (o1, e1, c1) = run_cli(args);
    let (o2, e2, c2) = run_cli(args);
    assert_eq!(c1, c2, "exit codes differ for {args:?}");
    assert_eq!(o1, o2, "stdout differs between runs for {args:?}");
    assert_eq!(e1, e2, "stderr differs between runs for {args:?}");
    assert_eq!(c1, 0, "expected success for {args:?}: {}", String::from_utf8_lossy(&e1));
    assert!(!o1.is_empty(), "no output for {args:?}");
}

#[test]
fn criterion_10_cli_determinism() {
    let dir = std::env::temp_dir().join("randreal-acceptance");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let weights = dir.join("w2.json");
    std::fs::write(&weights, r#"{"00":"1/6","01":"1/6","10":"1/3","11":"1/3"}"#)
        .expect("weights file");
    let weights = weights.to_str().expect("utf8 path");

    assert_reproducible(&[
        "sample-real", "--dist", "gaussian", "--precision", "12", "--count", "5", "--seed", "42",
    ]);
    assert_reproducible(&[
        "sample-real", "--dist", "cantor", "--precision", "16", "--count", "3", "--seed", "8",
        "--format", "csv",
    ]);
    assert_reproducible(&[
        "push", "--weights", weights, "--depth", "2", "--count", "8", "--seed", "9", "--format",
        "csv",
    ]);
    // default parameter distribution: the bundled empirical table
    assert_reproducible(&["sample-path", "--depth", "3", "--precision", "10", "--seed", "4"]);
    assert_reproducible(&[
        "sample-path", "--depth", "2", "--precision", "8", "--c-dist", "dirac:2", "--count", "2",
        "--seed", "5", "--emit", "csv",
    ]);
    assert_reproducible(&[
        "oracle", "donsker", "--n", "4096", "--t", "1/2,1", "--count", "3", "--seed", "1",
        "--format", "csv",
    ]);
    assert_reproducible(&["oracle", "schauder", "--n", "6", "--t", "1/4,3/4", "--seed", "2"]);
    assert_reproducible(&["oracle", "kl", "--n", "48", "--t", "1/2", "--seed", "3"]);
    assert_reproducible(&["validate", "--suite", "realizer", "--seed", "1"]);

    // estimate-cdist also writes a file; both runs must produce identical bytes
    let out_a = dir.join("ct_a.csv");
    let out_b = dir.join("ct_b.csv");
    for (out, _) in [(&out_a, 0), (&out_b, 1)] {
        let (_, e, c) = run_cli(&[
            "estimate-cdist",
            "--paths",
            "100",
            "--depth",
            "2",
            "--out",
            out.to_str().expect("utf8 path"),
            "--seed",
            "3",
        ]);
        assert_eq!(c, 0, "estimate-cdist failed: {}", String::from_utf8_lossy(&e));
    }
    let a = std::fs::read(&out_a).expect("table a");
    let b = std::fs::read(&out_b).expect("table b");
    assert_eq!(a, b, "estimate-cdist output files differ between runs");
    println!("criterion 10 (determinism): PASS — 10 invocations byte-identical across reruns");
}
