//! Run one validation check at full scale from the command line.
//!
//! Usage: run_check <name> [seed]
//! Names: pushforward, endpoint, inverse, structure, modulus, soundness,
//!        marginal, roundtrip, sanity

use randreal::suites;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| {
        eprintln!("usage: run_check <name> [seed]");
        std::process::exit(1);
    });
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(7);
    let r = match name.as_str() {
        "pushforward" => suites::check_pushforward_frequencies(seed, 5, 100_000),
        "endpoint" => suites::check_endpoint_partiality(seed, 1000),
        "inverse" => suites::check_inverse_transform(seed, 20, 10_000),
        "structure" => suites::check_semi_inverse_structure(),
        "modulus" => suites::check_modulus_points(),
        "soundness" => suites::check_certificate_soundness(seed, 1000),
        "marginal" => suites::check_marginal_fidelity(seed, 5000, 2000),
        "roundtrip" => suites::check_parameter_roundtrip(seed, 1000),
        "sanity" => suites::check_oracle_sanity(seed, 5000),
        other => {
            eprintln!("unknown check {other}");
            std::process::exit(1);
        }
    };
    println!(
        "{}: {} ({:.1} s)\n  {}",
        r.name,
        if r.passed { "PASS" } else { "FAIL" },
        r.seconds,
        r.detail
    );
    if let Some(p) = r.p_value {
        println!("  worst p = {p:.5}");
    }
    std::process::exit(if r.passed { 0 } else { 1 });
}
