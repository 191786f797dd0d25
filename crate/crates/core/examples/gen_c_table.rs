//! Regenerate the shipped empirical distribution of the modulus parameter.
//!
//! Usage: cargo run --example gen_c_table -- <paths> <depth> <seed> <out.csv>

use randreal::bitsource::BitStream;
use randreal::oracle::estimate_c_distribution;
use randreal::wiener::LevyModulus;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 5 {
        eprintln!("usage: {} <paths> <depth> <seed> <out.csv>", args[0]);
        std::process::exit(1);
    }
    let paths: usize = args[1].parse().expect("paths must be an integer");
    let depth: usize = args[2].parse().expect("depth must be an integer");
    let seed: u64 = args[3].parse().expect("seed must be a 64-bit integer");
    let mut stream = BitStream::from_seed(seed);
    let table = estimate_c_distribution(
        paths,
        depth,
        &LevyModulus,
        &mut stream,
        &seed.to_string(),
    )
    .expect("table generation failed");
    if let Some(w) = &table.warning {
        eprintln!("warning: {w}");
    }
    let median = &table.c_values[table.c_values.len() / 2];
    eprintln!(
        "{} paths at depth {depth}: floor rate {:.3}, median c = {}",
        table.c_values.len(),
        table.floor_rate,
        median.to_decimal_string(6)
    );
    std::fs::write(&args[4], table.csv).expect("could not write the table");
}
