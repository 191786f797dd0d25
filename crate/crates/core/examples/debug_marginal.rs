//! Temporary debugging aid: scan the cross-phase paths of the marginal
//! check until one fails, and report the drawn parameter.

use randreal::suites::shipped_c_table;
use randreal::{sample_c, sample_path, BitStream, LevyModulus, SemiInverseCdf};
use std::sync::Arc;

fn main() {
    let fam = LevyModulus;
    let cdist: Arc<dyn SemiInverseCdf> = Arc::new(shipped_c_table());
    let root = BitStream::from_seed(7);
    let deep = root.substream(2);
    for i in 805..806u64 {
        let mut s = deep.substream(i);
        let c = match sample_c(&cdist, &mut s, 10) {
            Ok(c) => c,
            Err(e) => {
                println!("path {i}: sample_c failed: {e}");
                break;
            }
        };
        match sample_path(&fam, &c, &mut s, 6, 12) {
            Ok(p) => {
                if i % 200 == 0 {
                    println!(
                        "path {i}: ok (C={}, rej={})",
                        c.to_decimal_string(),
                        p.diagnostics.rejections
                    );
                }
            }
            Err(e) => {
                println!("path {i}: C = {} -> {e}", c.to_decimal_string());
                break;
            }
        }
    }
}
