//! Acceptance battery: one line per criterion, non-zero exit on failure.
//! `SLICEREG_SEED` overrides the default seed; `SLICEREG_ONLY=3,5` runs a subset.

use slicereg::acceptance::{format_line, run};

fn main() {
    let seed = std::env::var("SLICEREG_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_240_601);
    let ids: Vec<u8> = match std::env::var("SLICEREG_ONLY") {
        Ok(s) => s.split(',').filter_map(|t| t.trim().parse().ok()).collect(),
        Err(_) => (1..=12).collect(),
    };
    let mut failed = 0;
    for id in ids {
        let r = run(id, seed);
        println!("{}", format_line(&r));
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
