//! Acceptance gate: runs every criterion with its pinned tolerance and
//! runtime limit, printing one line each. Exits non-zero if any fails.

use laser_noise::verify::{self, VerifyOptions};

fn main() {
    let outcomes = verify::run_all(&VerifyOptions::default()).expect("acceptance setup");
    println!();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("\nacceptance: {} passed, {} failed\n", outcomes.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
