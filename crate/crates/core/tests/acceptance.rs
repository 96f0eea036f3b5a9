//! The acceptance suite: one line per criterion, tolerances and runtime budgets pinned.
//!
//! Set `CTC_SIM_ACCEPTANCE=quick` for reduced Monte-Carlo sample counts.

use ctc_sim::acceptance::{run_all, Profile};

fn main() {
    let profile = match std::env::var("CTC_SIM_ACCEPTANCE").as_deref() {
        Ok("quick") => Profile::Quick,
        _ => Profile::Full,
    };
    let results = run_all(profile);
    println!("\nacceptance ({profile:?})");
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed\n", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
