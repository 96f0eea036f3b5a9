//! Searches random T-CTC circuits for ones that copy unknown states.

use ctc_sim::analysis::cloning_probe;

fn main() -> ctc_sim::Result<()> {
    let r = cloning_probe(300, 5)?;
    println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
    Ok(())
}
