//! Non-orthogonal inputs through the distinguishing circuit.

use ctc_sim::analysis::distinguishing_summary;

fn main() -> ctc_sim::Result<()> {
    for r in distinguishing_summary()? {
        println!(
            "{:<24} overlap {:.4}  trace distance {:.4}  fidelity {:.4}  success {:.4}",
            r.theory, r.input_overlap, r.trace_distance, r.fidelity, r.success_probability
        );
    }
    Ok(())
}
