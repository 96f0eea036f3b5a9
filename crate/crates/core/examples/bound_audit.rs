//! Random audit of the T-CTC norm, lambda, fidelity and trace-distance bounds.

use ctc_sim::analysis::bound_audit;

fn main() -> ctc_sim::Result<()> {
    for (n, m) in [(1, 1), (1, 2), (2, 1)] {
        let r = bound_audit(500, n, m, 3)?;
        println!(
            "(n, m) = ({n}, {m}): {} violations, margins norm {:.3} lambda {:.3} F {:.3} D {:.3}",
            r.violations(),
            r.norm_bound.min_margin,
            r.lambda_bound.min_margin,
            r.fidelity_bound.min_margin,
            r.distance_bound.min_margin
        );
    }
    Ok(())
}
