//! Closed-form T-CTC output against the Monte-Carlo estimator, and the partial-trace variant.

use ctc_sim::circuit::catalog;
use ctc_sim::qstate::{trace_distance, PureState};
use ctc_sim::tctc::{ptrace_variant_evolve, tctc_evolve, tctc_evolve_mc};

fn main() -> ctc_sim::Result<()> {
    let c = catalog("unproven_theorem")?;
    let psi = PureState::from_ket("|0+⟩")?;
    let exact = tctc_evolve(&c, &psi)?.rho_f;
    for samples in [1_000, 10_000, 100_000] {
        let est = tctc_evolve_mc(&c, &psi, samples, 42)?;
        let d = trace_distance(&est.state()?, &exact);
        println!("{samples:>7} samples: trace distance {d:.5}, within 5 se: {}", est.agrees_with(exact.matrix(), 5.0));
    }
    let swap = catalog("swap")?;
    let est = ptrace_variant_evolve(&swap, &PureState::from_ket("|0⟩")?, 100_000, 42)?;
    println!("partial-trace variant on swap, |0⟩: diag = {:.4}, {:.4}", est.mean[(0, 0)].re, est.mean[(1, 1)].re);
    Ok(())
}
