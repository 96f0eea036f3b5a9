//! Iterating the consistency channel need not converge; the Cesàro mean does.

use ctc_sim::circuit::catalog;
use ctc_sim::dctc::{cesaro_mean, consistency_channel, iterate_channel, fixed_point_set};
use ctc_sim::qstate::PureState;

fn main() -> ctc_sim::Result<()> {
    let c = catalog("ecm_counterexample")?;
    let s = consistency_channel(&c, &PureState::from_ket("|0⟩")?.projector())?;
    let start = PureState::from_ket("|0⟩")?.projector();
    let traj = iterate_channel(&s, &start, 20, 1e-10)?;
    println!("iteration verdict: {:?}", traj.verdict);
    let mean = cesaro_mean(&s, &start, 1e-12, 1 << 12)?;
    println!("Cesaro mean after {} terms: {:?}", mean.terms, mean.mean.eigenvalues());
    println!("unique fixed point: {:?}", fixed_point_set(&s)?.representative().eigenvalues());
    Ok(())
}
