//! Depolarizing the CV path selects a unique self-consistent state.

use ctc_sim::circuit::catalog;
use ctc_sim::dctc::{consistency_channel, noisy_fixed_point};
use ctc_sim::qstate::PureState;

fn main() -> ctc_sim::Result<()> {
    for (name, ket) in [("unproven_theorem", "|00⟩"), ("swap", "|0⟩"), ("distinguishing", "|+⟩")] {
        let c = catalog(name)?;
        let s = consistency_channel(&c, &PureState::from_ket(ket)?.projector())?;
        for p in [0.5, 0.1, 1e-3, 1e-6] {
            let tau = noisy_fixed_point(&s, p)?;
            println!("{name:<18} p = {p:<8} spectrum {:?}", tau.eigenvalues());
        }
    }
    Ok(())
}
