//! Averaging over the whole D-CTC fixed-point family instead of choosing one point.

use ctc_sim::circuit::catalog;
use ctc_sim::dctc::{dctc_evolve, weighted_dctc_evolve, DctcRule, Weighting};
use ctc_sim::qstate::PureState;

fn main() -> ctc_sim::Result<()> {
    let c = catalog("unproven_theorem")?;
    let rho = PureState::from_ket("|00⟩")?.projector();
    let max_ent = dctc_evolve(&c, &rho, DctcRule::MaxEntropy)?;
    println!("max entropy:  {:?}", max_ent.rho_f.eigenvalues());
    for w in [Weighting::Uniform, Weighting::Transition] {
        let out = weighted_dctc_evolve(&c, &rho, w)?;
        println!("{w:?}: {:?}", out.rho_f.eigenvalues());
    }
    Ok(())
}
