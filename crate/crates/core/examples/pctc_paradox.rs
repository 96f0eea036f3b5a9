//! Postselection fails on a traceless CV operation; noise restores a well-defined output.

use ctc_sim::circuit::catalog;
use ctc_sim::pctc::{pctc_evolve, pctc_evolve_noisy};
use ctc_sim::qstate::{DensityOperator, PureState};

fn main() -> ctc_sim::Result<()> {
    let c = catalog("traceless_paradox")?;
    let rho = PureState::from_ket("|0⟩")?.projector();
    match pctc_evolve(&c, &rho) {
        Err(e) => println!("noiseless: {e}"),
        Ok(out) => println!("noiseless: unexpected output {:?}", out.rho_f.eigenvalues()),
    }
    let chi = DensityOperator::maximally_mixed(c.cr_dim() * c.cv_dim() * c.cv_dim());
    for eps in [1e-1, 1e-4, 1e-9] {
        let out = pctc_evolve_noisy(&c, &rho, &chi, eps)?;
        println!("eps = {eps:e}: rho_f spectrum {:?}", out.rho_f.eigenvalues());
    }
    Ok(())
}
