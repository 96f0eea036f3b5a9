//! Loads a circuit from JSON and runs it through every theory.
//!
//! `cargo run --example circuit_file -- examples/data/hadamard_matrix.json`

use ctc_sim::circuit::parse_circuit;
use ctc_sim::dctc::{dctc_evolve, DctcRule};
use ctc_sim::pctc::pctc_evolve;
use ctc_sim::qstate::PureState;
use ctc_sim::tctc::tctc_evolve;

fn main() -> ctc_sim::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/unproven_theorem.json").into());
    let c = parse_circuit(&std::fs::read_to_string(&path)?)?;
    println!("{path}: n = {}, m = {}, {} gates", c.n(), c.m(), c.gates().len());
    let psi = PureState::basis(c.cr_dim(), 0);
    let rho = psi.projector();
    println!("D-CTC: {:?}", dctc_evolve(&c, &rho, DctcRule::MaxEntropy)?.rho_f.eigenvalues());
    match pctc_evolve(&c, &rho) {
        Ok(out) => println!("P-CTC: {:?}", out.rho_f.eigenvalues()),
        Err(e) => println!("P-CTC: {e}"),
    }
    println!("T-CTC: {:?}", tctc_evolve(&c, &psi)?.rho_f.eigenvalues());
    Ok(())
}
