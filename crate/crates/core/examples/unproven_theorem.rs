//! The unproven-theorem circuit under all three theories.

use ctc_sim::circuit::catalog;
use ctc_sim::dctc::{consistency_channel, dctc_evolve, fixed_point_set, DctcRule};
use ctc_sim::pctc::pctc_evolve;
use ctc_sim::qstate::{CMatrix, PureState};
use ctc_sim::tctc::{tctc_evolve, tctc_evolve_mc};

fn show(label: &str, m: &CMatrix) {
    println!("{label}:");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:+.4}", m[(i, j)].re)).collect();
        println!("  [{}]", row.join(" "));
    }
}

fn main() -> ctc_sim::Result<()> {
    let c = catalog("unproven_theorem")?;
    let psi = PureState::from_ket("|00⟩")?;
    let rho = psi.projector();

    let fps = fixed_point_set(&consistency_channel(&c, &rho)?)?;
    println!("D-CTC fixed-point family has dimension {}", fps.subspace_dim());
    show("D-CTC (max entropy)", dctc_evolve(&c, &rho, DctcRule::MaxEntropy)?.rho_f.matrix());
    show("P-CTC", pctc_evolve(&c, &rho)?.rho_f.matrix());
    let t = tctc_evolve(&c, &psi)?;
    show("T-CTC closed form", t.rho_f.matrix());
    println!("lambda = {}", t.diagnostics["lambda"]);
    let mc = tctc_evolve_mc(&c, &psi, 100_000, 1)?;
    show("T-CTC Monte Carlo (1e5 samples)", &mc.mean);
    Ok(())
}
