//! Monte-Carlo estimates of fourth-order Haar moments and their ratio.

use ctc_sim::tctc::{moment_integrals, sampler_moments, Sampler};

fn main() -> ctc_sim::Result<()> {
    for d in [2, 3, 4] {
        let m = moment_integrals(d, 100_000, 0)?;
        let exact = 1.0 / (d * (d + 1)) as f64;
        println!(
            "d = {d}: I_ab,ab = {:.5} ± {:.5} (exact {exact:.5}), ratio = {:.4} ± {:.4}",
            m.i_ab_ab.mean, m.i_ab_ab.std_error, m.ratio.mean, m.ratio.std_error
        );
        let (g2, g4) = sampler_moments(d, 100_000, 1, Sampler::Gaussian)?;
        let (h2, h4) = sampler_moments(d, 100_000, 2, Sampler::Hurwitz)?;
        println!(
            "        Gaussian {:.5}/{:.5}  Hurwitz {:.5}/{:.5}",
            g2.mean, g4.mean, h2.mean, h4.mean
        );
    }
    Ok(())
}
