//! Cross-theory experiments: distinguishing non-orthogonal states, auditing the T-CTC
//! distinguishability bounds, and probing for cloning.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{catalog, compile_unitary, haar_circuit, product_circuit, StandardFormCircuit};
use crate::dctc::{dctc_evolve, DctcRule};
use crate::encoding::complex_matrix;
use crate::error::{Error, Result};
use crate::haar::{haar_state, haar_unitary, substream};
use crate::pctc::{pctc_evolve, pctc_operator};
use crate::qstate::{
    fidelity, partial_trace, tensor_product, trace_distance, CMatrix, DensityOperator, Keep,
    PureState,
};
use crate::tctc::tctc_evolve;

/// Theory used by [`distinguish`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theory {
    Dctc(DctcRule),
    Pctc,
    Tctc,
}

impl Theory {
    pub fn name(&self) -> &'static str {
        match self {
            Theory::Dctc(_) => "dctc",
            Theory::Pctc => "pctc",
            Theory::Tctc => "tctc",
        }
    }

    pub fn evolve(&self, c: &StandardFormCircuit, psi: &PureState) -> Result<DensityOperator> {
        let out = match self {
            Theory::Dctc(rule) => dctc_evolve(c, &psi.projector(), *rule)?,
            Theory::Pctc => pctc_evolve(c, &psi.projector())?,
            Theory::Tctc => tctc_evolve(c, psi)?,
        };
        Ok(out.rho_f)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistinguishabilityReport {
    pub theory: String,
    /// `|⟨a|b⟩|`.
    pub input_overlap: f64,
    #[serde(with = "complex_matrix")]
    pub rho_a: CMatrix,
    #[serde(with = "complex_matrix")]
    pub rho_b: CMatrix,
    pub trace_distance: f64,
    pub fidelity: f64,
    /// `√(1 − |⟨a|b⟩|²/(d+1)²)`, the T-CTC ceiling on the trace distance.
    pub tctc_bound: f64,
    /// `λ^a`, `λ^b`; only defined for T-CTCs.
    pub lambda_a: Option<f64>,
    pub lambda_b: Option<f64>,
    /// Success probability `(1 + D)/2` of the optimal single measurement.
    pub success_probability: f64,
}

fn lambda(c: &StandardFormCircuit, psi: &PureState) -> f64 {
    let d = c.cv_dim() as f64;
    d / (d + pctc_operator(c).apply(psi.amplitudes()).norm_squared())
}

pub fn distinguish(
    c: &StandardFormCircuit,
    a: &PureState,
    b: &PureState,
    theory: Theory,
) -> Result<DistinguishabilityReport> {
    if a.dim() != c.cr_dim() || b.dim() != c.cr_dim() {
        return Err(Error::dim("inputs must live on the CR register"));
    }
    let rho_a = theory.evolve(c, a)?;
    let rho_b = theory.evolve(c, b)?;
    let overlap = a.inner(b).norm().min(1.0);
    let d = c.cv_dim() as f64;
    let dist = trace_distance(&rho_a, &rho_b);
    let (lambda_a, lambda_b) = match theory {
        Theory::Tctc => (Some(lambda(c, a)), Some(lambda(c, b))),
        _ => (None, None),
    };
    Ok(DistinguishabilityReport {
        theory: theory.name().to_string(),
        input_overlap: overlap,
        fidelity: fidelity(&rho_a, &rho_b),
        rho_a: rho_a.into_matrix(),
        rho_b: rho_b.into_matrix(),
        trace_distance: dist,
        tctc_bound: (1.0 - overlap * overlap / ((d + 1.0) * (d + 1.0))).max(0.0).sqrt(),
        lambda_a,
        lambda_b,
        success_probability: (1.0 + dist) / 2.0,
    })
}

/// Smallest slack seen for one inequality, and how often it was violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub violations: usize,
    pub min_margin: f64,
}

impl BoundCheck {
    fn new() -> Self {
        Self {
            violations: 0,
            min_margin: f64::INFINITY,
        }
    }

    /// Records `bound − value`, tolerating `tol` of rounding.
    fn record(&mut self, margin: f64, tol: f64) {
        if margin < -tol {
            self.violations += 1;
        }
        self.min_margin = self.min_margin.min(margin);
    }

    fn merge(mut self, other: &BoundCheck) -> Self {
        self.violations += other.violations;
        self.min_margin = self.min_margin.min(other.min_margin);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub trials: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// `‖P|ψ⟩‖ ≤ d`.
    pub norm_bound: BoundCheck,
    /// `λ^ψ ≥ 1/(d+1)`.
    pub lambda_bound: BoundCheck,
    /// `F(ρ_f^a, ρ_f^b) ≥ √(λ^a λ^b) |⟨a|b⟩|`.
    pub fidelity_chain: BoundCheck,
    /// `F(ρ_f^a, ρ_f^b) ≥ |⟨a|b⟩|/(d+1)`.
    pub fidelity_bound: BoundCheck,
    /// `D ≤ √(1 − F²)`.
    pub fuchs_van_de_graaf: BoundCheck,
    /// `D ≤ √(1 − |⟨a|b⟩|²/(d+1)²)`.
    pub distance_bound: BoundCheck,
    /// Trials with `D = 1` (within 1e-10) although `|⟨a|b⟩| ≥ 1e-10`.
    pub perfect_nonorthogonal: usize,
}

impl BoundAudit {
    pub fn violations(&self) -> usize {
        [
            self.norm_bound,
            self.lambda_bound,
            self.fidelity_chain,
            self.fidelity_bound,
            self.fuchs_van_de_graaf,
            self.distance_bound,
        ]
        .iter()
        .map(|c| c.violations)
        .sum::<usize>()
            + self.perfect_nonorthogonal
    }
}

const AUDIT_TOL: f64 = 1e-10;

/// Audits the T-CTC bound chain on Haar-random circuits and Haar-random input pairs.
pub fn bound_audit(trials: usize, n: usize, m: usize, seed: u64) -> Result<BoundAudit> {
    if trials == 0 {
        return Err(Error::InvalidParameter("audit needs at least one trial".into()));
    }
    let results: Vec<Result<([BoundCheck; 6], bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t as u64);
            let c = haar_circuit(n, m, &mut rng);
            let a = haar_state(c.cr_dim(), &mut rng);
            let b = haar_state(c.cr_dim(), &mut rng);
            audit_pair(&c, &a, &b)
        })
        .collect();
    let mut checks = [BoundCheck::new(); 6];
    let mut perfect = 0;
    for r in results {
        let (trial, flagged) = r?;
        for (acc, x) in checks.iter_mut().zip(trial.iter()) {
            *acc = acc.merge(x);
        }
        perfect += flagged as usize;
    }
    let [norm_bound, lambda_bound, fidelity_chain, fidelity_bound, fuchs_van_de_graaf, distance_bound] =
        checks;
    Ok(BoundAudit {
        trials,
        n,
        m,
        seed,
        norm_bound,
        lambda_bound,
        fidelity_chain,
        fidelity_bound,
        fuchs_van_de_graaf,
        distance_bound,
        perfect_nonorthogonal: perfect,
    })
}

/// The six checks for one pair, and whether it was perfectly distinguished despite overlapping.
fn audit_pair(c: &StandardFormCircuit, a: &PureState, b: &PureState) -> Result<([BoundCheck; 6], bool)> {
    let d = c.cv_dim() as f64;
    let p = pctc_operator(c);
    let report = distinguish(c, a, b, Theory::Tctc)?;
    let (la, lb) = (report.lambda_a.unwrap(), report.lambda_b.unwrap());
    let overlap = report.input_overlap;
    let mut checks = [BoundCheck::new(); 6];
    for psi in [a, b] {
        checks[0].record(d - p.apply(psi.amplitudes()).norm(), AUDIT_TOL);
    }
    for l in [la, lb] {
        checks[1].record(l - 1.0 / (d + 1.0), AUDIT_TOL);
    }
    checks[2].record(report.fidelity - (la * lb).sqrt() * overlap, AUDIT_TOL);
    checks[3].record(report.fidelity - overlap / (d + 1.0), AUDIT_TOL);
    checks[4].record((1.0 - report.fidelity.powi(2)).max(0.0).sqrt() - report.trace_distance, AUDIT_TOL);
    checks[5].record(report.tctc_bound - report.trace_distance, AUDIT_TOL);
    let perfect = report.trace_distance > 1.0 - 1e-10 && overlap >= 1e-10;
    Ok((checks, perfect))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloningReport {
    pub trials: usize,
    pub seed: u64,
    /// Probe inputs per circuit.
    pub probes: usize,
    /// Best average of `⟨ψψ|ρ_f|ψψ⟩` over probes for any circuit.
    pub best_clone_fidelity: f64,
    /// Outputs with purity above `1 − 1e-9`.
    pub pure_outputs: usize,
    /// Pure outputs that the renormalized channel term failed to reproduce within 1e-8.
    pub simulation_failures: usize,
    /// Circuits whose outputs were pure with clone fidelity 1 on two non-proportional inputs.
    pub perfect_clones: usize,
}

const PROBES: usize = 4;

/// Searches random circuits `|ψ⟩|0⟩ → ρ_f` on two CR qubits and one CV qubit for cloning.
///
/// Every third trial uses a product unitary, which always yields pure outputs; the rest
/// are Haar-random.
pub fn cloning_probe(trials: usize, seed: u64) -> Result<CloningReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("probe needs at least one trial".into()));
    }
    let results: Vec<Result<(f64, usize, usize, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, t as u64);
            let c = if t % 3 == 0 {
                let v = haar_unitary(4, &mut rng);
                product_circuit(&v, &haar_unitary(2, &mut rng))?
            } else {
                haar_circuit(2, 1, &mut rng)
            };
            let blank = PureState::basis(2, 0);
            let mut total = 0.0;
            let (mut pure, mut failures, mut perfect) = (0, 0, 0);
            for _ in 0..PROBES {
                let psi = haar_state(2, &mut rng);
                let input = psi.tensor(&blank);
                let out = tctc_evolve(&c, &input)?.rho_f;
                let target = psi.tensor(&psi);
                let f = (target.amplitudes().adjoint() * out.matrix() * target.amplitudes())[(0, 0)].re;
                total += f;
                if out.purity() > 1.0 - 1e-9 {
                    pure += 1;
                    let channel = channel_term(&c, &input)?;
                    if trace_distance(&channel, &out) > 1e-8 {
                        failures += 1;
                    }
                    if f > 1.0 - 1e-9 {
                        perfect += 1;
                    }
                }
            }
            Ok((total / PROBES as f64, pure, failures, perfect >= 2))
        })
        .collect();
    let mut report = CloningReport {
        trials,
        seed,
        probes: PROBES,
        best_clone_fidelity: 0.0,
        pure_outputs: 0,
        simulation_failures: 0,
        perfect_clones: 0,
    };
    for r in results {
        let (f, pure, failures, perfect) = r?;
        report.best_clone_fidelity = report.best_clone_fidelity.max(f);
        report.pure_outputs += pure;
        report.simulation_failures += failures;
        report.perfect_clones += perfect as usize;
    }
    Ok(report)
}

/// `Tr_CV[U(|ψ⟩⟨ψ| ⊗ 1/d)U†]`, the ordinary-quantum part of the T-CTC output.
pub fn channel_term(c: &StandardFormCircuit, psi: &PureState) -> Result<DensityOperator> {
    let d = c.cv_dim();
    let u = compile_unitary(c);
    let full = u.matrix()
        * tensor_product(psi.projector().matrix(), &CMatrix::identity(d, d).unscale(d as f64))
        * u.matrix().adjoint();
    DensityOperator::from_unnormalized(partial_trace(&full, (c.cr_dim(), d), Keep::First)?)
}

/// The distinguishing circuit's three-theory comparison on its two textbook input pairs.
pub fn distinguishing_summary() -> Result<Vec<DistinguishabilityReport>> {
    let c = catalog("distinguishing")?;
    let ket = |s: &str| PureState::from_ket(s);
    Ok(vec![
        distinguish(&c, &ket("|0⟩")?, &ket("|-⟩")?, Theory::Dctc(DctcRule::MaxEntropy))?,
        distinguish(&c, &ket("|+⟩")?, &ket("|1⟩")?, Theory::Pctc)?,
        distinguish(&c, &ket("|+⟩")?, &ket("|1⟩")?, Theory::Tctc)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(s: &str) -> PureState {
        PureState::from_ket(s).unwrap()
    }

    #[test]
    fn distinguishing_circuit_reports() {
        let c = catalog("distinguishing").unwrap();
        let r = distinguish(&c, &ket("|0⟩"), &ket("|-⟩"), Theory::Dctc(DctcRule::MaxEntropy)).unwrap();
        assert!((r.trace_distance - 1.0).abs() < 1e-10);
        assert!((r.success_probability - 1.0).abs() < 1e-10);
        assert!((r.input_overlap - 0.5f64.sqrt()).abs() < 1e-12);

        let r = distinguish(&c, &ket("|+⟩"), &ket("|1⟩"), Theory::Pctc).unwrap();
        assert!((r.trace_distance - 1.0).abs() < 1e-10);
        assert!((r.success_probability - 1.0).abs() < 1e-10);
        assert!(r.lambda_a.is_none());

        let r = distinguish(&c, &ket("|+⟩"), &ket("|1⟩"), Theory::Tctc).unwrap();
        let bound = (1.0 - 0.5 / 9.0f64).sqrt();
        assert!((r.tctc_bound - bound).abs() < 1e-12);
        assert!(r.trace_distance <= bound && r.trace_distance < 1.0);
        assert!(r.lambda_a.unwrap() >= 1.0 / 3.0);
    }

    #[test]
    fn trivial_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = haar_circuit(1, 1, &mut rng);
        let a = haar_state(2, &mut rng);
        let r = distinguish(&c, &a, &a, Theory::Tctc).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-7);
        assert!(r.trace_distance < 1e-12);

        let r = distinguish(&c, &ket("|0⟩"), &ket("|1⟩"), Theory::Tctc).unwrap();
        assert!(r.input_overlap < 1e-15);
        assert_eq!(r.tctc_bound, 1.0);
        assert!(r.trace_distance <= 1.0);
    }

    #[test]
    fn paradox_propagates() {
        let c = catalog("traceless_paradox").unwrap();
        assert!(matches!(
            distinguish(&c, &ket("|0⟩"), &ket("|+⟩"), Theory::Pctc),
            Err(Error::Paradox { .. })
        ));
        assert!(distinguish(&c, &ket("|0⟩"), &ket("|00⟩"), Theory::Tctc).is_err());
    }

    #[test]
    fn audit_finds_no_violations() {
        let audit = bound_audit(200, 1, 1, 5).unwrap();
        assert_eq!(audit.violations(), 0, "{audit:?}");
        assert!(audit.lambda_bound.min_margin >= 0.0);
        let audit = bound_audit(50, 2, 2, 6).unwrap();
        assert_eq!(audit.violations(), 0, "{audit:?}");
        assert_eq!(bound_audit(20, 1, 1, 5).unwrap(), bound_audit(20, 1, 1, 5).unwrap());
    }

    #[test]
    fn cloning_probe_finds_no_clone() {
        let report = cloning_probe(60, 9).unwrap();
        assert_eq!(report.simulation_failures, 0);
        assert_eq!(report.perfect_clones, 0);
        // Product trials contribute PROBES pure outputs each.
        assert!(report.pure_outputs >= 20 * PROBES);
        assert!(report.best_clone_fidelity < 1.0);
    }

    #[test]
    fn pure_outputs_of_the_paradox_circuit_match_the_channel_term() {
        let c = catalog("traceless_paradox").unwrap();
        let psi = ket("|+⟩");
        let out = tctc_evolve(&c, &psi).unwrap().rho_f;
        assert!(out.purity() > 1.0 - 1e-12);
        assert!(trace_distance(&channel_term(&c, &psi).unwrap(), &out) < 1e-12);
    }

    #[test]
    fn summary_covers_three_theories() {
        let s = distinguishing_summary().unwrap();
        let names: Vec<_> = s.iter().map(|r| r.theory.as_str()).collect();
        assert_eq!(names, ["dctc", "pctc", "tctc"]);
    }
}
