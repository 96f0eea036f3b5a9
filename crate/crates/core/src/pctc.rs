//! Postselected CTCs: `ρ_f = Pρ_iP† / Tr(Pρ_iP†)` with `P = Tr_CV U`,
//! equivalently teleportation into the past with the Bell measurement postselected.

use crate::circuit::{compile_unitary, max_qubits, StandardFormCircuit};
use crate::error::{Error, Result};
use crate::outcome::TheoryOutcome;
use crate::qstate::{
    partial_trace, tensor_product, trace, CMatrix, CVector, DensityOperator, Keep, UnitaryMatrix,
    ONE, ZERO,
};

/// Postselection probabilities below this are treated as exactly zero.
pub const PARADOX_THRESHOLD: f64 = 1e-12;

/// `P = Tr_CV U`, an operator on the CR register.
#[derive(Debug, Clone, PartialEq)]
pub struct CvTraceOperator {
    matrix: CMatrix,
}

impl CvTraceOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        &self.matrix * psi
    }

    /// Unnormalized `PρP†`.
    pub fn sandwich(&self, rho: &CMatrix) -> CMatrix {
        &self.matrix * rho * self.matrix.adjoint()
    }
}

/// `2^{-m/2} Σ_i |i⟩_B |i⟩_A` on `2m` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntangledState {
    m: usize,
    amplitudes: CVector,
}

impl MaxEntangledState {
    pub fn new(m: usize) -> Self {
        let d = 1usize << m;
        let amp = ONE.unscale((d as f64).sqrt());
        let mut amplitudes = CVector::from_element(d * d, ZERO);
        for i in 0..d {
            amplitudes[i * d + i] = amp;
        }
        Self { m, amplitudes }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

pub fn pctc_operator(c: &StandardFormCircuit) -> CvTraceOperator {
    let u = compile_unitary(c);
    let matrix = partial_trace(u.matrix(), (c.cr_dim(), c.cv_dim()), Keep::First)
        .expect("compiled unitary matches the register sizes");
    CvTraceOperator { matrix }
}

/// `Σ_α (1 ⊗ ⟨w_α|) U (1 ⊗ |w_α⟩)` for the orthonormal CV basis given by the columns of `w`.
pub fn pctc_operator_in_basis(c: &StandardFormCircuit, w: &UnitaryMatrix) -> Result<CvTraceOperator> {
    let (dcr, dcv) = (c.cr_dim(), c.cv_dim());
    if w.dim() != dcv {
        return Err(Error::dim("basis change must act on the CV register"));
    }
    let u = compile_unitary(c);
    let mut matrix = CMatrix::zeros(dcr, dcr);
    for alpha in 0..dcv {
        let isometry = tensor_product(&CMatrix::identity(dcr, dcr), &w.matrix().columns(alpha, 1).into_owned());
        matrix += isometry.adjoint() * u.matrix() * &isometry;
    }
    Ok(CvTraceOperator { matrix })
}

fn check_input(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<()> {
    if rho_i.dim() != c.cr_dim() {
        return Err(Error::dim(format!(
            "input state has dim {}, circuit has CR dim {}",
            rho_i.dim(),
            c.cr_dim()
        )));
    }
    Ok(())
}

fn finish(unnormalized: CMatrix, postselection: f64) -> Result<TheoryOutcome> {
    if postselection < PARADOX_THRESHOLD {
        return Err(Error::Paradox { trace: postselection });
    }
    let rho_f = DensityOperator::from_unnormalized(unnormalized)?;
    let mut out = TheoryOutcome::new(rho_f)
        .note("normalizer", postselection)
        .note("paradox", false);
    out.normalizer = Some(postselection);
    Ok(out)
}

pub fn pctc_evolve(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<TheoryOutcome> {
    check_input(c, rho_i)?;
    let p = pctc_operator(c);
    let out = p.sandwich(rho_i.matrix());
    let tr = trace(&out).re;
    finish(out, tr)
}

/// `1_CR ⊗ ⟨Φ|_{BA}` as a `dcr × dcr·d²` matrix.
fn postselection_map(dcr: usize, m: usize) -> CMatrix {
    let phi = MaxEntangledState::new(m);
    let bra = CMatrix::from_row_iterator(1, phi.amplitudes().len(), phi.amplitudes().iter().map(|a| a.conj()));
    tensor_product(&CMatrix::identity(dcr, dcr), &bra)
}

/// The protocol state just before postselection: `(U ⊗ 1_A)(ρ_i ⊗ |Φ⟩⟨Φ|)(U ⊗ 1_A)†`
/// on `CR ⊗ B ⊗ A`.
fn protocol_state(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<CMatrix> {
    check_input(c, rho_i)?;
    let cap = max_qubits();
    if c.n() + 2 * c.m() > cap {
        return Err(Error::dim(format!(
            "protocol needs {} qubits, above the cap of {cap}",
            c.n() + 2 * c.m()
        )));
    }
    let d = c.cv_dim();
    let phi = MaxEntangledState::new(c.m());
    let bell = phi.amplitudes() * phi.amplitudes().adjoint();
    let u = tensor_product(compile_unitary(c).matrix(), &CMatrix::identity(d, d));
    Ok(&u * tensor_product(rho_i.matrix(), &bell) * u.adjoint())
}

/// Simulates the teleportation protocol directly. The postselection probability is
/// `Tr(Pρ_iP†)/d²`; the reported normalizer is rescaled to `Tr(Pρ_iP†)`.
pub fn pctc_protocol_oracle(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<TheoryOutcome> {
    let sigma = protocol_state(c, rho_i)?;
    let proj = postselection_map(c.cr_dim(), c.m());
    let out = &proj * sigma * proj.adjoint();
    let d2 = (c.cv_dim() * c.cv_dim()) as f64;
    let tr = trace(&out).re * d2;
    finish(out, tr)
}

/// Protocol with the noise channel `σ ↦ (σ + εχ)/(1 + ε)` applied just before postselection.
pub fn pctc_evolve_noisy(
    c: &StandardFormCircuit,
    rho_i: &DensityOperator,
    chi: &DensityOperator,
    eps: f64,
) -> Result<TheoryOutcome> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("noise strength must be positive, got {eps}")));
    }
    let d = c.cv_dim();
    if chi.dim() != c.cr_dim() * d * d {
        return Err(Error::dim("noise state must act on CR ⊗ B ⊗ A"));
    }
    let sigma = protocol_state(c, rho_i)?;
    let proj = postselection_map(c.cr_dim(), c.m());
    let noise_part = &proj * chi.matrix() * proj.adjoint();
    let noise_trace = trace(&noise_part).re;
    if noise_trace < PARADOX_THRESHOLD {
        return Err(Error::StillParadoxical { trace: noise_trace });
    }
    let signal = &proj * sigma * proj.adjoint();
    let signal_trace = trace(&signal).re;
    let out = (signal + noise_part.scale(eps)).unscale(1.0 + eps);
    let total = trace(&out).re;
    let rho_f = DensityOperator::from_unnormalized(out)?;
    let mut outcome = TheoryOutcome::new(rho_f)
        .note("normalizer", total)
        .note("signal_trace", signal_trace)
        .note("noise_trace", noise_trace)
        .note("paradox", signal_trace < PARADOX_THRESHOLD)
        .note("eps", eps);
    outcome.normalizer = Some(total);
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{catalog, haar_circuit, product_circuit, CATALOG_NAMES};
    use crate::haar::{haar_state, haar_unitary, random_density};
    use crate::qstate::{c, fidelity, frobenius_distance, trace_distance, PureState};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ket(s: &str) -> DensityOperator {
        PureState::from_ket(s).unwrap().projector()
    }

    #[test]
    fn max_entangled_state_amplitudes() {
        let phi = MaxEntangledState::new(2);
        assert_eq!(phi.amplitudes().len(), 16);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert_eq!(phi.amplitudes()[i * 4 + j], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn operator_examples() {
        let s = 0.5f64.sqrt();
        let p = pctc_operator(&catalog("distinguishing").unwrap());
        // |0⟩⟨0| + |1⟩⟨−|
        let expect = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, c(s, 0.0), c(-s, 0.0)]);
        assert!(frobenius_distance(p.matrix(), &expect) < 1e-12);

        let p = pctc_operator(&catalog("swap").unwrap());
        assert!(frobenius_distance(p.matrix(), &CMatrix::identity(2, 2)) < 1e-12);

        let p = pctc_operator(&catalog("traceless_paradox").unwrap());
        assert!(p.matrix().norm() < 1e-12);
    }

    #[test]
    fn evolve_examples() {
        let ut = catalog("unproven_theorem").unwrap();
        let out = pctc_evolve(&ut, &ket("|00⟩")).unwrap();
        let s = 0.5f64.sqrt();
        let bell = PureState::new(CVector::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)])).unwrap();
        assert!(fidelity(&out.rho_f, &bell.projector()) > 1.0 - 1e-10);

        let dist = catalog("distinguishing").unwrap();
        let out = pctc_evolve(&dist, &ket("|+⟩")).unwrap();
        assert!(frobenius_distance(out.rho_f.matrix(), ket("|0⟩").matrix()) < 1e-12);
        assert!((out.normalizer.unwrap() - 0.5).abs() < 1e-12);
        let out = pctc_evolve(&dist, &ket("|1⟩")).unwrap();
        assert!(frobenius_distance(out.rho_f.matrix(), ket("|1⟩").matrix()) < 1e-12);

        let tp = catalog("traceless_paradox").unwrap();
        for s in ["|0⟩", "|1⟩", "|+⟩"] {
            assert!(matches!(pctc_evolve(&tp, &ket(s)), Err(Error::Paradox { .. })));
            assert!(matches!(pctc_protocol_oracle(&tp, &ket(s)), Err(Error::Paradox { .. })));
        }
    }

    #[test]
    fn protocol_examples() {
        let dist = catalog("distinguishing").unwrap();
        let out = pctc_protocol_oracle(&dist, &ket("|+⟩")).unwrap();
        assert!(frobenius_distance(out.rho_f.matrix(), ket("|0⟩").matrix()) < 1e-12);
        assert!((out.normalizer.unwrap() - 0.5).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(2, &mut rng);
        let out = pctc_protocol_oracle(&catalog("swap").unwrap(), &rho).unwrap();
        assert!(frobenius_distance(out.rho_f.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn protocol_matches_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut circuits: Vec<_> = CATALOG_NAMES.iter().map(|n| catalog(n).unwrap()).collect();
        for _ in 0..50 {
            let n = rng.random_range(1..=2);
            let m = rng.random_range(1..=2);
            circuits.push(haar_circuit(n, m, &mut rng));
        }
        for circ in circuits {
            let rho = haar_state(circ.cr_dim(), &mut rng).projector();
            match (pctc_evolve(&circ, &rho), pctc_protocol_oracle(&circ, &rho)) {
                (Ok(a), Ok(b)) => {
                    assert!(trace_distance(&a.rho_f, &b.rho_f) < 1e-10);
                    assert!((a.normalizer.unwrap() - b.normalizer.unwrap()).abs() < 1e-10);
                }
                (Err(Error::Paradox { .. }), Err(Error::Paradox { .. })) => {}
                (a, b) => panic!("disagreement: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn operator_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let circ = haar_circuit(rng.random_range(1..=2), rng.random_range(1..=2), &mut rng);
            let w = haar_unitary(circ.cv_dim(), &mut rng);
            let rotated = pctc_operator_in_basis(&circ, &w).unwrap();
            assert!(frobenius_distance(rotated.matrix(), pctc_operator(&circ).matrix()) < 1e-10);
        }
    }

    #[test]
    fn norm_bound_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let circ = haar_circuit(rng.random_range(1..=2), rng.random_range(1..=2), &mut rng);
            let p = pctc_operator(&circ);
            for _ in 0..1000 {
                let psi = haar_state(circ.cr_dim(), &mut rng);
                assert!(p.apply(psi.amplitudes()).norm() <= circ.cv_dim() as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn noise_rescues_the_paradox_independently_of_eps() {
        let tp = catalog("traceless_paradox").unwrap();
        let chi = DensityOperator::maximally_mixed(8);
        let a = pctc_evolve_noisy(&tp, &ket("|0⟩"), &chi, 1e-3).unwrap();
        let b = pctc_evolve_noisy(&tp, &ket("|0⟩"), &chi, 1e-6).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        assert!(trace_distance(&a.rho_f, &mixed) < 1e-12);
        assert!(trace_distance(&a.rho_f, &b.rho_f) < 1e-9);
        assert_eq!(a.diagnostics["paradox"], true);
    }

    #[test]
    fn vanishing_noise_recovers_the_noiseless_map() {
        let dist = catalog("distinguishing").unwrap();
        let chi = DensityOperator::maximally_mixed(8);
        let noisy = pctc_evolve_noisy(&dist, &ket("|+⟩"), &chi, 1e-9).unwrap();
        let clean = pctc_evolve(&dist, &ket("|+⟩")).unwrap();
        assert!(trace_distance(&noisy.rho_f, &clean.rho_f) < 1e-6);
    }

    #[test]
    fn noise_orthogonal_to_the_bell_state_fails() {
        let tp = catalog("traceless_paradox").unwrap();
        // |0⟩ ⊗ |01⟩ has no overlap with |Φ⟩ on B ⊗ A.
        let chi = ket("|001⟩");
        assert!(matches!(
            pctc_evolve_noisy(&tp, &ket("|0⟩"), &chi, 1e-3),
            Err(Error::StillParadoxical { .. })
        ));
        assert!(matches!(
            pctc_evolve_noisy(&tp, &ket("|0⟩"), &DensityOperator::maximally_mixed(8), 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn product_unitaries_reduce_or_flag() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let v = haar_unitary(2, &mut rng);
            let w = haar_unitary(2, &mut rng);
            let circ = product_circuit(&v, &w).unwrap();
            let rho = random_density(2, &mut rng);
            let out = pctc_evolve(&circ, &rho).unwrap();
            assert!(frobenius_distance(out.rho_f.matrix(), rho.conjugate(v.matrix()).matrix()) < 1e-10);
        }
        let x = UnitaryMatrix::new(crate::circuit::GateName::X.matrix().unwrap()).unwrap();
        let circ = product_circuit(&UnitaryMatrix::identity(2), &x).unwrap();
        assert!(matches!(pctc_evolve(&circ, &ket("|+⟩")), Err(Error::Paradox { .. })));
    }

    #[test]
    fn continuity_under_input_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let circ = haar_circuit(1, 1, &mut rng);
            let rho = random_density(2, &mut rng);
            let sigma = random_density(2, &mut rng);
            let base = pctc_evolve(&circ, &rho).unwrap().rho_f;
            let mut last = f64::INFINITY;
            for eps in [1e-3, 1e-5, 1e-7] {
                let mixed = DensityOperator::new(rho.matrix().scale(1.0 - eps) + sigma.matrix().scale(eps)).unwrap();
                let dist = trace_distance(&pctc_evolve(&circ, &mixed).unwrap().rho_f, &base);
                assert!(dist < last);
                last = dist;
            }
            assert!(last < 1e-5);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norm_bound_holds(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let circ = haar_circuit(n, m, &mut rng);
            let psi = haar_state(circ.cr_dim(), &mut rng);
            let norm = pctc_operator(&circ).apply(psi.amplitudes()).norm();
            prop_assert!(norm <= (1usize << m) as f64 + 1e-12);
        }
    }
}
