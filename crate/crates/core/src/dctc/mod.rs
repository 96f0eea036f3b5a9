//! Deutsch's theory: the time-travelling state `τ` must be a fixed point of
//! `D(τ) = Tr_CR[U(ρ_i ⊗ τ)U†]`, and the output is `ρ_f = Tr_CV[U(ρ_i ⊗ τ)U†]`.

mod fixed;
mod maxent;
mod superop;
mod weighted;

pub use fixed::{
    cesaro_mean, fixed_point_set, iterate_channel, noisy_fixed_point, CesaroMean, FixedPointSet,
    IterationVerdict, Trajectory, EIGENVALUE_ONE_WINDOW, MAX_CYCLE_PERIOD,
};
pub use maxent::{
    max_entropy_fixed_point, maximize_entropy, random_feasible_point, MaxEntropySolution,
    MAX_ENTROPY_RESIDUAL,
};
pub use superop::{Superoperator, SUPEROP_TOL};
pub use weighted::{weighted_fixed_point, Weighting, DEFAULT_GRID};

use crate::circuit::{compile_unitary, StandardFormCircuit};
use crate::error::{Error, Result};
use crate::outcome::TheoryOutcome;
use crate::qstate::{
    hermitian_eigen, partial_trace, tensor_product, von_neumann_entropy, CMatrix, DensityOperator,
    Keep, UnitaryMatrix,
};

/// How a single `τ` is chosen from the fixed-point family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DctcRule {
    MaxEntropy,
    /// Depolarize the CV path with probability `p` and take the unique solution.
    Noise(f64),
    /// The representative `τ₀` of the family.
    Representative,
}

fn check_input(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<()> {
    if rho_i.dim() != c.cr_dim() {
        return Err(Error::dim(format!(
            "input state has dim {}, circuit has {} CR qubits (dim {})",
            rho_i.dim(),
            c.n(),
            c.cr_dim()
        )));
    }
    Ok(())
}

/// Kraus operators of `τ ↦ Tr_CR[U(ρ_i ⊗ τ)U†]` for a unitary on `CR ⊗ CV`.
fn consistency_kraus(u: &CMatrix, rho_i: &DensityOperator, dcv: usize) -> Vec<CMatrix> {
    let dcr = rho_i.dim();
    let (probs, vecs) = hermitian_eigen(rho_i.matrix());
    let mut kraus = Vec::new();
    for (r, &p) in probs.iter().enumerate() {
        if p <= 1e-15 {
            continue;
        }
        let amp = p.sqrt();
        for a in 0..dcr {
            // K = √p (⟨a| ⊗ 1) U (|e_r⟩ ⊗ 1)
            let k = CMatrix::from_fn(dcv, dcv, |x, y| {
                (0..dcr)
                    .map(|s| u[(a * dcv + x, s * dcv + y)] * vecs[(s, r)])
                    .sum::<num_complex::Complex64>()
                    * amp
            });
            kraus.push(k);
        }
    }
    kraus
}

/// The channel whose fixed points are the consistent time-travelling states.
pub fn consistency_channel(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<Superoperator> {
    check_input(c, rho_i)?;
    let u = compile_unitary(c);
    Superoperator::from_kraus(c.cv_dim(), &consistency_kraus(u.matrix(), rho_i, c.cv_dim()))
}

/// `σ ↦ Tr_2[V(ρ_i ⊗ σ)V†]` for an equivalent-circuit unitary `V` whose output order is
/// `CV ⊗ CR` (so `V = SWAP · U`).
pub fn equivalent_circuit_channel(
    v: &UnitaryMatrix,
    rho_i: &DensityOperator,
    cv_dim: usize,
) -> Result<Superoperator> {
    let dcr = rho_i.dim();
    if v.dim() != dcr * cv_dim {
        return Err(Error::dim("V does not act on CR ⊗ CV"));
    }
    let mut m = CMatrix::zeros(cv_dim * cv_dim, cv_dim * cv_dim);
    for j in 0..cv_dim {
        for i in 0..cv_dim {
            let mut e = CMatrix::zeros(cv_dim, cv_dim);
            e[(i, j)] = crate::qstate::ONE;
            let full = v.matrix() * tensor_product(rho_i.matrix(), &e) * v.matrix().adjoint();
            let out = partial_trace(&full, (cv_dim, dcr), Keep::First)?;
            m.set_column(i + j * cv_dim, &crate::qstate::vectorize(&out));
        }
    }
    Superoperator::new(cv_dim, m)
}

/// `Tr_CV[U(ρ_i ⊗ τ)U†]`.
pub fn dctc_output(
    u: &UnitaryMatrix,
    rho_i: &DensityOperator,
    tau: &DensityOperator,
) -> Result<DensityOperator> {
    let joint = rho_i.tensor(tau).conjugate(u.matrix());
    let out = partial_trace(joint.matrix(), (rho_i.dim(), tau.dim()), Keep::First)?;
    DensityOperator::from_unnormalized(out)
}

/// Selects `τ` by `rule` and evaluates the output state.
pub fn dctc_evolve(
    c: &StandardFormCircuit,
    rho_i: &DensityOperator,
    rule: DctcRule,
) -> Result<TheoryOutcome> {
    let s = consistency_channel(c, rho_i)?;
    let fps = fixed_point_set(&s)?;
    let tau = match rule {
        DctcRule::MaxEntropy => max_entropy_fixed_point(&fps)?,
        DctcRule::Noise(p) => noisy_fixed_point(&s, p)?,
        DctcRule::Representative => fps.representative().clone(),
    };
    let rho_f = dctc_output(&compile_unitary(c), rho_i, &tau)?;
    let entropy = von_neumann_entropy(&tau);
    let mut out = TheoryOutcome::new(rho_f)
        .note("subspace_dim", fps.subspace_dim())
        .note("entropy_tau", entropy);
    out.entropy_tau = Some(entropy);
    out.tau = Some(tau);
    Ok(out)
}

/// Weighted average over the whole fixed-point family, then the output state.
pub fn weighted_dctc_evolve(
    c: &StandardFormCircuit,
    rho_i: &DensityOperator,
    weighting: Weighting,
) -> Result<TheoryOutcome> {
    weighted_dctc_evolve_with_grid(c, rho_i, weighting, DEFAULT_GRID)
}

pub fn weighted_dctc_evolve_with_grid(
    c: &StandardFormCircuit,
    rho_i: &DensityOperator,
    weighting: Weighting,
    grid: usize,
) -> Result<TheoryOutcome> {
    let s = consistency_channel(c, rho_i)?;
    let fps = fixed_point_set(&s)?;
    let tau = weighted_fixed_point(&fps, weighting, grid)?;
    let rho_f = dctc_output(&compile_unitary(c), rho_i, &tau)?;
    let entropy = von_neumann_entropy(&tau);
    let mut out = TheoryOutcome::new(rho_f)
        .note("subspace_dim", fps.subspace_dim())
        .note("grid", grid)
        .note("entropy_tau", entropy);
    out.entropy_tau = Some(entropy);
    out.tau = Some(tau);
    Ok(out)
}
