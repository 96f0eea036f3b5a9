//! Fixed points of a channel: the eigenvalue-1 eigenspace, the noisy
//! consistency condition, and plain / averaged iteration.

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::qstate::{
    c, frobenius_distance, hermitian_part, trace, unvectorize, validate_density, vectorize,
    CMatrix, CVector, DensityOperator, DENSITY_TOL,
};

use super::Superoperator;

/// Singular values of `S − 1` below this mark the eigenvalue-1 eigenspace.
pub const EIGENVALUE_ONE_WINDOW: f64 = 1e-8;

/// The consistent time-travelling states of a channel: `τ₀ + Σ c_j B_j` for real `c_j`
/// (intersected with the positive cone).
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    representative: DensityOperator,
    directions: Vec<CMatrix>,
}

impl FixedPointSet {
    pub fn representative(&self) -> &DensityOperator {
        &self.representative
    }

    /// Traceless Hermitian directions, orthonormal in the Hilbert–Schmidt inner product.
    pub fn directions(&self) -> &[CMatrix] {
        &self.directions
    }

    /// Real dimension of the Hermitian fixed-operator subspace (always ≥ 1).
    pub fn subspace_dim(&self) -> usize {
        self.directions.len() + 1
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }

    /// `τ₀ + Σ c_j B_j` (not checked for positivity).
    pub fn point(&self, coeffs: &[f64]) -> CMatrix {
        assert_eq!(coeffs.len(), self.directions.len());
        self.directions
            .iter()
            .zip(coeffs)
            .fold(self.representative.matrix().clone(), |acc, (b, &t)| acc + b.scale(t))
    }
}

/// Gram–Schmidt on Hermitian matrices with the real inner product `Re Tr(A†B)`.
fn orthonormalize(candidates: impl IntoIterator<Item = CMatrix>, tol: f64) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    for mut x in candidates {
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&x).re;
                x -= b.scale(overlap);
            }
        }
        let norm = x.norm();
        if norm > tol {
            basis.push(x.unscale(norm));
        }
    }
    basis
}

/// Eigenvalue-1 eigenspace of `S` restricted to Hermitian operators.
///
/// The representative is the spectral projection of `1/d` onto the eigenspace, which is
/// the limit of the Cesàro means `(1/N) Σ_{k<N} S^k(1/d)`; see [`cesaro_mean`] for the
/// direct average.
pub fn fixed_point_set(s: &Superoperator) -> Result<FixedPointSet> {
    let d = s.dim();
    let d2 = d * d;
    let a = s.matrix() - CMatrix::identity(d2, d2);
    let svd = SVD::try_new(a, true, true, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("SVD of S - 1 did not converge".into()))?;
    let (u, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] < EIGENVALUE_ONE_WINDOW)
        .collect();
    if null.is_empty() {
        return Err(Error::Numerical(
            "no eigenvalue within the eigenvalue-1 window; map is not trace preserving".into(),
        ));
    }
    let k = null.len();
    let right = CMatrix::from_fn(d2, k, |r, j| v_t[(null[j], r)].conj());
    let left = CMatrix::from_fn(d2, k, |r, j| u[(r, null[j])]);
    let gram = left.adjoint() * &right;
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Numerical("eigenvalue 1 is not semisimple".into()))?;
    let mixed = vectorize(&CMatrix::identity(d, d).unscale(d as f64));
    let projected = &right * (gram_inv * (left.adjoint() * mixed));
    let tau0 = hermitian_part(&unvectorize(&projected, d));
    let tr = trace(&tau0).re;
    let representative = validate_density(&tau0.unscale(tr), DENSITY_TOL)?;

    // Fixed operators are closed under †, so Hermitian and anti-Hermitian parts are fixed too.
    let hermitian = orthonormalize(
        (0..k).flat_map(|j| {
            let x = unvectorize(&right.column(j).into_owned(), d);
            let h1 = hermitian_part(&x);
            let h2 = hermitian_part(&(x * c(0.0, -1.0)));
            [h1, h2]
        }),
        1e-7,
    );
    let tau = representative.matrix().clone();
    let directions = orthonormalize(
        hermitian
            .into_iter()
            .map(|h| {
                let t = trace(&h).re;
                hermitian_part(&(h - tau.scale(t)))
            }),
        1e-7,
    );
    Ok(FixedPointSet {
        representative,
        directions,
    })
}

#[derive(Debug, Clone)]
pub struct CesaroMean {
    pub mean: DensityOperator,
    /// Number of iterates averaged.
    pub terms: usize,
    pub converged: bool,
}

/// Average of `S^k(start)` for `k < N`, doubling `N` until successive averages differ by
/// less than `tol` in Frobenius norm or `N` would exceed `max_terms`.
pub fn cesaro_mean(
    s: &Superoperator,
    start: &DensityOperator,
    tol: f64,
    max_terms: usize,
) -> Result<CesaroMean> {
    if start.dim() != s.dim() {
        return Err(Error::dim("starting state does not match the channel"));
    }
    let mut current = vectorize(start.matrix());
    let mut sum = CVector::zeros(current.len());
    let mut terms = 0usize;
    let mut previous: Option<CVector> = None;
    let mut block = 1usize;
    let mut converged = false;
    while terms + block <= max_terms.max(1) {
        for _ in 0..block {
            sum += &current;
            current = s.apply_vec(&current);
        }
        terms += block;
        let mean = sum.unscale(terms as f64);
        if let Some(prev) = &previous {
            if (&mean - prev).norm() < tol {
                converged = true;
                previous = Some(mean);
                break;
            }
        }
        previous = Some(mean);
        block = terms;
    }
    let mean = unvectorize(&previous.expect("at least one block"), s.dim());
    Ok(CesaroMean {
        mean: DensityOperator::from_unnormalized(hermitian_part(&mean))?,
        terms,
        converged,
    })
}

/// Solves `τ = p·1/d + (1 − p) S(τ)`.
///
/// For `p ∈ (0, 1)` the system is nonsingular because a channel's spectral radius is 1;
/// `p = 0` is accepted and reports the degeneracy of the noiseless condition.
pub fn noisy_fixed_point(s: &Superoperator, p: f64) -> Result<DensityOperator> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "depolarizing probability must lie in [0, 1), got {p}"
        )));
    }
    let d = s.dim();
    let d2 = d * d;
    let a = CMatrix::identity(d2, d2) - s.matrix().scale(1.0 - p);
    let b = vectorize(&CMatrix::identity(d, d)).scale(p / d as f64);
    let svd = SVD::try_new(a.clone(), false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let smallest = svd.singular_values.min();
    if smallest < 1e-13 {
        return Err(Error::Degenerate(format!(
            "(1-p)^-1 = {} is an eigenvalue of the channel (smallest singular value {smallest:e}); \
             perturb p",
            1.0 / (1.0 - p)
        )));
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("LU solve failed".into()))?;
    let tau = hermitian_part(&unvectorize(&x, d));
    DensityOperator::from_unnormalized(tau)
}

#[derive(Debug, Clone, PartialEq)]
pub enum IterationVerdict {
    /// `σ_at` is a fixed point (within tolerance); `at ≥ 1`.
    Converged { state: DensityOperator, at: usize },
    /// `σ_at` equals `σ_{at − period}`.
    Cycle { period: usize, at: usize },
    NoVerdict,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `σ_0, σ_1, …` as computed.
    pub states: Vec<DensityOperator>,
    pub verdict: IterationVerdict,
}

/// Longest cycle length checked by [`iterate_channel`].
pub const MAX_CYCLE_PERIOD: usize = 16;

/// Plain iteration `σ_N = S^N(σ_0)` as in the unwrapped equivalent-circuit ladder.
///
/// Convergence is reported at the first `N ≥ 1` with `‖S(σ_N) − σ_N‖_F < tol`; otherwise a
/// cycle of period `2..=16` is reported when `‖σ_N − σ_{N−k}‖_F < tol`.
pub fn iterate_channel(
    s: &Superoperator,
    sigma0: &DensityOperator,
    max_iter: usize,
    tol: f64,
) -> Result<Trajectory> {
    if sigma0.dim() != s.dim() {
        return Err(Error::dim("starting state does not match the channel"));
    }
    let mut states = vec![sigma0.clone()];
    for n in 0..max_iter {
        let next = DensityOperator::from_unnormalized(s.apply_hermitian(states[n].matrix()))?;
        let step = frobenius_distance(next.matrix(), states[n].matrix());
        states.push(next);
        if step < tol {
            let at = n.max(1);
            let state = states[at].clone();
            return Ok(Trajectory {
                states,
                verdict: IterationVerdict::Converged { state, at },
            });
        }
        let newest = n + 1;
        let period = (2..=MAX_CYCLE_PERIOD.min(newest)).find(|&k| {
            frobenius_distance(states[newest].matrix(), states[newest - k].matrix()) < tol
        });
        if let Some(period) = period {
            return Ok(Trajectory {
                states,
                verdict: IterationVerdict::Cycle { period, at: newest },
            });
        }
    }
    Ok(Trajectory {
        states,
        verdict: IterationVerdict::NoVerdict,
    })
}
