//! Maximum-entropy selection over a fixed-point family.
//!
//! Every fixed state is supported inside the support of the representative, so the
//! family is restricted to that support first; there the representative is positive
//! definite and the entropy is smooth on the interior of the feasible set.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qstate::{
    hermitian_eigen, hermitian_fn, hermitian_part, validate_density, CMatrix, DensityOperator,
    DENSITY_TOL,
};

use super::FixedPointSet;

/// Eigenvalues of the representative above this define its support.
const SUPPORT_CUTOFF: f64 = 1e-10;

/// Required first-order optimality: `‖∇S‖ < 1e-7` in coefficient space.
pub const MAX_ENTROPY_RESIDUAL: f64 = 1e-7;

/// A fixed-point family expressed on the support of its representative.
#[derive(Debug, Clone)]
pub(crate) struct SupportFamily {
    /// `d×r` isometry onto the support.
    isometry: CMatrix,
    base: CMatrix,
    directions: Vec<CMatrix>,
    base_inv_sqrt: CMatrix,
}

impl SupportFamily {
    pub(crate) fn new(fps: &FixedPointSet) -> Self {
        let (values, vecs) = hermitian_eigen(fps.representative().matrix());
        let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > SUPPORT_CUTOFF).collect();
        let isometry = CMatrix::from_fn(vecs.nrows(), keep.len(), |r, j| vecs[(r, keep[j])]);
        let restrict = |x: &CMatrix| hermitian_part(&(isometry.adjoint() * x * &isometry));
        let base = restrict(fps.representative().matrix());
        let directions = fps.directions().iter().map(restrict).collect();
        let base_inv_sqrt = hermitian_fn(&base, |l| 1.0 / l.max(SUPPORT_CUTOFF).sqrt());
        Self {
            isometry,
            base,
            directions,
            base_inv_sqrt,
        }
    }

    pub(crate) fn num_directions(&self) -> usize {
        self.directions.len()
    }

    pub(crate) fn point(&self, coeffs: &[f64]) -> CMatrix {
        self.directions
            .iter()
            .zip(coeffs)
            .fold(self.base.clone(), |acc, (b, &t)| acc + b.scale(t))
    }

    pub(crate) fn combination(&self, coeffs: &[f64]) -> CMatrix {
        let r = self.base.nrows();
        self.directions
            .iter()
            .zip(coeffs)
            .fold(CMatrix::zeros(r, r), |acc, (b, &t)| acc + b.scale(t))
    }

    pub(crate) fn lift(&self, x: &CMatrix) -> CMatrix {
        hermitian_part(&(&self.isometry * x * self.isometry.adjoint()))
    }

    /// `(t_lo, t_hi)` with `t_lo ≤ 0 ≤ t_hi` such that `base + t Σ u_j B_j ⪰ 0` exactly on `[t_lo, t_hi]`.
    pub(crate) fn ray_limits(&self, u: &[f64]) -> (f64, f64) {
        let m = &self.base_inv_sqrt * self.combination(u) * &self.base_inv_sqrt;
        let (values, _) = hermitian_eigen(&m);
        let lo = values.first().copied().unwrap_or(0.0);
        let hi = values.last().copied().unwrap_or(0.0);
        // base + tB ⪰ 0  ⟺  1 + tM ⪰ 0.
        let t_hi = if lo < 0.0 { -1.0 / lo } else { f64::INFINITY };
        let t_lo = if hi > 0.0 { -1.0 / hi } else { f64::NEG_INFINITY };
        (t_lo, t_hi)
    }
}

fn entropy_of(x: &CMatrix) -> Option<f64> {
    let (values, _) = hermitian_eigen(x);
    if values.first().is_some_and(|&l| l <= 0.0) {
        return None;
    }
    Some(values.iter().map(|&l| -l * l.ln()).sum())
}

/// Gradient and Hessian of `S(base + Σ c_j B_j)` with respect to `c`.
fn derivatives(x: &CMatrix, directions: &[CMatrix]) -> (DVector<f64>, DMatrix<f64>) {
    let (values, vecs) = hermitian_eigen(x);
    let k = directions.len();
    let rotated: Vec<CMatrix> = directions
        .iter()
        .map(|b| vecs.adjoint() * b * &vecs)
        .collect();
    let r = values.len();
    // First divided differences of ln on the spectrum.
    let divided = DMatrix::from_fn(r, r, |a, b| {
        let (la, lb) = (values[a], values[b]);
        if (la - lb).abs() <= 1e-12 * la.max(lb) {
            2.0 / (la + lb)
        } else {
            (la.ln() - lb.ln()) / (la - lb)
        }
    });
    // dS/dc_j = −Tr(B_j ln X)  (directions are traceless).
    let grad = DVector::from_fn(k, |j, _| {
        -(0..r).map(|a| rotated[j][(a, a)].re * values[a].ln()).sum::<f64>()
    });
    let hess = DMatrix::from_fn(k, k, |i, j| {
        let mut acc = 0.0;
        for a in 0..r {
            for b in 0..r {
                acc += (rotated[i][(a, b)].conj() * rotated[j][(a, b)]).re * divided[(a, b)];
            }
        }
        -acc
    });
    (grad, hess)
}

#[derive(Debug, Clone)]
pub struct MaxEntropySolution {
    pub tau: DensityOperator,
    pub coefficients: Vec<f64>,
    /// Norm of the entropy gradient at the solution.
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton ascent on the concave entropy, keeping the iterate positive definite on
/// the support by backtracking.
pub fn maximize_entropy(fps: &FixedPointSet) -> Result<MaxEntropySolution> {
    if fps.directions().is_empty() {
        return Ok(MaxEntropySolution {
            tau: fps.representative().clone(),
            coefficients: Vec::new(),
            residual: 0.0,
            iterations: 0,
        });
    }
    let fam = SupportFamily::new(fps);
    let k = fam.num_directions();
    let mut coeffs = vec![0.0; k];
    let mut value = entropy_of(&fam.point(&coeffs))
        .ok_or_else(|| Error::Numerical("representative is singular on its support".into()))?;
    let mut iterations = 0;
    while iterations < 500 {
        let x = fam.point(&coeffs);
        let (grad, hess) = derivatives(&x, &fam.directions);
        if grad.norm() < 1e-10 {
            break;
        }
        iterations += 1;
        // Ascent direction: −H⁻¹g (H is negative definite), falling back to the gradient.
        let step = (-hess)
            .cholesky()
            .map(|ch| ch.solve(&grad))
            .filter(|s| s.dot(&grad) > 0.0)
            .unwrap_or_else(|| grad.clone());
        let slope = step.dot(&grad);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = coeffs.iter().zip(step.iter()).map(|(c, s)| c + t * s).collect();
            if let Some(v) = entropy_of(&fam.point(&trial)) {
                if v >= value + 1e-4 * t * slope || (v >= value && t < 1e-6) {
                    coeffs = trial;
                    value = v;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let x = fam.point(&coeffs);
    let residual = derivatives(&x, &fam.directions).0.norm();
    let tau = validate_density(&fam.lift(&x), DENSITY_TOL)?;
    Ok(MaxEntropySolution {
        tau,
        coefficients: coeffs,
        residual,
        iterations,
    })
}

/// The unique maximum-entropy element of the family.
pub fn max_entropy_fixed_point(fps: &FixedPointSet) -> Result<DensityOperator> {
    let sol = maximize_entropy(fps)?;
    if sol.residual >= MAX_ENTROPY_RESIDUAL {
        return Err(Error::Numerical(format!(
            "entropy maximizer stalled with gradient norm {:e}",
            sol.residual
        )));
    }
    Ok(sol.tau)
}

/// A random feasible member of the family: a uniform point on a random ray from the
/// representative to the boundary of the positive cone.
pub fn random_feasible_point<R: Rng + ?Sized>(fps: &FixedPointSet, rng: &mut R) -> DensityOperator {
    if fps.directions().is_empty() {
        return fps.representative().clone();
    }
    let fam = SupportFamily::new(fps);
    let u: Vec<f64> = (0..fam.num_directions()).map(|_| rng.sample(StandardNormal)).collect();
    let (_, t_hi) = fam.ray_limits(&u);
    let t = if t_hi.is_finite() { t_hi * rng.random::<f64>() } else { 0.0 };
    let coeffs: Vec<f64> = u.iter().map(|x| x * t).collect();
    let x = fam.lift(&fam.point(&coeffs));
    DensityOperator::from_unnormalized(x).expect("points inside the positive cone are states")
}
