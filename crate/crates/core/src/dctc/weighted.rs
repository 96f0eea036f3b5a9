//! Weighted averages over a fixed-point family.
//!
//! "Uniform" means Lebesgue measure on the coefficient vector `c` of
//! `τ(c) = τ₀ + Σ c_j B_j` over the feasible set. One direction is integrated with the
//! midpoint rule on the exact feasible interval; two directions in polar coordinates
//! about `τ₀`, with the exact boundary radius along every angle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qstate::{trace, CMatrix, DensityOperator};

use super::maxent::SupportFamily;
use super::FixedPointSet;

/// Default number of quadrature points per direction.
pub const DEFAULT_GRID: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// `w = 1`.
    Uniform,
    /// `w(τ) = Tr τ²`, the transition probability of a fixed point.
    Transition,
}

impl Weighting {
    fn weight(self, tau: &CMatrix) -> f64 {
        match self {
            Weighting::Uniform => 1.0,
            Weighting::Transition => trace(&(tau * tau)).re,
        }
    }
}

/// `∫ w(τ) τ dc / ∫ w(τ) dc` over the feasible coefficient set.
pub fn weighted_fixed_point(
    fps: &FixedPointSet,
    weighting: Weighting,
    grid: usize,
) -> Result<DensityOperator> {
    if grid == 0 {
        return Err(Error::InvalidParameter("quadrature grid must be positive".into()));
    }
    let fam = SupportFamily::new(fps);
    let (sum, total) = match fam.num_directions() {
        0 => return Ok(fps.representative().clone()),
        1 => {
            let (lo, hi) = fam.ray_limits(&[1.0]);
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Numerical("unbounded fixed-point family".into()));
            }
            let h = (hi - lo) / grid as f64;
            accumulate((0..grid).map(|i| (vec![lo + (i as f64 + 0.5) * h], 1.0)), &fam, weighting)
        }
        2 => {
            let dtheta = 2.0 * PI / grid as f64;
            let mut nodes = Vec::with_capacity(grid * grid);
            for i in 0..grid {
                let theta = (i as f64 + 0.5) * dtheta;
                let dir = [theta.cos(), theta.sin()];
                let (_, radius) = fam.ray_limits(&dir);
                if !radius.is_finite() {
                    return Err(Error::Numerical("unbounded fixed-point family".into()));
                }
                let dr = radius / grid as f64;
                for j in 0..grid {
                    let r = (j as f64 + 0.5) * dr;
                    nodes.push((vec![r * dir[0], r * dir[1]], r * dr));
                }
            }
            accumulate(nodes.into_iter(), &fam, weighting)
        }
        k => {
            return Err(Error::Unsupported(format!(
                "weighted quadrature supports at most 2 directions (subspace_dim <= 3); got subspace_dim = {}",
                k + 1
            )))
        }
    };
    if !(total > 0.0) {
        return Err(Error::Numerical("total quadrature weight vanished".into()));
    }
    DensityOperator::from_unnormalized(fam.lift(&sum.unscale(total)))
}

fn accumulate(
    nodes: impl Iterator<Item = (Vec<f64>, f64)>,
    fam: &SupportFamily,
    weighting: Weighting,
) -> (CMatrix, f64) {
    let r = fam.point(&vec![0.0; fam.num_directions()]).nrows();
    let mut sum = CMatrix::zeros(r, r);
    let mut total = 0.0;
    for (coeffs, measure) in nodes {
        let tau = fam.point(&coeffs);
        let w = weighting.weight(&tau) * measure;
        sum += tau.scale(w);
        total += w;
    }
    (sum, total)
}
