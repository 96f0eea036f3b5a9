//! Unitarily invariant sampling of pure states and unitaries.
//!
//! Two independent samplers draw from the invariant measure on pure states:
//! normalized complex Gaussian vectors ([`haar_state`]) and the Hurwitz angle
//! parametrization with its product density ([`hurwitz_sample`]).

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qstate::{c, CMatrix, CVector, DensityOperator, PureState, UnitaryMatrix};

/// Angles of a point in the Hurwitz parametrization of `d`-level pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct HurwitzPoint {
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

impl HurwitzPoint {
    /// `thetas[k]` and `phis[k]` are the angles with label `k + 1`, so `d = thetas.len() + 1`.
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() || thetas.len() != phis.len() {
            return Err(Error::InvalidParameter(format!(
                "need d-1 >= 1 thetas and phis, got {} and {}",
                thetas.len(),
                phis.len()
            )));
        }
        if let Some(t) = thetas.iter().find(|t| !(0.0..=FRAC_PI_2).contains(*t)) {
            return Err(Error::InvalidParameter(format!("theta {t} outside [0, pi/2]")));
        }
        if let Some(p) = phis.iter().find(|p| !(0.0..2.0 * PI).contains(*p)) {
            return Err(Error::InvalidParameter(format!("phi {p} outside [0, 2pi)")));
        }
        Ok(Self { thetas, phis })
    }

    pub fn dim(&self) -> usize {
        self.thetas.len() + 1
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }
}

/// The state with Hurwitz angles `p`:
/// `|0⟩` carries `∏_{β≥1} sin θ_β`, and `|α⟩` (α ≥ 1) carries `e^{iφ_α} cos θ_α ∏_{β>α} sin θ_β`.
pub fn hurwitz_state(p: &HurwitzPoint) -> PureState {
    let d = p.dim();
    let sin: Vec<f64> = p.thetas.iter().map(|t| t.sin()).collect();
    // tail[a] = ∏_{β=a+1}^{d-1} sin θ_β, with θ labels starting at 1.
    let mut tail = vec![1.0; d];
    for a in (0..d - 1).rev() {
        tail[a] = tail[a + 1] * sin[a];
    }
    let amps = CVector::from_fn(d, |a, _| {
        if a == 0 {
            c(tail[0], 0.0)
        } else {
            let (theta, phi) = (p.thetas[a - 1], p.phis[a - 1]);
            c(phi.cos(), phi.sin()) * (theta.cos() * tail[a])
        }
    });
    // Already unit norm up to rounding; renormalize so the invariant holds to 1e-12.
    PureState::normalized(amps).expect("Hurwitz amplitudes are never all zero")
}

/// Draws angles from the invariant density `∏ cos θ_α sin^{2α−1} θ_α dθ_α dφ_α`.
///
/// The density of `θ_α` is proportional to `d(sin^{2α} θ_α)`, so `sin^{2α} θ_α` is uniform.
pub fn hurwitz_sample<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HurwitzPoint {
    assert!(d >= 2, "Hurwitz sampling needs d >= 2");
    let thetas = (1..d)
        .map(|alpha| {
            let u: f64 = rng.random();
            u.powf(1.0 / (2.0 * alpha as f64)).clamp(0.0, 1.0).asin()
        })
        .collect();
    let phis = (1..d).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
    HurwitzPoint { thetas, phis }
}

/// Haar-random pure state from a normalized vector of standard complex Gaussians.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    assert!(d >= 1);
    loop {
        let v = gaussian_vector(d, rng);
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-random pure state drawn through the Hurwitz parametrization.
pub fn haar_state_hurwitz<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    hurwitz_state(&hurwitz_sample(d, rng))
}

fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    CVector::from_fn(d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    UnitaryMatrix::new(q).expect("QR of a Ginibre matrix is unitary")
}

/// Random full-rank density operator `G G† / Tr(G G†)` with Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(d, d, rng);
    DensityOperator::from_unnormalized(&g * g.adjoint()).expect("Ginibre Gram matrix is PSD")
}

/// Independent generator for chunk `stream` of a run seeded with `seed`.
///
/// Monte-Carlo loops split work into fixed-size chunks, each drawing from its own
/// stream, so results do not depend on how chunks are scheduled across threads.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
