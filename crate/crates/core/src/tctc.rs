//! Transition-probability CTCs.
//!
//! The CV system is integrated over all pure states `|φ⟩` with the unitarily invariant
//! measure, each weighted by its transition probability. With `U_φ = ⟨φ|U|φ⟩` the output is
//! `ρ_f ∝ ∫ d[φ] U_φ|ψ⟩⟨ψ|U_φ†`, which the fourth-moment identities of the measure reduce to
//! `ρ_f ∝ P|ψ⟩⟨ψ|P† + Tr_CV[U(|ψ⟩⟨ψ| ⊗ 1)U†]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{compile_unitary, StandardFormCircuit};
use crate::encoding::complex_matrix;
use crate::error::{Error, Result};
use crate::montecarlo::{run_chunks, Estimate, Moments};
use crate::outcome::TheoryOutcome;
use crate::pctc::pctc_operator;
use crate::qstate::{
    hermitian_eigen, hermitian_part, partial_trace, tensor_product, tensor_vec, trace, CMatrix,
    CVector, DensityOperator, Keep, PureState,
};

pub use crate::haar::{haar_state as haar_sample, haar_state_hurwitz, hurwitz_sample, hurwitz_state, HurwitzPoint};

/// Monte-Carlo estimate of a normalized output state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    #[serde(with = "complex_matrix")]
    pub mean: CMatrix,
    /// Root-sum-square of the per-entry standard errors.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    pub fn state(&self) -> Result<DensityOperator> {
        DensityOperator::from_unnormalized(hermitian_part(&self.mean))
    }

    /// Whether `target` lies within `k` standard errors (Frobenius distance).
    pub fn agrees_with(&self, target: &CMatrix, k: f64) -> bool {
        (&self.mean - target).norm() <= k * self.std_error
    }
}

fn check_input(c: &StandardFormCircuit, psi: &PureState) -> Result<()> {
    if psi.dim() != c.cr_dim() {
        return Err(Error::dim(format!(
            "input state has dim {}, circuit has CR dim {}",
            psi.dim(),
            c.cr_dim()
        )));
    }
    Ok(())
}

/// The two unnormalized terms `PρP†` and `Tr_CV[U(ρ ⊗ 1)U†]`.
fn closed_form_terms(u: &CMatrix, p: &CMatrix, rho: &CMatrix, dcv: usize) -> Result<(CMatrix, CMatrix)> {
    let dcr = rho.nrows();
    let postselected = p * rho * p.adjoint();
    let full = u * tensor_product(rho, &CMatrix::identity(dcv, dcv)) * u.adjoint();
    let channel = partial_trace(&full, (dcr, dcv), Keep::First)?;
    Ok((postselected, channel))
}

/// Closed-form T-CTC output for a pure input.
pub fn tctc_evolve(c: &StandardFormCircuit, psi_i: &PureState) -> Result<TheoryOutcome> {
    check_input(c, psi_i)?;
    let u = compile_unitary(c);
    let p = pctc_operator(c);
    let rho = psi_i.projector();
    let (postselected, channel) = closed_form_terms(u.matrix(), p.matrix(), rho.matrix(), c.cv_dim())?;
    let d = c.cv_dim() as f64;
    let p_norm_sq = trace(&postselected).re;
    let lambda = d / (d + p_norm_sq);
    let z = d + p_norm_sq;
    let rho_f = DensityOperator::from_unnormalized(postselected + channel)?;
    let mut out = TheoryOutcome::new(rho_f)
        .note("lambda", lambda)
        .note("p_norm_sq", p_norm_sq)
        .note("normalizer", z);
    out.normalizer = Some(z);
    Ok(out)
}

/// `λ^ψ = d/(d + ‖P|ψ⟩‖²)`, the weight of the channel term in the output.
pub fn tctc_lambda(c: &StandardFormCircuit, psi_i: &PureState) -> Result<f64> {
    check_input(c, psi_i)?;
    let p_psi = pctc_operator(c).apply(psi_i.amplitudes());
    let d = c.cv_dim() as f64;
    Ok(d / (d + p_psi.norm_squared()))
}

/// T-CTC output for a mixed input, by purifying with an ancilla of dimension `rank ρ_i`
/// on which the circuit acts trivially, then discarding the ancilla.
pub fn tctc_evolve_mixed(c: &StandardFormCircuit, rho_i: &DensityOperator) -> Result<TheoryOutcome> {
    let dcr = c.cr_dim();
    if rho_i.dim() != dcr {
        return Err(Error::dim("input state does not match the CR register"));
    }
    let (values, vecs) = hermitian_eigen(rho_i.matrix());
    let support: Vec<usize> = (0..values.len()).filter(|&k| values[k] > 1e-14).collect();
    let r = support.len();
    let mut purified = CVector::zeros(r * dcr);
    for (slot, &k) in support.iter().enumerate() {
        let amp = values[k].sqrt();
        for s in 0..dcr {
            purified[slot * dcr + s] = vecs[(s, k)] * amp;
        }
    }
    let psi = PureState::normalized(purified)?;
    let id = CMatrix::identity(r, r);
    let u = tensor_product(&id, compile_unitary(c).matrix());
    let p = tensor_product(&id, pctc_operator(c).matrix());
    let (postselected, channel) = closed_form_terms(&u, &p, psi.projector().matrix(), c.cv_dim())?;
    let p_norm_sq = trace(&postselected).re;
    let joint = postselected + channel;
    let reduced = partial_trace(&joint, (r, dcr), Keep::Second)?;
    let d = c.cv_dim() as f64;
    let rho_f = DensityOperator::from_unnormalized(reduced)?;
    let mut out = TheoryOutcome::new(rho_f)
        .note("lambda", d / (d + p_norm_sq))
        .note("p_norm_sq", p_norm_sq)
        .note("ancilla_dim", r)
        .note("normalizer", d + p_norm_sq);
    out.normalizer = Some(d + p_norm_sq);
    Ok(out)
}

/// Per-chunk sums for the ratio estimator `Σ X / Tr Σ X` of a matrix-valued sample `X`.
#[derive(Debug, Clone)]
struct RatioSums {
    n: usize,
    sum: CMatrix,
    sum_abs_sq: CMatrix,
    sum_times_trace: CMatrix,
    sum_trace_sq: f64,
}

impl RatioSums {
    fn new(dim: usize) -> Self {
        Self {
            n: 0,
            sum: CMatrix::zeros(dim, dim),
            sum_abs_sq: CMatrix::zeros(dim, dim),
            sum_times_trace: CMatrix::zeros(dim, dim),
            sum_trace_sq: 0.0,
        }
    }

    fn push(&mut self, x: &CMatrix) {
        let t = trace(x).re;
        self.n += 1;
        self.sum += x;
        self.sum_abs_sq += x.map(|z| z.norm_sqr().into());
        self.sum_times_trace += x.scale(t);
        self.sum_trace_sq += t * t;
    }

    fn merge(mut self, other: &RatioSums) -> Self {
        self.n += other.n;
        self.sum += &other.sum;
        self.sum_abs_sq += &other.sum_abs_sq;
        self.sum_times_trace += &other.sum_times_trace;
        self.sum_trace_sq += other.sum_trace_sq;
        self
    }

    /// Normalized mean and the delta-method standard error of each entry, combined in quadrature.
    fn finish(self, seed: u64) -> Result<MCEstimate> {
        let n = self.n as f64;
        let mean = self.sum.unscale(n);
        let t = trace(&mean).re;
        if !(t > 0.0) {
            return Err(Error::Numerical("Monte-Carlo integrand has vanishing trace".into()));
        }
        let rho = mean.unscale(t);
        // Var(X_ij − ρ_ij Tr X) / (n t²), linearizing the ratio around the sample means.
        let e_t2 = self.sum_trace_sq / n;
        let mut var_total = 0.0;
        for idx in 0..rho.len() {
            let r = rho[idx];
            let e_abs = self.sum_abs_sq[idx].re / n;
            let e_xt = self.sum_times_trace[idx] / n;
            let second = e_abs - 2.0 * (r.conj() * e_xt).re + r.norm_sqr() * e_t2;
            var_total += second.max(0.0);
        }
        let denom = if self.n > 1 { (n - 1.0) * t * t } else { f64::INFINITY };
        Ok(MCEstimate {
            mean: rho,
            std_error: (var_total / denom).sqrt(),
            samples: self.n,
            seed,
        })
    }
}

/// Estimates the normalized average of `integrand(φ)` over Haar-random CV states `φ`.
fn integrate_cv<F>(dim: usize, dcv: usize, samples: usize, seed: u64, integrand: F) -> Result<MCEstimate>
where
    F: Fn(&CVector) -> CMatrix + Sync,
{
    let parts = run_chunks(samples, seed, |rng, count| {
        let mut acc = RatioSums::new(dim);
        for _ in 0..count {
            let phi = haar_sample(dcv, rng);
            acc.push(&integrand(phi.amplitudes()));
        }
        acc
    })?;
    parts
        .iter()
        .fold(RatioSums::new(dim), |acc, part| acc.merge(part))
        .finish(seed)
}

/// `U(|ψ⟩ ⊗ |φ⟩)` and its contraction `(1 ⊗ ⟨φ|)U(|ψ⟩ ⊗ |φ⟩) = U_φ|ψ⟩`.
fn transition(u: &CMatrix, psi: &CVector, phi: &CVector) -> (CVector, CVector) {
    let (dcr, dcv) = (psi.len(), phi.len());
    let out = u * tensor_vec(psi, phi);
    let projected = CVector::from_fn(dcr, |i, _| {
        (0..dcv).map(|a| phi[a].conj() * out[i * dcv + a]).sum()
    });
    (out, projected)
}

/// Monte-Carlo evaluation of `∫ d[φ] U_φ|ψ⟩⟨ψ|U_φ†`, normalized.
pub fn tctc_evolve_mc(
    c: &StandardFormCircuit,
    psi_i: &PureState,
    samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    check_input(c, psi_i)?;
    let u = compile_unitary(c);
    let psi = psi_i.amplitudes();
    integrate_cv(c.cr_dim(), c.cv_dim(), samples, seed, |phi| {
        let (_, w) = transition(u.matrix(), psi, phi);
        &w * w.adjoint()
    })
}

/// Monte-Carlo evaluation of `∫ d[φ] p(φ) Tr_CV[U(|ψ⟩⟨ψ| ⊗ |φ⟩⟨φ|)U†]` with
/// `p(φ) = ‖U_φ|ψ⟩‖²`, normalized.
pub fn ptrace_variant_evolve(
    c: &StandardFormCircuit,
    psi_i: &PureState,
    samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    check_input(c, psi_i)?;
    let u = compile_unitary(c);
    let psi = psi_i.amplitudes();
    let (dcr, dcv) = (c.cr_dim(), c.cv_dim());
    integrate_cv(dcr, dcv, samples, seed, |phi| {
        let (out, w) = transition(u.matrix(), psi, phi);
        let weight = w.norm_squared();
        CMatrix::from_fn(dcr, dcr, |i, j| {
            (0..dcv).map(|a| out[i * dcv + a] * out[j * dcv + a].conj()).sum::<num_complex::Complex64>()
                * weight
        })
    })
}

/// Haar-measure moments `I_(αβ)(γδ) = ∫ d[φ] ⟨φ|α⟩⟨β|φ⟩⟨φ|δ⟩⟨γ|φ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentIntegrals {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    /// `I_(αβ)(αβ)` with `α ≠ β`.
    pub i_ab_ab: Estimate,
    /// `I_(αα)(ββ)` with `α ≠ β`.
    pub i_aa_bb: Estimate,
    /// `I_(αα)(αα)`.
    pub i_aa_aa: Estimate,
    /// `|I_(01)(00)|`, a pattern whose phases do not cancel.
    pub mixed: Estimate,
    /// `I_(αα)(αα) / I_(αβ)(αβ)`.
    pub ratio: Estimate,
    /// `E|⟨φ|0⟩|²`.
    pub second: Estimate,
}

/// Estimates of the moment classes at `α = d−1`, `β = d−2`.
pub fn moment_integrals(dim: usize, samples: usize, seed: u64) -> Result<MomentIntegrals> {
    if dim < 2 {
        return Err(Error::InvalidParameter("moment integrals need d >= 2".into()));
    }
    let (a, b) = (dim - 1, dim - 2);
    #[derive(Default, Clone)]
    struct Sums {
        ab_ab: Moments,
        aa_bb: Moments,
        aa_aa: Moments,
        mixed_re: Moments,
        mixed_im: Moments,
        second: Moments,
        cross: f64,
    }
    let parts = run_chunks(samples, seed, |rng, count| {
        let mut s = Sums::default();
        for _ in 0..count {
            let phi = haar_sample(dim, rng);
            let v = phi.amplitudes();
            let (pa, pb) = (v[a].norm_sqr(), v[b].norm_sqr());
            // ⟨φ|α⟩⟨β|φ⟩⟨φ|δ⟩⟨γ|φ⟩ = conj φ_α · φ_β · conj φ_δ · φ_γ
            let integrand = |al: usize, be: usize, ga: usize, de: usize| {
                v[al].conj() * v[be] * v[de].conj() * v[ga]
            };
            let abab = integrand(a, b, a, b).re;
            let aaaa = pa * pa;
            s.ab_ab.push(abab);
            s.aa_bb.push(integrand(a, a, b, b).re);
            s.aa_aa.push(aaaa);
            let mixed = integrand(0, 1, 0, 0);
            s.mixed_re.push(mixed.re);
            s.mixed_im.push(mixed.im);
            s.second.push(v[0].norm_sqr());
            s.cross += aaaa * pa * pb;
        }
        s
    })?;
    let total = parts.iter().fold(Sums::default(), |acc, p| Sums {
        ab_ab: acc.ab_ab.merge(&p.ab_ab),
        aa_bb: acc.aa_bb.merge(&p.aa_bb),
        aa_aa: acc.aa_aa.merge(&p.aa_aa),
        mixed_re: acc.mixed_re.merge(&p.mixed_re),
        mixed_im: acc.mixed_im.merge(&p.mixed_im),
        second: acc.second.merge(&p.second),
        cross: acc.cross + p.cross,
    });
    let n = samples as f64;
    let (num, den) = (total.aa_aa.estimate(), total.ab_ab.estimate());
    let cov = (total.cross / n - num.mean * den.mean) * n / (n - 1.0).max(1.0) / n;
    let ratio = num.mean / den.mean;
    let ratio_var = num.std_error.powi(2) / den.mean.powi(2)
        + num.mean.powi(2) * den.std_error.powi(2) / den.mean.powi(4)
        - 2.0 * num.mean * cov / den.mean.powi(3);
    let (re, im) = (total.mixed_re.estimate(), total.mixed_im.estimate());
    Ok(MomentIntegrals {
        dim,
        samples,
        seed,
        i_ab_ab: den,
        i_aa_bb: total.aa_bb.estimate(),
        i_aa_aa: num,
        mixed: Estimate {
            mean: re.mean.hypot(im.mean),
            std_error: re.std_error.hypot(im.std_error),
        },
        ratio: Estimate {
            mean: ratio,
            std_error: ratio_var.max(0.0).sqrt(),
        },
        second: total.second.estimate(),
    })
}

/// Which sampler draws the states in [`sampler_moments`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampler {
    Gaussian,
    Hurwitz,
}

/// `E|⟨φ|0⟩|²` and `E|⟨φ|0⟩|⁴` under the chosen sampler.
pub fn sampler_moments(dim: usize, samples: usize, seed: u64, sampler: Sampler) -> Result<(Estimate, Estimate)> {
    let parts = run_chunks(samples, seed, |rng, count| {
        let (mut second, mut fourth) = (Moments::default(), Moments::default());
        for _ in 0..count {
            let phi = draw(dim, sampler, rng);
            let p = phi.amplitudes()[0].norm_sqr();
            second.push(p);
            fourth.push(p * p);
        }
        (second, fourth)
    })?;
    let (second, fourth) = parts
        .iter()
        .fold((Moments::default(), Moments::default()), |(s, f), (ps, pf)| (s.merge(ps), f.merge(pf)));
    Ok((second.estimate(), fourth.estimate()))
}

fn draw<R: Rng + ?Sized>(dim: usize, sampler: Sampler, rng: &mut R) -> PureState {
    match sampler {
        Sampler::Gaussian => haar_sample(dim, rng),
        Sampler::Hurwitz => haar_state_hurwitz(dim, rng),
    }
}
