//! The end-to-end acceptance suite, shared by `ctc-sim verify` and the `acceptance` test target.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::bound_audit;
use crate::circuit::{catalog, haar_circuit, product_circuit, GateName, CATALOG_NAMES};
use crate::dctc::{
    cesaro_mean, consistency_channel, dctc_evolve, fixed_point_set, iterate_channel,
    max_entropy_fixed_point, noisy_fixed_point, DctcRule, IterationVerdict,
};
use crate::error::{Error, Result};
use crate::haar::{haar_state, haar_unitary, random_density};
use crate::pctc::{pctc_evolve, pctc_evolve_noisy, pctc_operator, pctc_protocol_oracle};
use crate::qstate::{
    c, fidelity, frobenius_distance, trace_distance, CMatrix, DensityOperator, PureState,
    UnitaryMatrix, ONE, ZERO,
};
use crate::tctc::{moment_integrals, sampler_moments, tctc_evolve, tctc_evolve_mc, tctc_evolve_mixed, Sampler};

/// Sample sizes for the statistical criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Full,
    /// Reduced Monte-Carlo sample counts for a fast smoke run.
    Quick,
}

impl Profile {
    fn samples(self) -> usize {
        match self {
            Profile::Full => 100_000,
            Profile::Quick => 20_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    /// One table line: `[PASS]  3  unproven-theorem T-CTC  (1.2 s / 30 s)  detail`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}  {:<34} ({:.3} s / {} s)  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

/// Outcome of a criterion body: `Ok(detail)` when every check held.
type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ket(s: &str) -> std::result::Result<PureState, String> {
    lift(PureState::from_ket(s))
}

fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_fn(values.len(), values.len(), |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub budget: Duration,
    run: fn(Profile) -> Check,
}

pub fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { id: 1, name: "unproven-theorem D-CTC", budget: s(1), run: unproven_dctc },
        Criterion { id: 2, name: "unproven-theorem P-CTC", budget: s(1), run: unproven_pctc },
        Criterion { id: 3, name: "unproven-theorem T-CTC", budget: s(30), run: unproven_tctc },
        Criterion { id: 4, name: "distinguishing circuit", budget: s(1), run: distinguishing },
        Criterion { id: 5, name: "equivalent-circuit counterexample", budget: s(1), run: ecm },
        Criterion { id: 6, name: "depolarizing-noise uniqueness", budget: s(1), run: noise_uniqueness },
        Criterion { id: 7, name: "P-CTC paradox handling", budget: s(1), run: paradox },
        Criterion { id: 8, name: "Haar moment identities", budget: s(60), run: moments },
        Criterion { id: 9, name: "oracle equivalences", budget: s(300), run: oracles },
        Criterion { id: 10, name: "bound audit", budget: s(300), run: audit },
        Criterion { id: 11, name: "reduction property", budget: s(30), run: reduction },
    ]
}

pub fn run_criterion(c: &Criterion, profile: Profile) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)(profile);
    let elapsed = start.elapsed();
    let in_time = elapsed <= c.budget;
    let (passed, mut detail) = match outcome {
        Ok(d) => (in_time, d),
        Err(d) => (false, d),
    };
    if !in_time {
        detail = format!("over time budget; {detail}");
    }
    CriterionResult {
        id: c.id,
        name: c.name,
        passed,
        detail,
        elapsed,
        budget: c.budget,
    }
}

pub fn run_all(profile: Profile) -> Vec<CriterionResult> {
    criteria().iter().map(|c| run_criterion(c, profile)).collect()
}

fn unproven_dctc(_: Profile) -> Check {
    let circ = lift(catalog("unproven_theorem"))?;
    let rho = ket("|00⟩")?.projector();
    let s = lift(consistency_channel(&circ, &rho))?;
    let fps = lift(fixed_point_set(&s))?;
    ensure(fps.subspace_dim() == 2, || format!("subspace_dim {}", fps.subspace_dim()))?;
    for b in fps.directions() {
        let off = b.norm_squared() - (0..2).map(|i| b[(i, i)].norm_sqr()).sum::<f64>();
        ensure(off.max(0.0).sqrt() < 1e-9, || "fixed direction is not diagonal".into())?;
    }
    ensure(frobenius_distance(fps.representative().matrix(), &diag(&[0.5, 0.5])) < 1e-9, || {
        "representative is not diagonal".into()
    })?;
    let tau = lift(max_entropy_fixed_point(&fps))?;
    let alpha = tau.matrix()[(0, 0)].re;
    ensure(frobenius_distance(tau.matrix(), &diag(&[0.5, 0.5])) < 1e-9, || format!("alpha = {alpha}"))?;
    let out = lift(dctc_evolve(&circ, &rho, DctcRule::MaxEntropy))?;
    let err = frobenius_distance(out.rho_f.matrix(), &diag(&[0.5, 0.0, 0.0, 0.5]));
    ensure(err < 1e-9, || format!("rho_f error {err:e}"))?;
    Ok(format!("alpha = {alpha:.12}, error {err:.1e}"))
}

fn unproven_pctc(_: Profile) -> Check {
    let circ = lift(catalog("unproven_theorem"))?;
    let out = lift(pctc_evolve(&circ, &ket("|00⟩")?.projector()))?;
    let s = 0.5f64.sqrt();
    let bell = lift(PureState::new(crate::qstate::CVector::from_vec(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)])))?;
    let f = fidelity(&out.rho_f, &bell.projector());
    ensure(f > 1.0 - 1e-10, || format!("fidelity {f}"))?;
    Ok(format!("fidelity 1 - {:.1e}", 1.0 - f))
}

fn unproven_tctc(profile: Profile) -> Check {
    let circ = lift(catalog("unproven_theorem"))?;
    let psi = ket("|00⟩")?;
    let mut expect = diag(&[0.5, 0.0, 0.0, 0.5]);
    expect[(0, 3)] = c(0.25, 0.0);
    expect[(3, 0)] = c(0.25, 0.0);
    let out = lift(tctc_evolve(&circ, &psi))?;
    let worst = (&expect - out.rho_f.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure(worst < 1e-9, || format!("closed form off by {worst:e}"))?;
    let est = lift(tctc_evolve_mc(&circ, &psi, profile.samples(), 2024))?;
    let dist = (&est.mean - &expect).norm();
    ensure(est.agrees_with(&expect, 5.0), || format!("MC {dist:.2e} > 5 x {:.2e}", est.std_error))?;
    let td = trace_distance(&lift(est.state())?, &out.rho_f);
    ensure(td < 0.02, || format!("MC trace distance {td}"))?;
    Ok(format!("closed form {worst:.1e}; MC {dist:.2e} vs se {:.2e}, D = {td:.4}", est.std_error))
}

fn distinguishing(_: Profile) -> Check {
    let circ = lift(catalog("distinguishing"))?;
    for (input, output) in [("|0⟩", "|0⟩"), ("|-⟩", "|1⟩")] {
        let out = lift(dctc_evolve(&circ, &ket(input)?.projector(), DctcRule::MaxEntropy))?;
        let err = frobenius_distance(out.rho_f.matrix(), ket(output)?.projector().matrix());
        ensure(err < 1e-10, || format!("D-CTC {input}: error {err:e}"))?;
    }
    let s = 0.5f64.sqrt();
    let p_expect = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, c(s, 0.0), c(-s, 0.0)]);
    let err = frobenius_distance(pctc_operator(&circ).matrix(), &p_expect);
    ensure(err < 1e-10, || format!("P error {err:e}"))?;
    for (input, output) in [("|+⟩", "|0⟩"), ("|1⟩", "|1⟩")] {
        let out = lift(pctc_evolve(&circ, &ket(input)?.projector()))?;
        let err = frobenius_distance(out.rho_f.matrix(), ket(output)?.projector().matrix());
        ensure(err < 1e-10, || format!("P-CTC {input}: error {err:e}"))?;
    }
    Ok("D-CTC and P-CTC maps exact".into())
}

fn ecm(_: Profile) -> Check {
    let circ = lift(catalog("ecm_counterexample"))?;
    let zero = ket("|0⟩")?.projector();
    let s = lift(consistency_channel(&circ, &zero))?;
    let traj = lift(iterate_channel(&s, &zero, 100, 1e-10))?;
    ensure(matches!(traj.verdict, IterationVerdict::Cycle { period: 2, .. }), || {
        format!("iteration verdict {:?}", traj.verdict)
    })?;
    let half = diag(&[0.5, 0.5]);
    let avg = lift(cesaro_mean(&s, &zero, 1e-10, 1 << 20))?;
    let e1 = frobenius_distance(avg.mean.matrix(), &half);
    ensure(avg.converged && e1 < 1e-9, || format!("Cesaro error {e1:e}"))?;
    let fps = lift(fixed_point_set(&s))?;
    let e2 = frobenius_distance(fps.representative().matrix(), &half);
    ensure(fps.subspace_dim() == 1 && e2 < 1e-9, || {
        format!("eigen-solver: dim {}, error {e2:e}", fps.subspace_dim())
    })?;
    Ok(format!("cycle(2); Cesaro {e1:.1e} after {} terms; eigen {e2:.1e}", avg.terms))
}

fn noise_uniqueness(_: Profile) -> Check {
    let circ = lift(catalog("unproven_theorem"))?;
    let s = lift(consistency_channel(&circ, &ket("|00⟩")?.projector()))?;
    let mut worst: f64 = 0.0;
    for p in [0.5, 0.1, 1e-3, 1e-7] {
        let tau = lift(noisy_fixed_point(&s, p))?;
        let err = frobenius_distance(tau.matrix(), &diag(&[0.5, 0.5]));
        ensure(err < 1e-8, || format!("p = {p}: error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("worst error {worst:.1e}"))
}

fn paradox(_: Profile) -> Check {
    let circ = lift(catalog("traceless_paradox"))?;
    for k in ["|0⟩", "|1⟩"] {
        match pctc_evolve(&circ, &ket(k)?.projector()) {
            Err(Error::Paradox { .. }) => {}
            other => return Err(format!("{k}: expected a paradox, got {other:?}")),
        }
    }
    let chi = DensityOperator::maximally_mixed(8);
    let rho = ket("|0⟩")?.projector();
    let a = lift(pctc_evolve_noisy(&circ, &rho, &chi, 1e-3))?;
    let b = lift(pctc_evolve_noisy(&circ, &rho, &chi, 1e-6))?;
    let d = trace_distance(&a.rho_f, &b.rho_f);
    ensure(d < 1e-9, || format!("eps dependence {d:e}"))?;
    Ok(format!("paradox flagged; eps dependence {d:.1e}"))
}

fn moments(profile: Profile) -> Check {
    let n = profile.samples();
    let mut notes = Vec::new();
    for d in [2usize, 4] {
        let m = lift(moment_integrals(d, n, 8 + d as u64))?;
        ensure(m.ratio.agrees_with(2.0, 5.0), || format!("d={d}: ratio {:?}", m.ratio))?;
        ensure(m.mixed.agrees_with(0.0, 5.0), || format!("d={d}: mixed {:?}", m.mixed))?;
        let (g2, g4) = lift(sampler_moments(d, n, 100 + d as u64, Sampler::Gaussian))?;
        let (h2, h4) = lift(sampler_moments(d, n, 200 + d as u64, Sampler::Hurwitz))?;
        ensure(g2.agrees_with_estimate(&h2, 5.0) && g4.agrees_with_estimate(&h4, 5.0), || {
            format!("d={d}: samplers disagree {g2:?} {h2:?} {g4:?} {h4:?}")
        })?;
        notes.push(format!("d={d}: ratio {:.4} ± {:.4}", m.ratio.mean, m.ratio.std_error));
    }
    Ok(notes.join("; "))
}

fn oracles(profile: Profile) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut circuits: Vec<_> = CATALOG_NAMES.iter().map(|n| catalog(n)).collect::<Result<_>>().map_err(|e| e.to_string())?;
    let catalog_len = circuits.len();
    for _ in 0..50 {
        let (n, m) = (rng.random_range(1..=2), rng.random_range(1..=2));
        circuits.push(haar_circuit(n, m, &mut rng));
    }
    let mut worst: f64 = 0.0;
    for circ in &circuits {
        let rho = haar_state(circ.cr_dim(), &mut rng).projector();
        match (pctc_evolve(circ, &rho), pctc_protocol_oracle(circ, &rho)) {
            (Ok(a), Ok(b)) => worst = worst.max(trace_distance(&a.rho_f, &b.rho_f)),
            (Err(Error::Paradox { .. }), Err(Error::Paradox { .. })) => {}
            (a, b) => return Err(format!("P-CTC oracle disagreement: {a:?} vs {b:?}")),
        }
    }
    ensure(worst < 1e-10, || format!("P-CTC oracle distance {worst:e}"))?;

    let mut tctc_cases: Vec<(usize, PureState)> = Vec::new();
    for (i, circ) in circuits.iter().enumerate().take(catalog_len) {
        tctc_cases.push((i, PureState::basis(circ.cr_dim(), 0)));
    }
    for i in catalog_len..catalog_len + 20 {
        tctc_cases.push((i, haar_state(circuits[i].cr_dim(), &mut rng)));
    }
    let mut worst_ratio: f64 = 0.0;
    for (k, (i, psi)) in tctc_cases.iter().enumerate() {
        let exact = lift(tctc_evolve(&circuits[*i], psi))?;
        let est = lift(tctc_evolve_mc(&circuits[*i], psi, profile.samples(), 500 + k as u64))?;
        let ratio = (&est.mean - exact.rho_f.matrix()).norm() / est.std_error;
        ensure(est.agrees_with(exact.rho_f.matrix(), 5.0), || format!("T-CTC case {k}: {ratio:.2} std errors"))?;
        worst_ratio = worst_ratio.max(ratio);
    }
    Ok(format!(
        "P-CTC oracle {worst:.1e} over {} circuits; T-CTC MC worst {worst_ratio:.2} se over {} cases",
        circuits.len(),
        tctc_cases.len()
    ))
}

fn audit(_: Profile) -> Check {
    let report = lift(bound_audit(500, 1, 1, 10))?;
    ensure(report.violations() == 0, || format!("{report:?}"))?;
    Ok(format!(
        "0 violations; min margins: norm {:.3}, lambda {:.3}, F {:.3}, D {:.3}",
        report.norm_bound.min_margin,
        report.lambda_bound.min_margin,
        report.fidelity_bound.min_margin,
        report.distance_bound.min_margin
    ))
}

fn reduction(_: Profile) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (n, m) = (rng.random_range(1..=2), rng.random_range(1..=2));
        let v = haar_unitary(1 << n, &mut rng);
        let w = haar_unitary(1 << m, &mut rng);
        let circ = lift(product_circuit(&v, &w))?;
        let rho = random_density(1 << n, &mut rng);
        let expect = rho.conjugate(v.matrix());
        let outs = [
            lift(dctc_evolve(&circ, &rho, DctcRule::MaxEntropy))?.rho_f,
            lift(pctc_evolve(&circ, &rho))?.rho_f,
            lift(tctc_evolve_mixed(&circ, &rho))?.rho_f,
        ];
        for out in &outs {
            worst = worst.max(frobenius_distance(out.matrix(), expect.matrix()));
        }
    }
    ensure(worst < 1e-9, || format!("worst error {worst:e}"))?;
    // A traceless CV factor must surface as a paradox, never as a silent wrong answer.
    let x = lift(UnitaryMatrix::new(GateName::X.matrix().expect("fixed gate")))?;
    let circ = lift(product_circuit(&haar_unitary(2, &mut rng), &x))?;
    match pctc_evolve(&circ, &random_density(2, &mut rng)) {
        Err(Error::Paradox { .. }) => {}
        other => return Err(format!("traceless W not flagged: {other:?}")),
    }
    Ok(format!("worst error {worst:.1e}; traceless W flagged"))
}
