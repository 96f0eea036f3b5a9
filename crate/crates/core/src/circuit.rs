//! Standard-form circuits: `n` chronology-respecting (CR) qubits `0..n`, `m`
//! chronology-violating (CV) qubits `n..n+m`, and one interaction unitary built
//! from a gate list.
//!
//! Gates are listed in application order: the first gate acts first, so the
//! compiled unitary is `G_k ··· G_1`. Controlled gates list the control first.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{matrix_from_raw, matrix_to_raw, RawMatrix};
use crate::error::{Error, Result};
use crate::haar::haar_unitary;
use crate::qstate::{c, check_unitary, CMatrix, UnitaryMatrix, ONE, UNITARY_TOL, ZERO};

/// Default cap on `n + m` (and on `n + 2m` for the teleportation protocol).
pub const DEFAULT_MAX_QUBITS: usize = 10;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "CTC_SIM_MAX_QUBITS";

pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum GateName {
    X,
    Y,
    Z,
    H,
    S,
    T,
    CNOT,
    CZ,
    CH,
    SWAP,
    MATRIX,
}

impl GateName {
    pub const ALL: [GateName; 11] = [
        GateName::X,
        GateName::Y,
        GateName::Z,
        GateName::H,
        GateName::S,
        GateName::T,
        GateName::CNOT,
        GateName::CZ,
        GateName::CH,
        GateName::SWAP,
        GateName::MATRIX,
    ];

    /// Number of targets, or `None` for `MATRIX` (any arity).
    pub fn arity(self) -> Option<usize> {
        use GateName::*;
        match self {
            X | Y | Z | H | S | T => Some(1),
            CNOT | CZ | CH | SWAP => Some(2),
            MATRIX => None,
        }
    }

    /// Matrix of a named gate in the `(control, target)` basis order; `None` for `MATRIX`.
    pub fn matrix(self) -> Option<CMatrix> {
        use GateName::*;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hd = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let controlled = |g: &CMatrix| {
            let mut m = CMatrix::identity(4, 4);
            m.view_mut((2, 2), (2, 2)).copy_from(g);
            m
        };
        Some(match self {
            X => pauli_x(),
            Y => CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
            Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]),
            H => hd,
            S => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(0.0, 1.0)]),
            T => {
                let p = std::f64::consts::FRAC_PI_4;
                CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(p.cos(), p.sin())])
            }
            CNOT => controlled(&pauli_x()),
            CZ => controlled(&CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)])),
            CH => controlled(&hd),
            SWAP => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 2)] = ONE;
                m[(2, 1)] = ONE;
                m[(3, 3)] = ONE;
                m
            }
            MATRIX => return None,
        })
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateName::ALL
            .into_iter()
            .find(|g| g.to_string() == s)
            .ok_or_else(|| Error::parse("gate name", format!("unknown gate '{s}'")))
    }
}

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    name: GateName,
    targets: Vec<usize>,
    matrix: Option<CMatrix>,
}

impl GateSpec {
    pub fn named(name: GateName, targets: &[usize]) -> Result<Self> {
        if name == GateName::MATRIX {
            return Err(Error::InvalidParameter(
                "MATRIX gates need a payload; use GateSpec::matrix".into(),
            ));
        }
        Self::checked(name, targets.to_vec(), None)
    }

    pub fn matrix(targets: &[usize], matrix: CMatrix) -> Result<Self> {
        Self::checked(GateName::MATRIX, targets.to_vec(), Some(matrix))
    }

    fn checked(name: GateName, targets: Vec<usize>, matrix: Option<CMatrix>) -> Result<Self> {
        let fail = |msg: String| Err(Error::parse(format!("gate {name}"), msg));
        if targets.is_empty() {
            return fail("no targets".into());
        }
        if let Some(k) = name.arity() {
            if targets.len() != k {
                return fail(format!("expects {k} targets, got {}", targets.len()));
            }
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return fail(format!("repeated target {t}"));
            }
        }
        match (&matrix, name) {
            (Some(m), GateName::MATRIX) => {
                let dim = 1usize << targets.len();
                if m.nrows() != dim || m.ncols() != dim {
                    return fail(format!(
                        "payload is {}x{}, expected {dim}x{dim} for {} targets",
                        m.nrows(),
                        m.ncols(),
                        targets.len()
                    ));
                }
                if let Err(e) = check_unitary(m, UNITARY_TOL) {
                    return fail(format!("payload is not unitary: {e}"));
                }
            }
            (None, GateName::MATRIX) => return fail("MATRIX gate needs a 'matrix' payload".into()),
            (Some(_), _) => return fail("only MATRIX gates carry a 'matrix' payload".into()),
            (None, _) => {}
        }
        Ok(Self { name, targets, matrix })
    }

    pub fn name(&self) -> GateName {
        self.name
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn unitary(&self) -> CMatrix {
        match &self.matrix {
            Some(m) => m.clone(),
            None => self.name.matrix().expect("named gate has a matrix"),
        }
    }
}

/// `n` CR qubits, `m` CV qubits, and the gates of the interaction unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormCircuit {
    n: usize,
    m: usize,
    gates: Vec<GateSpec>,
}

impl StandardFormCircuit {
    pub fn new(n: usize, m: usize, gates: Vec<GateSpec>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::parse(
                "circuit",
                format!("need n >= 1 and m >= 1, got n = {n}, m = {m}"),
            ));
        }
        let cap = max_qubits();
        if n + m > cap {
            return Err(Error::parse(
                "circuit",
                format!("n + m = {} exceeds the qubit cap {cap} (set {MAX_QUBITS_ENV})", n + m),
            ));
        }
        for (i, g) in gates.iter().enumerate() {
            if let Some(t) = g.targets.iter().find(|&&t| t >= n + m) {
                return Err(Error::parse(
                    format!("gates[{i}]"),
                    format!("target {t} out of range for {} qubits", n + m),
                ));
            }
        }
        Ok(Self { n, m, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn num_qubits(&self) -> usize {
        self.n + self.m
    }

    /// Dimension of the CR register, `2^n`.
    pub fn cr_dim(&self) -> usize {
        1 << self.n
    }

    /// Dimension of the CV register, `2^m`.
    pub fn cv_dim(&self) -> usize {
        1 << self.m
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RawCircuit::from(self)).expect("circuit serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    n: usize,
    m: usize,
    gates: Vec<RawGate>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    name: String,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<RawMatrix>,
}

impl From<&StandardFormCircuit> for RawCircuit {
    fn from(c: &StandardFormCircuit) -> Self {
        RawCircuit {
            n: c.n,
            m: c.m,
            gates: c
                .gates
                .iter()
                .map(|g| RawGate {
                    name: g.name.to_string(),
                    targets: g.targets.clone(),
                    matrix: g.matrix.as_ref().map(matrix_to_raw),
                })
                .collect(),
        }
    }
}

/// Parses the JSON circuit format `{"n": .., "m": .., "gates": [{"name", "targets", "matrix"?}]}`.
pub fn parse_circuit(text: &str) -> Result<StandardFormCircuit> {
    let raw: RawCircuit = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })?;
    let mut gates = Vec::with_capacity(raw.gates.len());
    for (i, g) in raw.gates.into_iter().enumerate() {
        let at = |e: Error| match e {
            Error::Parse { message, .. } => Error::parse(format!("gates[{i}]"), message),
            other => other,
        };
        let name: GateName = g.name.parse().map_err(at)?;
        let matrix = g.matrix.as_ref().map(matrix_from_raw).transpose().map_err(at)?;
        gates.push(GateSpec::checked(name, g.targets, matrix).map_err(at)?);
    }
    StandardFormCircuit::new(raw.n, raw.m, gates)
}

/// Embeds `gate` (on `targets`, first target most significant) into `num_qubits` qubits.
pub fn embed_gate(gate: &CMatrix, targets: &[usize], num_qubits: usize) -> CMatrix {
    let mut out = CMatrix::identity(1 << num_qubits, 1 << num_qubits);
    apply_left(gate, targets, num_qubits, &mut out);
    out
}

/// Replaces `u` with `(G ⊗ 1) · u`, where `G` acts on `targets`.
fn apply_left(gate: &CMatrix, targets: &[usize], num_qubits: usize, u: &mut CMatrix) {
    let k = targets.len();
    let sub = 1usize << k;
    let masks: Vec<usize> = targets.iter().map(|&t| 1 << (num_qubits - 1 - t)).collect();
    let target_mask: usize = masks.iter().sum();
    let dim = 1usize << num_qubits;
    // Index of the basis state with target bits set from `s` on top of `base`.
    let spread = |base: usize, s: usize| {
        masks.iter().enumerate().fold(base, |acc, (i, &mask)| {
            if s & (1 << (k - 1 - i)) != 0 {
                acc | mask
            } else {
                acc
            }
        })
    };
    let mut gathered = vec![ZERO; sub];
    let mut idx = vec![0usize; sub];
    for col in 0..u.ncols() {
        for base in (0..dim).filter(|b| b & target_mask == 0) {
            for s in 0..sub {
                idx[s] = spread(base, s);
                gathered[s] = u[(idx[s], col)];
            }
            for r in 0..sub {
                u[(idx[r], col)] = (0..sub).map(|s| gate[(r, s)] * gathered[s]).sum();
            }
        }
    }
}

/// `U = G_k ··· G_1` with `G_1` the first listed gate.
pub fn compile_unitary(c: &StandardFormCircuit) -> UnitaryMatrix {
    let nq = c.num_qubits();
    let mut u = CMatrix::identity(1 << nq, 1 << nq);
    for g in &c.gates {
        apply_left(&g.unitary(), &g.targets, nq, &mut u);
    }
    UnitaryMatrix::new(u).expect("product of unitary gates is unitary")
}

pub const CATALOG_NAMES: [&str; 5] = [
    "unproven_theorem",
    "distinguishing",
    "swap",
    "traceless_paradox",
    "ecm_counterexample",
];

/// Built-in circuits.
///
/// * `unproven_theorem`: book `B` = 0, mathematician `M` = 1 (CR), time traveller `T` = 2 (CV);
///   `U = SWAP_MT · CNOT_BM · CNOT_TB`.
/// * `distinguishing`: `U = CH_{CR,CV} · SWAP`.
/// * `swap`: `U = SWAP`.
/// * `traceless_paradox`: `U = 1 ⊗ X`.
/// * `ecm_counterexample`: the standard form `U = SWAP · V` of the equivalent-circuit
///   unitary `V = (X ⊗ 1) · CNOT · SWAP` (see [`ecm_equivalent_unitary`]).
pub fn catalog(name: &str) -> Result<StandardFormCircuit> {
    use GateName::*;
    let g = |name, t: &[usize]| GateSpec::named(name, t).expect("catalog gate is valid");
    let (n, m, gates) = match name {
        "unproven_theorem" => (2, 1, vec![g(CNOT, &[2, 0]), g(CNOT, &[0, 1]), g(SWAP, &[1, 2])]),
        "distinguishing" => (1, 1, vec![g(SWAP, &[0, 1]), g(CH, &[0, 1])]),
        "swap" => (1, 1, vec![g(SWAP, &[0, 1])]),
        "traceless_paradox" => (1, 1, vec![g(X, &[1])]),
        "ecm_counterexample" => (
            1,
            1,
            vec![g(SWAP, &[0, 1]), g(CNOT, &[0, 1]), g(X, &[0]), g(SWAP, &[0, 1])],
        ),
        other => {
            return Err(Error::UnknownCircuit {
                name: other.to_string(),
                valid: CATALOG_NAMES.join(", "),
            })
        }
    };
    StandardFormCircuit::new(n, m, gates)
}

/// `V = (X₁ ⊗ 1₂) · CNOT₁,₂ · SWAP` on (upper, lower) = (CR input, CV input) as used
/// by the unwrapped equivalent-circuit ladder.
pub fn ecm_equivalent_unitary() -> UnitaryMatrix {
    use GateName::*;
    let v = StandardFormCircuit::new(
        1,
        1,
        vec![
            GateSpec::named(SWAP, &[0, 1]).unwrap(),
            GateSpec::named(CNOT, &[0, 1]).unwrap(),
            GateSpec::named(X, &[0]).unwrap(),
        ],
    )
    .unwrap();
    compile_unitary(&v)
}

/// Random circuit of up to `max_gates` named gates on `n + m` qubits.
pub fn random_gate_circuit<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    max_gates: usize,
    rng: &mut R,
) -> StandardFormCircuit {
    let nq = n + m;
    let names: Vec<GateName> = GateName::ALL
        .into_iter()
        .filter(|g| g.arity().is_some_and(|k| k <= nq))
        .collect();
    let count = rng.random_range(0..=max_gates);
    let gates = (0..count)
        .map(|_| {
            let name = names[rng.random_range(0..names.len())];
            let k = name.arity().unwrap();
            let mut targets: Vec<usize> = Vec::with_capacity(k);
            while targets.len() < k {
                let t = rng.random_range(0..nq);
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            GateSpec::named(name, &targets).unwrap()
        })
        .collect();
    StandardFormCircuit::new(n, m, gates).unwrap()
}

/// Circuit whose interaction is a single Haar-random unitary on all `n + m` qubits.
pub fn haar_circuit<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> StandardFormCircuit {
    unitary_circuit(n, m, &haar_unitary(1 << (n + m), rng)).unwrap()
}

/// Circuit consisting of the single gate `u` on all `n + m` qubits.
pub fn unitary_circuit(n: usize, m: usize, u: &UnitaryMatrix) -> Result<StandardFormCircuit> {
    let all: Vec<usize> = (0..n + m).collect();
    StandardFormCircuit::new(n, m, vec![GateSpec::matrix(&all, u.matrix().clone())?])
}

/// Circuit with `U = V ⊗ W`: `V` on the CR qubits and `W` on the CV qubits.
pub fn product_circuit(v: &UnitaryMatrix, w: &UnitaryMatrix) -> Result<StandardFormCircuit> {
    let n = v.dim().trailing_zeros() as usize;
    let m = w.dim().trailing_zeros() as usize;
    if 1 << n != v.dim() || 1 << m != w.dim() {
        return Err(Error::dim("product circuit factors must act on whole qubits"));
    }
    let cr: Vec<usize> = (0..n).collect();
    let cv: Vec<usize> = (n..n + m).collect();
    StandardFormCircuit::new(
        n,
        m,
        vec![
            GateSpec::matrix(&cr, v.matrix().clone())?,
            GateSpec::matrix(&cv, w.matrix().clone())?,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{frobenius_distance, tensor_product};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gate(name: GateName) -> CMatrix {
        name.matrix().unwrap()
    }

    #[test]
    fn parses_swap_circuit() {
        let c = parse_circuit(r#"{"n":1,"m":1,"gates":[{"name":"SWAP","targets":[0,1]}]}"#).unwrap();
        assert_eq!((c.n(), c.m()), (1, 1));
        assert_eq!(c.gates()[0].name(), GateName::SWAP);
    }

    #[test]
    fn parses_unproven_theorem_and_matches_catalog() {
        let text = r#"{"n":2,"m":1,"gates":[{"name":"CNOT","targets":[2,0]},{"name":"CNOT","targets":[0,1]},{"name":"SWAP","targets":[1,2]}]}"#;
        let c = parse_circuit(text).unwrap();
        assert_eq!(c, catalog("unproven_theorem").unwrap());
    }

    #[test]
    fn duplicate_field_is_parse_error() {
        let text = r#"{"n":1,"m":1,"gates":[{"name":"CNOT","targets":[0,1],"targets":[3]}]}"#;
        match parse_circuit(text) {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 1")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_gates() {
        let cases = [
            r#"{"n":1,"m":1,"gates":[{"name":"FOO","targets":[0]}]}"#,
            r#"{"n":1,"m":1,"gates":[{"name":"CNOT","targets":[0]}]}"#,
            r#"{"n":1,"m":1,"gates":[{"name":"CNOT","targets":[0,0]}]}"#,
            r#"{"n":1,"m":1,"gates":[{"name":"X","targets":[2]}]}"#,
            r#"{"n":1,"m":1,"gates":[{"name":"MATRIX","targets":[0]}]}"#,
            r#"{"n":1,"m":1,"gates":[{"name":"MATRIX","targets":[0],"matrix":[[[1,0],[1,0]],[[0,0],[1,0]]]}]}"#,
            r#"{"n":1,"m":1,"gates":[{"name":"X","targets":[0],"matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]}]}"#,
            r#"{"n":0,"m":1,"gates":[]}"#,
            r#"{"n":1,"m":0,"gates":[]}"#,
            r#"{"n":6,"m":6,"gates":[]}"#,
            r#"{"n":1,"m":1}"#,
        ];
        for text in cases {
            assert!(matches!(parse_circuit(text), Err(Error::Parse { .. })), "{text}");
        }
    }

    #[test]
    fn gate_location_reported() {
        let text = r#"{"n":1,"m":1,"gates":[{"name":"X","targets":[0]},{"name":"CZ","targets":[1]}]}"#;
        match parse_circuit(text) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "gates[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matrix_gate_roundtrips_through_json() {
        let y = gate(GateName::Y);
        let c = StandardFormCircuit::new(1, 1, vec![GateSpec::matrix(&[1], y).unwrap()]).unwrap();
        let text = c.to_json().to_string();
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = StandardFormCircuit::new(2, 1, vec![]).unwrap();
        assert_eq!(compile_unitary(&c).matrix(), &CMatrix::identity(8, 8));
    }

    #[test]
    fn unproven_theorem_unitary_is_swap_cnot_cnot() {
        // Independent construction by explicit basis permutation on |B M T⟩:
        // CNOT_TB: B ^= T; CNOT_BM: M ^= B; SWAP_MT.
        let mut expect = CMatrix::zeros(8, 8);
        for idx in 0..8usize {
            let (mut b, mut m, mut t) = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
            b ^= t;
            m ^= b;
            std::mem::swap(&mut m, &mut t);
            expect[((b << 2) | (m << 1) | t, idx)] = ONE;
        }
        let u = compile_unitary(&catalog("unproven_theorem").unwrap());
        assert_eq!(u.matrix(), &expect);
    }

    #[test]
    fn distinguishing_unitary_is_ch_times_swap() {
        let u = compile_unitary(&catalog("distinguishing").unwrap());
        let expect = gate(GateName::CH) * gate(GateName::SWAP);
        assert!(frobenius_distance(u.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn control_listed_first() {
        // CNOT with targets [1, 0]: control qubit 1, target qubit 0 maps |01⟩ → |11⟩.
        let u = embed_gate(&gate(GateName::CNOT), &[1, 0], 2);
        assert_eq!(u[(3, 1)], ONE);
        assert_eq!(u[(1, 1)], ZERO);
    }

    #[test]
    fn single_qubit_embedding_is_kronecker() {
        let h = gate(GateName::H);
        let i2 = CMatrix::identity(2, 2);
        let e = embed_gate(&h, &[1], 3);
        let expect = tensor_product(&tensor_product(&i2, &h), &i2);
        assert!(frobenius_distance(&e, &expect) < 1e-15);
    }

    #[test]
    fn catalog_contents() {
        for name in CATALOG_NAMES {
            let c = catalog(name).unwrap();
            compile_unitary(&c);
        }
        assert_eq!(catalog("swap").unwrap().gates().len(), 1);
        match catalog("nonsense") {
            Err(Error::UnknownCircuit { valid, .. }) => assert!(valid.contains("unproven_theorem")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ecm_standard_form_is_swap_times_v() {
        let swap = gate(GateName::SWAP);
        let u = compile_unitary(&catalog("ecm_counterexample").unwrap());
        let v = ecm_equivalent_unitary();
        assert!(frobenius_distance(u.matrix(), &(swap * v.matrix())) < 1e-15);
    }

    #[test]
    fn random_circuits_compile_to_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(1..=2);
            let m = rng.random_range(1..=2);
            let c = random_gate_circuit(n, m, 8, &mut rng);
            let u = compile_unitary(&c);
            let err = (u.matrix().adjoint() * u.matrix() - CMatrix::identity(u.dim(), u.dim())).norm();
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn disjoint_gates_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = haar_unitary(2, &mut rng).matrix().clone();
            let b = haar_unitary(2, &mut rng).matrix().clone();
            let ab = StandardFormCircuit::new(
                1,
                1,
                vec![GateSpec::matrix(&[0], a.clone()).unwrap(), GateSpec::matrix(&[1], b.clone()).unwrap()],
            )
            .unwrap();
            let ba = StandardFormCircuit::new(
                1,
                1,
                vec![GateSpec::matrix(&[1], b).unwrap(), GateSpec::matrix(&[0], a).unwrap()],
            )
            .unwrap();
            assert!(frobenius_distance(compile_unitary(&ab).matrix(), compile_unitary(&ba).matrix()) < 1e-12);
        }
    }
}
