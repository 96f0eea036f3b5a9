//! Dense complex linear algebra and the quantum-state types shared by every theory.
//!
//! Qubit ordering is big-endian throughout: qubit 0 is the most significant bit of a
//! basis index, and `A ⊗ B` places `A` on the leading qubits.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance used when a density operator is built from computed data.
pub const DENSITY_TOL: f64 = 1e-9;
/// Unitarity tolerance (Frobenius norm of `U†U − 1`).
pub const UNITARY_TOL: f64 = 1e-10;
/// Eigenvalues at or below this contribute nothing to the entropy.
pub const ENTROPY_FLOOR: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which factor of a bipartite operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Kronecker product; entry `((iA, iB), (jA, jB))` lives at `(iA·rows_B + iB, jA·cols_B + jB)`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Traces out one factor of an operator on `C^dA ⊗ C^dB`.
///
/// The operator need not be Hermitian; the CV trace of a unitary uses this too.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Keep) -> Result<CMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::dim(format!(
            "partial trace expects a {n}x{n} matrix for dims ({da}, {db}), got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Keep::First => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Keep::Second => CMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    })
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, k| {
        eig.eigenvectors[(r, order[k])]
    });
    (values, vectors)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vecs) = hermitian_eigen(m);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(f(v), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Column-stacking vectorization: `vec(X)[i + j·d] = X[i, j]`.
pub fn vectorize(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vectorize`] for a `d×d` operator.
pub fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    assert_eq!(v.len(), d * d, "vector length {} is not {d}^2", v.len());
    CMatrix::from_column_slice(d, d, v.as_slice())
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// A normalized state vector on `dim` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Wraps `amplitudes`, which must already have unit norm within 1e-12.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() {
            return Err(Error::Validation {
                invariant: "dimension",
                detail: "empty state vector".into(),
            });
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Validation {
                invariant: "unit norm",
                detail: format!("state norm is {norm}"),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `v`; fails only on the zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::Validation {
                invariant: "unit norm",
                detail: "cannot normalize a zero vector".into(),
            });
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Self { amplitudes: v }
    }

    /// Parses ket sugar such as `|0+⟩` or `|1-->`: one qubit per symbol in `{0, 1, +, -}`.
    pub fn from_ket(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::parse(format!("ket '{text}'"), msg.to_string());
        let t = text.trim();
        let inner = t
            .strip_prefix('|')
            .ok_or_else(|| bad("must start with '|'"))?;
        let inner = inner
            .strip_suffix('⟩')
            .or_else(|| inner.strip_suffix('>'))
            .ok_or_else(|| bad("must end with '⟩' or '>'"))?;
        if inner.is_empty() {
            return Err(bad("no qubit symbols"));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut state = CVector::from_element(1, ONE);
        for ch in inner.chars() {
            let q = match ch {
                '0' => CVector::from_vec(vec![ONE, ZERO]),
                '1' => CVector::from_vec(vec![ZERO, ONE]),
                '+' => CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]),
                '-' | '−' => CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]),
                other => return Err(bad(&format!("unsupported symbol '{other}'"))),
            };
            state = state.kronecker(&q);
        }
        Self::normalized(state)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator { matrix: m }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// Hermitian, unit-trace, positive semi-definite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates at [`DENSITY_TOL`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        validate_density(&matrix, DENSITY_TOL)
    }

    /// Normalizes a nonzero PSD operator by its trace, then validates it.
    pub fn from_unnormalized(matrix: CMatrix) -> Result<Self> {
        let tr = trace(&matrix).re;
        if !(tr.abs() > 1e-300) || !tr.is_finite() {
            return Err(Error::Validation {
                invariant: "trace",
                detail: format!("cannot normalize operator with trace {tr}"),
            });
        }
        validate_density(&matrix.unscale(tr), DENSITY_TOL)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: tensor_product(&self.matrix, &other.matrix),
        }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> DensityOperator {
        DensityOperator {
            matrix: hermitian_part(&(u * &self.matrix * u.adjoint())),
        }
    }
}

/// A square matrix with `U†U = 1` within [`UNITARY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_unitary(&matrix, UNITARY_TOL)?;
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn tensor(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix {
            matrix: tensor_product(&self.matrix, &other.matrix),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix {
            matrix: &self.matrix * &other.matrix,
        }
    }
}

pub(crate) fn check_unitary(m: &CMatrix, tol: f64) -> Result<()> {
    if !m.is_square() || m.is_empty() {
        return Err(Error::Validation {
            invariant: "unitary",
            detail: format!("matrix is {}x{}, not square", m.nrows(), m.ncols()),
        });
    }
    let n = m.nrows();
    let err = (m.adjoint() * m - CMatrix::identity(n, n)).norm();
    if !(err <= tol) {
        return Err(Error::Validation {
            invariant: "unitary",
            detail: format!("||U^dag U - 1||_F = {err:e}"),
        });
    }
    Ok(())
}

/// `S(ρ) = −Σ λ ln λ` in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > ENTROPY_FLOOR)
        .map(|l| -l * l.ln())
        .sum();
    s.max(0.0)
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)` (square-root convention, so pure states give `|⟨a|b⟩|`).
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    assert_eq!(rho.dim(), sigma.dim(), "fidelity of operators with unequal dims");
    let sqrt_rho = hermitian_fn(rho.matrix(), |l| l.max(0.0).sqrt());
    let inner = &sqrt_rho * sigma.matrix() * &sqrt_rho;
    let f: f64 = hermitian_eigen(&inner)
        .0
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    f.clamp(0.0, 1.0)
}

/// `½ Σ |μ_k|` over the eigenvalues of `ρ − σ`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    assert_eq!(
        rho.dim(),
        sigma.dim(),
        "trace distance of operators with unequal dims"
    );
    let diff = rho.matrix() - sigma.matrix();
    let d: f64 = hermitian_eigen(&diff).0.iter().map(|l| l.abs()).sum::<f64>() * 0.5;
    d.clamp(0.0, 1.0)
}

/// Checks the density-operator invariants at `tol`.
///
/// Eigenvalues in `(−tol, 0)` are floored to zero and the result renormalized.
pub fn validate_density(m: &CMatrix, tol: f64) -> Result<DensityOperator> {
    if !m.is_square() || m.is_empty() {
        return Err(Error::Validation {
            invariant: "square",
            detail: format!("matrix is {}x{}", m.nrows(), m.ncols()),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Validation {
            invariant: "finite",
            detail: "matrix has non-finite entries".into(),
        });
    }
    let n = m.nrows();
    let mut herm_err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            herm_err = herm_err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if herm_err > tol {
        return Err(Error::Validation {
            invariant: "Hermitian",
            detail: format!("max |M_ij - conj(M_ji)| = {herm_err:e}"),
        });
    }
    let tr = trace(m);
    if (tr - ONE).norm() > tol {
        return Err(Error::Validation {
            invariant: "unit trace",
            detail: format!("trace = {} + {}i", tr.re, tr.im),
        });
    }
    let h = hermitian_part(m);
    let (values, vecs) = hermitian_eigen(&h);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::Validation {
            invariant: "positive semi-definite",
            detail: format!("smallest eigenvalue {min:e}"),
        });
    }
    if min >= 0.0 {
        return Ok(DensityOperator { matrix: h });
    }
    let floored = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        values.iter().map(|&l| c(l.max(0.0), 0.0)),
    ));
    let rebuilt = &vecs * floored * vecs.adjoint();
    let tr = trace(&rebuilt).re;
    Ok(DensityOperator {
        matrix: hermitian_part(&rebuilt.unscale(tr)),
    })
}
