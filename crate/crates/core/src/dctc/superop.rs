use crate::error::{Error, Result};
use crate::qstate::{
    c, hermitian_part, tensor_product, unvectorize, vectorize, CMatrix, CVector, UnitaryMatrix,
};

/// Matrix of a linear map on `d×d` operators, acting on column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

/// Tolerance for the trace- and Hermiticity-preservation checks.
pub const SUPEROP_TOL: f64 = 1e-9;

impl Superoperator {
    /// Wraps a `d²×d²` matrix after checking that the map preserves trace and Hermiticity.
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        let s = Self::unchecked(dim, matrix)?;
        s.check_trace_preserving()?;
        s.check_hermiticity_preserving()?;
        Ok(s)
    }

    pub(crate) fn unchecked(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::dim(format!(
                "superoperator on {dim}x{dim} operators must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    /// `X ↦ Σ_k K_k X K_k†` assembled as `Σ_k conj(K_k) ⊗ K_k`.
    pub fn from_kraus(dim: usize, kraus: &[CMatrix]) -> Result<Self> {
        let mut m = CMatrix::zeros(dim * dim, dim * dim);
        for k in kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::dim("Kraus operator has the wrong shape"));
            }
            m += tensor_product(&k.conjugate(), k);
        }
        Self::new(dim, m)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    /// `X ↦ W X W†`.
    pub fn unitary_conjugation(w: &UnitaryMatrix) -> Self {
        Self::from_kraus(w.dim(), std::slice::from_ref(w.matrix()))
            .expect("unitary conjugation is CPTP")
    }

    /// `X ↦ p Tr(X) 1/d + (1 − p) X`.
    pub fn depolarizing(dim: usize, p: f64) -> Self {
        let id = vectorize(&CMatrix::identity(dim, dim));
        let tr_row = id.adjoint();
        let m = CMatrix::identity(dim * dim, dim * dim).scale(1.0 - p)
            + (&id * tr_row).scale(p / dim as f64);
        Self { dim, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(x)), self.dim)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, other.dim);
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `vec(1)† S = vec(1)†`.
    pub fn check_trace_preserving(&self) -> Result<()> {
        let id = vectorize(&CMatrix::identity(self.dim, self.dim));
        let err = (id.adjoint() * &self.matrix - id.adjoint()).norm();
        if err > SUPEROP_TOL {
            return Err(Error::Validation {
                invariant: "trace preserving",
                detail: format!("||vec(1)^dag S - vec(1)^dag|| = {err:e}"),
            });
        }
        Ok(())
    }

    /// Checks that every Hermitian basis operator maps to a Hermitian operator.
    pub fn check_hermiticity_preserving(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in i..d {
                let mut probes = Vec::with_capacity(2);
                let mut re = CMatrix::zeros(d, d);
                re[(i, j)] = c(1.0, 0.0);
                re[(j, i)] = c(1.0, 0.0);
                probes.push(re);
                if i != j {
                    let mut im = CMatrix::zeros(d, d);
                    im[(i, j)] = c(0.0, -1.0);
                    im[(j, i)] = c(0.0, 1.0);
                    probes.push(im);
                }
                for x in probes {
                    let y = self.apply(&x);
                    let err = (&y - y.adjoint()).norm();
                    if err > SUPEROP_TOL {
                        return Err(Error::Validation {
                            invariant: "Hermiticity preserving",
                            detail: format!("image of a Hermitian probe has ||Y - Y^dag|| = {err:e}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the map and symmetrizes the result.
    pub(crate) fn apply_hermitian(&self, x: &CMatrix) -> CMatrix {
        hermitian_part(&self.apply(x))
    }

    pub(crate) fn apply_vec(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{haar_unitary, random_density};
    use crate::qstate::{frobenius_distance, trace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_conjugation_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = haar_unitary(3, &mut rng);
        let s = Superoperator::unitary_conjugation(&w);
        let rho = random_density(3, &mut rng);
        let direct = w.matrix() * rho.matrix() * w.matrix().adjoint();
        assert!(frobenius_distance(&s.apply(rho.matrix()), &direct) < 1e-12);
    }

    #[test]
    fn depolarizing_is_cptp() {
        let s = Superoperator::depolarizing(4, 0.3);
        assert!(s.check_trace_preserving().is_ok());
        assert!(s.check_hermiticity_preserving().is_ok());
        let out = s.apply(&CMatrix::identity(4, 4).scale(0.25));
        assert!((trace(&out).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let m = CMatrix::identity(4, 4).scale(2.0);
        assert!(matches!(
            Superoperator::new(2, m),
            Err(Error::Validation { invariant: "trace preserving", .. })
        ));
    }

    #[test]
    fn rejects_non_hermiticity_preserving() {
        // X ↦ Tr(X)·|0⟩⟨1|-ish map scaled to keep trace: X ↦ Tr(X)(|0⟩⟨0| + i|0⟩⟨1|).
        let mut target = CMatrix::zeros(2, 2);
        target[(0, 0)] = c(1.0, 0.0);
        target[(0, 1)] = c(0.0, 1.0);
        let id = vectorize(&CMatrix::identity(2, 2));
        let m = vectorize(&target) * id.adjoint();
        assert!(matches!(
            Superoperator::new(2, m),
            Err(Error::Validation { invariant: "Hermiticity preserving", .. })
        ));
    }

    #[test]
    fn wrong_shape_rejected() {
        assert!(matches!(
            Superoperator::new(2, CMatrix::identity(3, 3)),
            Err(Error::Dimension(_))
        ));
    }
}
