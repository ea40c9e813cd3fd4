//! Validated density matrices and the von Neumann entropy.

use num_complex::Complex64;

use crate::eig::{hermitian_eig, DEFAULT_RANK_TOL};
use crate::error::Error;
use crate::linalg::{is_hermitian, kron, trace, validate_finite, CMat, CVec};
use crate::Result;

/// Validation tolerances for Hermiticity, trace, and positivity.
///
/// `psd` is scaled internally by max(1, ‖·‖₂); exact pipelines keep the
/// defaults, shot-sampled inference overrides `psd`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            trace: 1e-9,
            psd: 1e-9,
        }
    }
}

/// A Hermitian, unit-trace, positive-semidefinite matrix together with the
/// subsystem dimensions of its tensor factorization.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates and wraps a matrix with the default tolerances.
    pub fn new(matrix: CMat, dims: Vec<usize>) -> Result<Self> {
        Self::with_tolerances(matrix, dims, &Tolerances::default())
    }

    /// Validates Hermiticity, unit trace, and min eigenvalue ≥ −tol_psd.
    pub fn with_tolerances(matrix: CMat, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        let d: usize = dims.iter().product();
        if d == 0 || matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "density matrix: dims {:?} do not match a {}×{} matrix",
                dims,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        validate_finite(&matrix)?;
        if !is_hermitian(&matrix, tol.herm) {
            return Err(Error::InvalidData(
                "density matrix: not Hermitian within tolerance".into(),
            ));
        }
        let tr = trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidData(format!(
                "density matrix: trace {} is not 1 within tolerance",
                tr.re
            )));
        }
        let (vals, _) = hermitian_eig(&matrix)?;
        let max_abs = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if vals[0] < -tol.psd * max_abs.max(1.0) {
            return Err(Error::InvalidData(format!(
                "density matrix: minimum eigenvalue {} below -tol_psd",
                vals[0]
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// |ψ⟩⟨ψ| from a (normalized) state vector.
    pub fn from_pure(ket: &CVec, dims: Vec<usize>) -> Result<Self> {
        let n2: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if n2 <= 0.0 {
            return Err(Error::InvalidArgument("pure state: zero vector".into()));
        }
        let d = ket.len();
        let mut m = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = ket[i] * ket[j].conj() / n2;
            }
        }
        Self::new(m, dims)
    }

    /// n-qubit |0…0⟩⟨0…0|.
    pub fn pure_zero(n: usize) -> Self {
        let d = 1usize << n;
        let mut m = CMat::zeros((d, d));
        m[[0, 0]] = Complex64::new(1.0, 0.0);
        Self {
            matrix: m,
            dims: vec![2; n],
        }
    }

    /// n-qubit maximally mixed state 1/2ⁿ.
    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let m = CMat::from_diag_elem(d, Complex64::new(1.0 / d as f64, 0.0));
        Self {
            matrix: m,
            dims: vec![2; n],
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Qubit count when the total dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let d = self.dim();
        if d.is_power_of_two() {
            Some(d.trailing_zeros() as usize)
        } else {
            None
        }
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix)?.0)
    }

    /// Number of eigenvalues above `rel_tol·λ_max`.
    pub fn rank(&self, rel_tol: f64) -> Result<usize> {
        let vals = self.eigenvalues()?;
        let max = vals.iter().fold(0.0f64, |m, &x| m.max(x));
        Ok(vals
            .iter()
            .filter(|&&x| x > rel_tol * max.max(f64::MIN_POSITIVE))
            .count())
    }

    pub fn is_full_rank(&self, rel_tol: f64) -> Result<bool> {
        Ok(self.rank(rel_tol)? == self.dim())
    }

    /// ρ ⊗ τ with concatenated dims.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// Purity Tr ρ².
    pub fn purity(&self) -> f64 {
        crate::linalg::trace_product(&self.matrix, &self.matrix).re
    }
}

/// Von Neumann entropy −Σ λ log₂ λ, with 0·log 0 = 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let vals = rho.eigenvalues()?;
    Ok(vals
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum())
}

/// Default relative rank cutoff re-exported for callers deciding full vs
/// projected extraction.
pub const RANK_TOL: f64 = DEFAULT_RANK_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;

    #[test]
    fn pure_and_mixed_entropies() {
        let zero = DensityMatrix::pure_zero(1);
        assert!(von_neumann_entropy(&zero).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
        let mixed2 = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_entropy_value() {
        let mut m = CMat::zeros((2, 2));
        m[[0, 0]] = Complex64::new(0.75, 0.0);
        m[[1, 1]] = Complex64::new(0.25, 0.0);
        let rho = DensityMatrix::new(m, vec![2]).unwrap();
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((von_neumann_entropy(&rho).unwrap() - expected).abs() < 1e-13);
        assert!((expected - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn validation_rejects_bad_states() {
        // wrong trace
        let m = identity(2);
        assert!(DensityMatrix::new(m, vec![2]).is_err());
        // negative eigenvalue
        let mut m = CMat::zeros((2, 2));
        m[[0, 0]] = Complex64::new(1.5, 0.0);
        m[[1, 1]] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m, vec![2]).is_err());
        // non-Hermitian
        let mut m = CMat::zeros((2, 2));
        m[[0, 0]] = Complex64::new(1.0, 0.0);
        m[[0, 1]] = Complex64::new(0.3, 0.0);
        assert!(DensityMatrix::new(m, vec![2]).is_err());
        // dims mismatch
        let m = CMat::from_diag_elem(2, Complex64::new(0.5, 0.0));
        assert!(DensityMatrix::new(m, vec![3]).is_err());
    }

    #[test]
    fn rank_and_purity() {
        let zero = DensityMatrix::pure_zero(2);
        assert_eq!(zero.rank(RANK_TOL).unwrap(), 1);
        assert!((zero.purity() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(mixed.rank(RANK_TOL).unwrap(), 4);
        assert!(mixed.is_full_rank(RANK_TOL).unwrap());
    }
}
