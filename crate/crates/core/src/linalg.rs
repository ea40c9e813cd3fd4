//! Dense complex matrix plumbing: Kronecker products, partial trace and
//! partial transpose over listed subsystem dimensions, row-major
//! vectorization, swap operators, and the JSON wire form for matrices.
//!
//! Vectorization is row-major, `|O⟩⟩[i·d + j] = O[i,j]`, so the
//! multiplication identity reads `vec(BCD) = (B ⊗ Dᵀ) vec(C)`. Under this
//! convention the PDM closed form vectorizes verbatim to
//! `A = ½(σ̃ ⊗ 1 + 1 ⊗ σ̃ᵀ)`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Dense complex matrix, row-major.
pub type CMat = Array2<Complex64>;
/// Dense complex vector.
pub type CVec = Array1<Complex64>;

pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// d×d identity matrix.
pub fn identity(d: usize) -> CMat {
    CMat::from_diag_elem(d, ONE)
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Trace.
pub fn trace(m: &CMat) -> Complex64 {
    m.diag().sum()
}

/// Tr[A·B] without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[[i, j]] * b[[j, i]];
        }
    }
    acc
}

/// Frobenius norm.
pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius distance ‖A − B‖_F.
pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Largest entrywise deviation |A_ij − B_ij|.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Whether ‖M − M†‖_F ≤ tol·max(1, ‖M‖_F).
pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let mut dev2 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev2 += (m[[i, j]] - m[[j, i]].conj()).norm_sqr();
        }
    }
    dev2.sqrt() <= tol * frobenius_norm(m).max(1.0)
}

/// (M + M†)/2.
pub fn hermitize(m: &CMat) -> CMat {
    let half = Complex64::new(0.5, 0.0);
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[[i, j]] = (m[[i, j]] + m[[j, i]].conj()) * half;
        }
    }
    out
}

/// ½(AB + BA).
pub fn anticommutator_half(a: &CMat, b: &CMat) -> CMat {
    let half = Complex64::new(0.5, 0.0);
    (a.dot(b) + b.dot(a)).mapv(|z| z * half)
}

/// Rejects matrices with NaN or infinite entries.
pub fn validate_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidData("matrix has non-finite entries".into()))
    }
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

/// Partial trace over the subsystems *not* listed in `keep`.
///
/// `dims` lists the subsystem dimensions of a row-major tensor factorization;
/// `keep` are the (distinct) subsystem indices retained, in their original
/// order.
pub fn partial_trace(o: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if o.nrows() != total || o.ncols() != total {
        return Err(Error::InvalidArgument(format!(
            "partial_trace: dims product {} does not match matrix dimension {}",
            total,
            o.nrows()
        )));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(
            "partial_trace: keep index out of range".into(),
        ));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();

    // Row-major strides of each subsystem inside the composite index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let offsets = |subs: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &s in subs {
            let mut next = Vec::with_capacity(offs.len() * dims[s]);
            for &base in &offs {
                for v in 0..dims[s] {
                    next.push(base + v * strides[s]);
                }
            }
            offs = next;
        }
        offs
    };
    let keep_offs = offsets(&keep);
    let traced_offs = offsets(&traced);

    let dk = keep_offs.len();
    let mut out = CMat::zeros((dk, dk));
    for (a, &ka) in keep_offs.iter().enumerate() {
        for (b, &kb) in keep_offs.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_offs {
                acc += o[[ka + t, kb + t]];
            }
            out[[a, b]] = acc;
        }
    }
    Ok(out)
}

/// Transpose the indices of one subsystem only.
pub fn partial_transpose(o: &CMat, dims: &[usize], subsystem: usize) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if o.nrows() != total || o.ncols() != total {
        return Err(Error::InvalidArgument(format!(
            "partial_transpose: dims product {} does not match matrix dimension {}",
            total,
            o.nrows()
        )));
    }
    if subsystem >= dims.len() {
        return Err(Error::InvalidArgument(
            "partial_transpose: subsystem index out of range".into(),
        ));
    }
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let ds = dims[subsystem];
    let ss = strides[subsystem];

    let mut out = CMat::zeros((total, total));
    for r in 0..total {
        let rs = (r / ss) % ds;
        for c in 0..total {
            let cs = (c / ss) % ds;
            // swap the subsystem digit between row and column
            let r2 = r - rs * ss + cs * ss;
            let c2 = c - cs * ss + rs * ss;
            out[[r2, c2]] = o[[r, c]];
        }
    }
    Ok(out)
}

/// Row-major vectorization of a square operator.
#[derive(Debug, Clone)]
pub struct VectorizedOperator {
    pub data: CVec,
    pub dim: usize,
}

/// |O⟩⟩ with O_{ij} at position i·d + j.
pub fn vectorize(o: &CMat) -> VectorizedOperator {
    debug_assert_eq!(o.nrows(), o.ncols());
    let d = o.nrows();
    let data = CVec::from_iter(o.iter().cloned());
    VectorizedOperator { data, dim: d }
}

/// Inverse of [`vectorize`]; exact round trip.
pub fn devectorize(v: &VectorizedOperator) -> CMat {
    CMat::from_shape_vec((v.dim, v.dim), v.data.to_vec()).expect("consistent shape")
}

/// Swap operator Σ |ij⟩⟨ji| on two d-dimensional slots.
pub fn swap_matrix(d: usize) -> CMat {
    let mut s = CMat::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            s[[i * d + j, j * d + i]] = ONE;
        }
    }
    s
}

/// n-qubit swap operator (4ⁿ×4ⁿ).
pub fn swap_operator(n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "swap_operator: n must be ≥ 1".into(),
        ));
    }
    Ok(swap_matrix(1 << n))
}

/// S·O·S† as an exact index permutation (no floating-point arithmetic).
pub fn swap_conjugate(o: &CMat, d: usize) -> CMat {
    debug_assert_eq!(o.nrows(), d * d);
    let mut out = CMat::zeros((d * d, d * d));
    for r in 0..d * d {
        let (r1, r2) = (r / d, r % d);
        for c in 0..d * d {
            let (c1, c2) = (c / d, c % d);
            out[[r2 * d + r1, c2 * d + c1]] = o[[r, c]];
        }
    }
    out
}

/// JSON wire form of a complex matrix: row-major real and imaginary parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            re: m.iter().map(|z| z.re).collect(),
            im: m.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let len = self.rows * self.cols;
        if self.re.len() != len || self.im.len() != len {
            return Err(Error::InvalidData(format!(
                "matrix payload length mismatch: expected {} entries, got re={} im={}",
                len,
                self.re.len(),
                self.im.len()
            )));
        }
        let data: Vec<Complex64> = self
            .re
            .iter()
            .zip(self.im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let m = CMat::from_shape_vec((self.rows, self.cols), data)
            .map_err(|e| Error::InvalidData(format!("matrix shape: {e}")))?;
        validate_finite(&m)?;
        Ok(m)
    }
}
