//! Hermitian eigendecomposition and the solvers built on it.
//!
//! The eigensolver is a cyclic Jacobi iteration on the complex Hermitian
//! matrix. Each rotation zeroes one off-diagonal pair through a phased
//! Givens rotation; sweeps repeat until the off-diagonal Frobenius mass
//! drops below `1e-14·‖H‖_F`. This is unconditionally stable for Hermitian
//! input and accurate enough for every tolerance used downstream
//! (reconstruction residuals land near machine precision).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{dagger, frobenius_norm, hermitize, is_hermitian, CMat, CVec, ZERO};
use crate::state::Tolerances;
use crate::Result;

/// Relative singular/eigenvalue cutoff for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const JACOBI_REL_OFF: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching unitary matrix of
/// column eigenvectors, so `H V = V diag(λ)`. The input is validated against
/// `tol_herm` and symmetrized as (H + H†)/2 before iterating.
pub fn hermitian_eig(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    if h.nrows() != h.ncols() {
        return Err(Error::InvalidArgument(
            "hermitian_eig: matrix must be square".into(),
        ));
    }
    if !is_hermitian(h, Tolerances::default().herm) {
        return Err(Error::InvalidArgument(
            "hermitian_eig: matrix is not Hermitian within tolerance".into(),
        ));
    }
    let n = h.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("hermitian_eig: empty matrix".into()));
    }
    let mut a = hermitize(h);
    let mut v = crate::linalg::identity(n);

    let h_fro = frobenius_norm(&a).max(f64::MIN_POSITIVE);
    let target = JACOBI_REL_OFF * h_fro;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += a[[p, q]].norm_sqr();
            }
        }
        if (2.0 * off2).sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        // One last check; Jacobi converges quadratically, so this is unreachable
        // in practice for Hermitian input.
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += a[[p, q]].norm_sqr();
            }
        }
        if (2.0 * off2).sqrt() > target * 10.0 {
            return Err(Error::InvalidData(
                "hermitian_eig: Jacobi iteration failed to converge".into(),
            ));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| eigs[i].total_cmp(&eigs[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let mut vecs = CMat::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs[[r, dst]] = v[[r, src]];
        }
    }
    Ok((sorted, vecs))
}

/// One phased Jacobi rotation zeroing a[p,q] (and a[q,p]).
///
/// J is the identity with the 2×2 block [[c, s·φ], [−s·φ*, c]] at (p,q),
/// where φ is the phase of a[p,q]; the update is A ← J†AJ, V ← VJ.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[[p, q]];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.nrows();
    let phase = apq / r;
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let sp = phase * s;
    let spc = phase.conj() * s;
    // columns: A ← A·J
    for k in 0..n {
        let akp = a[[k, p]];
        let akq = a[[k, q]];
        a[[k, p]] = akp * c - akq * spc;
        a[[k, q]] = akp * sp + akq * c;
    }
    // rows: A ← J†·A
    for k in 0..n {
        let apk = a[[p, k]];
        let aqk = a[[q, k]];
        a[[p, k]] = apk * c - aqk * sp;
        a[[q, k]] = apk * spc + aqk * c;
    }
    a[[p, q]] = ZERO;
    a[[q, p]] = ZERO;
    a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);
    // eigenvectors: V ← V·J
    for k in 0..n {
        let vkp = v[[k, p]];
        let vkq = v[[k, q]];
        v[[k, p]] = vkp * c - vkq * spc;
        v[[k, q]] = vkp * sp + vkq * c;
    }
}

/// Moore–Penrose pseudoinverse.
///
/// Hermitian input goes through its eigendecomposition directly; general
/// input through the eigendecomposition of A†A. Spectral components below
/// `rank_tol · σ_max` are treated as zero.
pub fn pseudoinverse(a: &CMat, rank_tol: f64) -> Result<CMat> {
    if is_hermitian(a, Tolerances::default().herm) {
        let (vals, vecs) = hermitian_eig(a)?;
        let max = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let inv: Vec<Complex64> = vals
            .iter()
            .map(|&x| {
                if x.abs() > rank_tol * max.max(f64::MIN_POSITIVE) {
                    Complex64::new(1.0 / x, 0.0)
                } else {
                    ZERO
                }
            })
            .collect();
        return Ok(scaled_outer_sum(&vecs, &inv));
    }
    // General path via A†A = V Σ² V†, then A‡ = V Σ⁻¹ U† with U = A V Σ⁻¹.
    let ata = dagger(a).dot(a);
    let (vals, vecs) = hermitian_eig(&ata)?;
    let smax = vals.iter().fold(0.0f64, |m, &x| m.max(x.max(0.0))).sqrt();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut pinv = CMat::zeros((cols, rows));
    for (k, &l) in vals.iter().enumerate() {
        let sigma = l.max(0.0).sqrt();
        if sigma <= rank_tol * smax.max(f64::MIN_POSITIVE) {
            continue;
        }
        let vk: CVec = vecs.column(k).to_owned();
        let uk: CVec = a.dot(&vk).mapv(|z| z / sigma);
        for i in 0..cols {
            for j in 0..rows {
                pinv[[i, j]] += vk[i] * uk[j].conj() / sigma;
            }
        }
    }
    Ok(pinv)
}

/// V · diag(f) · V† for a unitary V and complex weights f.
fn scaled_outer_sum(vecs: &CMat, weights: &[Complex64]) -> CMat {
    let n = vecs.nrows();
    let mut scaled = vecs.clone();
    for (k, w) in weights.iter().enumerate() {
        for r in 0..n {
            scaled[[r, k]] *= *w;
        }
    }
    scaled.dot(&dagger(vecs))
}

/// Hermitian matrix function through the spectrum: V f(Λ) V†.
pub fn hermitian_fn(h: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eig(h)?;
    let weights: Vec<Complex64> = vals.iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
    Ok(scaled_outer_sum(&vecs, &weights))
}

/// √H for (near-)PSD Hermitian H; negative numerical dust is clamped to 0.
pub fn hermitian_sqrt(h: &CMat) -> Result<CMat> {
    hermitian_fn(h, |x| x.max(0.0).sqrt())
}

/// H^(-1/2) on its support; eigenvalues at or below `rank_tol·λ_max` give 0.
pub fn hermitian_inv_sqrt_psd(h: &CMat, rank_tol: f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eig(h)?;
    let max = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let weights: Vec<Complex64> = vals
        .iter()
        .map(|&x| {
            if x > rank_tol * max.max(f64::MIN_POSITIVE) {
                Complex64::new(1.0 / x.sqrt(), 0.0)
            } else {
                ZERO
            }
        })
        .collect();
    Ok(scaled_outer_sum(&vecs, &weights))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMat) -> Result<f64> {
    Ok(hermitian_eig(h)?.0[0])
}

/// Number of eigenvalues above `rel_tol · max|λ|`.
pub fn rank_hermitian(h: &CMat, rel_tol: f64) -> Result<usize> {
    let (vals, _) = hermitian_eig(h)?;
    let max = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    Ok(vals
        .iter()
        .filter(|&&x| x.abs() > rel_tol * max.max(f64::MIN_POSITIVE))
        .count())
}

/// F(O) = Tr(√(OO†) − O) = Σᵢ (|λᵢ| − λᵢ) for Hermitian O.
///
/// Twice the total magnitude of the negative spectrum; zero iff O is PSD
/// (up to tolerance).
pub fn negativity_functional(o: &CMat) -> Result<f64> {
    if !is_hermitian(o, Tolerances::default().herm) {
        return Err(Error::InvalidArgument(
            "negativity_functional: input must be Hermitian".into(),
        ));
    }
    let (vals, _) = hermitian_eig(o)?;
    Ok(vals.iter().map(|&x| x.abs() - x).sum())
}

/// Solves A x = b for Hermitian positive-definite A by Cholesky (A = L L†).
pub fn cholesky_solve(a: &CMat, b: &CVec) -> Result<CVec> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::InvalidArgument(
            "cholesky_solve: dimension mismatch".into(),
        ));
    }
    let mut l = Array2::<Complex64>::zeros((n, n));
    for j in 0..n {
        let mut diag = a[[j, j]].re;
        for k in 0..j {
            diag -= l[[j, k]].norm_sqr();
        }
        if diag <= 0.0 {
            return Err(Error::InvalidArgument(
                "cholesky_solve: matrix is not positive definite".into(),
            ));
        }
        let djj = diag.sqrt();
        l[[j, j]] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut acc = a[[i, j]];
            for k in 0..j {
                acc -= l[[i, k]] * l[[j, k]].conj();
            }
            l[[i, j]] = acc / djj;
        }
    }
    // forward: L y = b
    let mut y = b.clone();
    for i in 0..n {
        let mut acc = y[i];
        for k in 0..i {
            acc -= l[[i, k]] * y[k];
        }
        y[i] = acc / l[[i, i]];
    }
    // backward: L† x = y
    let mut x = y;
    for i in (0..n).rev() {
        let mut acc = x[i];
        for k in (i + 1)..n {
            acc -= l[[k, i]].conj() * x[k];
        }
        x[i] = acc / l[[i, i]];
    }
    Ok(x)
}
