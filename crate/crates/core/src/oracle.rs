//! Brute-force reference implementations and seeded random instances.
//!
//! These exist to validate the fast paths and deliberately share no code
//! with them beyond `pauli` and the raw matrix arithmetic: correlators are
//! enumerated branch by branch with explicit Lüders updates and projectors
//! obtained from a numerical eigendecomposition of the observable (not from
//! the (1 ± σ)/2 shortcut), and PDMs are literal 16ⁿ-term sums.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channel::KrausChannel;
use crate::eig::hermitian_eig;
use crate::error::Error;
use crate::linalg::{dagger, identity, kron, trace_product, CMat};
use crate::pauli::{enumerate_basis, pauli_matrix, PauliLabel};
use crate::pdm::{Orientation, Pdm};
use crate::state::{DensityMatrix, Tolerances};
use crate::Result;

/// ±1 eigenspace projectors built by eigendecomposing the dense observable.
fn projectors_by_eig(label: &PauliLabel) -> Result<(CMat, CMat)> {
    let d = label.dim();
    if label.is_identity() {
        return Ok((identity(d), CMat::zeros((d, d))));
    }
    let m = pauli_matrix(label);
    let (vals, vecs) = hermitian_eig(&m)?;
    let mut plus = CMat::zeros((d, d));
    let mut minus = CMat::zeros((d, d));
    for (k, &l) in vals.iter().enumerate() {
        let target = if l > 0.0 { &mut plus } else { &mut minus };
        for r in 0..d {
            for c in 0..d {
                let add = vecs[[r, k]] * vecs[[c, k]].conj();
                target[[r, c]] += add;
            }
        }
    }
    Ok((plus, minus))
}

/// Two-time correlator by explicit enumeration of the four outcome branches
/// with Lüders state update; matches the fast path to 1e-12.
pub fn brute_force_correlator(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    a_label: &PauliLabel,
    b_label: &PauliLabel,
) -> Result<f64> {
    if rho.dim() != ch.dim() || a_label.dim() != rho.dim() || b_label.dim() != rho.dim() {
        return Err(Error::InvalidArgument(
            "brute_force_correlator: dimension mismatch".into(),
        ));
    }
    let (pa_plus, pa_minus) = projectors_by_eig(a_label)?;
    let (pb_plus, pb_minus) = projectors_by_eig(b_label)?;

    let mut corr = 0.0;
    for (sign_a, pa) in [(1.0, &pa_plus), (-1.0, &pa_minus)] {
        let prob_a = trace_product(pa, rho.matrix()).re;
        if prob_a <= 0.0 {
            continue;
        }
        // Lüders update, normalized
        let updated = pa.dot(rho.matrix()).dot(&dagger(pa)).mapv(|z| z / prob_a);
        let evolved = ch.apply_raw(&updated);
        for (sign_b, pb) in [(1.0, &pb_plus), (-1.0, &pb_minus)] {
            let prob_b = trace_product(pb, &evolved).re;
            corr += sign_a * sign_b * prob_a * prob_b;
        }
    }
    Ok(corr)
}

/// Literal forward-PDM sum `(1/4ⁿ) Σ ⟨{σ_i1, σ_i2}⟩ σ_i1 ⊗ σ_i2` with
/// brute-force correlators. Limited to n ≤ 2 for cost.
pub fn brute_force_pdm(rho: &DensityMatrix, ch: &KrausChannel) -> Result<Pdm> {
    let n = rho
        .n_qubits()
        .ok_or_else(|| Error::InvalidArgument("state is not qubit shaped".into()))?;
    if n > 2 {
        return Err(Error::Unsupported(
            "brute_force_pdm supports n ≤ 2 only".into(),
        ));
    }
    let basis = enumerate_basis(n)?;
    let d2 = 1usize << (2 * n);
    let norm = 1.0 / (d2 as f64);
    let mut acc = CMat::zeros((d2, d2));
    for a in &basis {
        let ma = pauli_matrix(a);
        for b in &basis {
            let mb = pauli_matrix(b);
            let c = brute_force_correlator(rho, ch, a, b)?;
            let term = kron(&ma, &mb).mapv(|z| z * c * norm);
            acc = acc + term;
        }
    }
    Pdm::from_matrix(acc, n, Orientation::AsRecorded, &Tolerances::default())
}

fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_shape_fn((rows, cols), |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Modified Gram–Schmidt with one re-orthogonalization pass; columns of the
/// result are orthonormal (input assumed full column rank).
fn orthonormalize_columns(m: &CMat) -> CMat {
    let (rows, cols) = m.dim();
    let mut q = m.clone();
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let mut overlap = Complex64::new(0.0, 0.0);
                for r in 0..rows {
                    overlap += q[[r, k]].conj() * q[[r, j]];
                }
                for r in 0..rows {
                    let sub = overlap * q[[r, k]];
                    q[[r, j]] -= sub;
                }
            }
        }
        let norm: f64 = (0..rows).map(|r| q[[r, j]].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..rows {
            q[[r, j]] /= norm;
        }
    }
    q
}

/// Haar-style random unitary from the QR of a Ginibre matrix; deterministic
/// per seed.
pub fn random_unitary(d: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    orthonormalize_columns(&ginibre(&mut rng, d, d))
}

/// Random n-qubit state of the requested rank: Haar-random eigenvectors with
/// normalized exponential eigenvalues.
pub fn random_density_matrix(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = 1usize << n;
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} out of range 1..={d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = orthonormalize_columns(&ginibre(&mut rng, d, d));
    let mut weights: Vec<f64> = (0..rank).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut m = CMat::zeros((d, d));
    for (k, &w) in weights.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                let add = q[[r, k]] * q[[c, k]].conj() * w;
                m[[r, c]] += add;
            }
        }
    }
    DensityMatrix::new(m, vec![2; n])
}

/// Random n-qubit CPTP channel from a random Stinespring isometry with
/// `kraus_count` environment levels; deterministic per seed.
pub fn random_cptp_channel(n: usize, kraus_count: usize, seed: u64) -> Result<KrausChannel> {
    if kraus_count == 0 {
        return Err(Error::InvalidArgument("kraus_count must be ≥ 1".into()));
    }
    let d = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = orthonormalize_columns(&ginibre(&mut rng, d * kraus_count, d));
    let mut ops = Vec::with_capacity(kraus_count);
    for e in 0..kraus_count {
        let mut k = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                k[[i, j]] = v[[i * kraus_count + e, j]];
            }
        }
        ops.push(k);
    }
    KrausChannel::new(ops)
}
