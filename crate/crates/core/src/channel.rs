//! Quantum process representations: Kraus channels, Choi–Jamiołkowski
//! matrices, and Stinespring unitary dilations, with conversions between
//! them.
//!
//! The CJ convention is `M = Σ_{ij} |i⟩⟨j| ⊗ E(|j⟩⟨i|)`; the map acts through
//! `E(ρ) = Tr₁[(ρ⊗1)M]`, and complete positivity is equivalent to the
//! partial transpose `M^{T₁}` being positive semidefinite.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::min_eigenvalue;
use crate::error::Error;
use crate::linalg::{
    dagger, frobenius_distance, identity, is_hermitian, kron, partial_trace, partial_transpose,
    validate_finite, CMat, CVec, MatrixJson, ONE,
};
use crate::state::{DensityMatrix, Tolerances};
use crate::Result;

const COMPLETENESS_TOL: f64 = 1e-9;
const UNITARITY_TOL: f64 = 1e-9;

/// A trace-preserving channel in Kraus form; all operators are square and of
/// equal dimension, with Σ K†K = 1 within 1e-9.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<CMat>,
    dim: usize,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("Kraus set is empty".into()));
        }
        let dim = ops[0].nrows();
        for k in &ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::InvalidArgument(
                    "Kraus operators must all be square of equal dimension".into(),
                ));
            }
            validate_finite(k)?;
        }
        let mut acc = CMat::zeros((dim, dim));
        for k in &ops {
            acc = acc + dagger(k).dot(k);
        }
        if frobenius_distance(&acc, &identity(dim)) > COMPLETENESS_TOL * (dim as f64).sqrt() {
            return Err(Error::InvalidArgument(
                "Kraus set is not trace preserving (Σ K†K ≠ 1)".into(),
            ));
        }
        Ok(Self { ops, dim })
    }

    /// Channel that conjugates by a single unitary.
    pub fn from_unitary(v: CMat) -> Result<Self> {
        if !is_unitary(&v, UNITARITY_TOL) {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        let dim = v.nrows();
        Ok(Self { ops: vec![v], dim })
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> Option<usize> {
        if self.dim.is_power_of_two() {
            Some(self.dim.trailing_zeros() as usize)
        } else {
            None
        }
    }

    /// Σ K ρ K† on a raw matrix.
    pub fn apply_raw(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros((self.dim, self.dim));
        for k in &self.ops {
            out = out + k.dot(rho).dot(&dagger(k));
        }
        out
    }

    /// Σ K ρ K† with density-matrix validation of the output.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "channel dimension {} does not match state dimension {}",
                self.dim,
                rho.dim()
            )));
        }
        DensityMatrix::new(self.apply_raw(rho.matrix()), rho.dims().to_vec())
    }
}

pub(crate) fn is_unitary(v: &CMat, tol: f64) -> bool {
    v.nrows() == v.ncols()
        && frobenius_distance(&dagger(v).dot(v), &identity(v.nrows()))
            <= tol * (v.nrows() as f64).sqrt()
}

/// CJ matrix of a linear map from a d_in- to a d_out-dimensional system,
/// living on H₁ ⊗ H₂ (input slot first).
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    matrix: CMat,
    d_in: usize,
    d_out: usize,
}

impl ChoiMatrix {
    pub fn new(matrix: CMat, d_in: usize, d_out: usize) -> Result<Self> {
        if matrix.nrows() != d_in * d_out || matrix.ncols() != d_in * d_out {
            return Err(Error::InvalidArgument(format!(
                "Choi matrix must be {0}×{0}",
                d_in * d_out
            )));
        }
        validate_finite(&matrix)?;
        if !is_hermitian(&matrix, Tolerances::default().herm) {
            return Err(Error::InvalidData("Choi matrix is not Hermitian".into()));
        }
        Ok(Self {
            matrix,
            d_in,
            d_out,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Partial transpose over the input slot.
    pub fn t1(&self) -> CMat {
        partial_transpose(&self.matrix, &[self.d_in, self.d_out], 0)
            .expect("dims consistent by construction")
    }

    /// Minimum eigenvalue of M^{T₁} — the complete-positivity witness.
    pub fn min_eig_t1(&self) -> Result<f64> {
        min_eigenvalue(&self.t1())
    }

    pub fn is_t1_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eig_t1()? >= -tol)
    }

    /// ‖Tr₂M − 1‖_F: zero (within tolerance) iff the map is trace preserving.
    pub fn tp_defect(&self) -> f64 {
        let tr2 = partial_trace(&self.matrix, &[self.d_in, self.d_out], &[0])
            .expect("dims consistent by construction");
        frobenius_distance(&tr2, &identity(self.d_in))
    }

    /// E(ρ) = Tr₁[(ρ⊗1)M] on a raw matrix.
    pub fn apply_raw(&self, rho: &CMat) -> CMat {
        let lifted = kron(rho, &identity(self.d_out));
        partial_trace(&lifted.dot(&self.matrix), &[self.d_in, self.d_out], &[1])
            .expect("dims consistent by construction")
    }
}

/// M = Σ |i⟩⟨j| ⊗ Σ_k K|j⟩⟨i|K†.
pub fn cj_from_kraus(ch: &KrausChannel) -> ChoiMatrix {
    let d = ch.dim();
    let mut m = CMat::zeros((d * d, d * d));
    for k in ch.ops() {
        for i in 0..d {
            for j in 0..d {
                // block (i,j) gains (K e_j)(K e_i)†
                for r in 0..d {
                    let krj = k[[r, j]];
                    if krj == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..d {
                        m[[i * d + r, j * d + c]] += krj * k[[c, i]].conj();
                    }
                }
            }
        }
    }
    ChoiMatrix::new(m, d, d).expect("CJ of a valid channel is Hermitian")
}

/// CJ matrix of conjugation by a (general-dimension) unitary.
pub fn unitary_cj(u: &CMat) -> Result<ChoiMatrix> {
    if !is_unitary(u, UNITARITY_TOL) {
        return Err(Error::InvalidArgument("matrix is not unitary".into()));
    }
    let d = u.nrows();
    let mut m = CMat::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            for r in 0..d {
                for c in 0..d {
                    m[[i * d + r, j * d + c]] = u[[r, j]] * u[[c, i]].conj();
                }
            }
        }
    }
    ChoiMatrix::new(m, d, d)
}

/// E(ρ) = Tr₁[(ρ⊗1)M] with output validation; for TP Chois the output is a
/// valid state.
pub fn apply_via_cj(m: &ChoiMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != m.d_in() {
        return Err(Error::InvalidArgument(format!(
            "Choi input dimension {} does not match state dimension {}",
            m.d_in(),
            rho.dim()
        )));
    }
    DensityMatrix::new(m.apply_raw(rho.matrix()), vec![m.d_out()])
}

/// A global unitary on S⊗E together with the environment input state.
/// The first tensor factor is always S, the second E.
#[derive(Debug, Clone)]
pub struct UnitaryDilation {
    u: CMat,
    d_s: usize,
    d_e: usize,
    env_state: DensityMatrix,
}

impl UnitaryDilation {
    pub fn new(u: CMat, d_s: usize, d_e: usize, env_state: DensityMatrix) -> Result<Self> {
        if u.nrows() != d_s * d_e || u.ncols() != d_s * d_e {
            return Err(Error::InvalidArgument(format!(
                "dilation unitary must be {0}×{0}",
                d_s * d_e
            )));
        }
        if env_state.dim() != d_e {
            return Err(Error::InvalidArgument(
                "environment state dimension mismatch".into(),
            ));
        }
        if !is_unitary(&u, UNITARITY_TOL) {
            return Err(Error::InvalidArgument(
                "dilation matrix is not unitary".into(),
            ));
        }
        Ok(Self {
            u,
            d_s,
            d_e,
            env_state,
        })
    }

    pub fn unitary(&self) -> &CMat {
        &self.u
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_e(&self) -> usize {
        self.d_e
    }

    pub fn env_state(&self) -> &DensityMatrix {
        &self.env_state
    }

    /// Same dilation with a different environment input state.
    pub fn with_env_state(&self, env_state: DensityMatrix) -> Result<Self> {
        Self::new(self.u.clone(), self.d_s, self.d_e, env_state)
    }

    /// The induced channel E(ρ) = Tr_E[U(ρ⊗env)U†] in Kraus-free raw form.
    pub fn induced_channel_raw(&self, rho: &CMat) -> CMat {
        let global = apply_global_raw(self, rho);
        partial_trace(&global, &[self.d_s, self.d_e], &[0])
            .expect("dims consistent by construction")
    }
}

pub(crate) fn apply_global_raw(dil: &UnitaryDilation, rho_s: &CMat) -> CMat {
    let joint = kron(rho_s, dil.env_state.matrix());
    dil.u.dot(&joint).dot(&dagger(&dil.u))
}

/// Canonical Stinespring dilation of a channel.
///
/// The environment dimension equals the number of Kraus operators and starts
/// in |0⟩⟨0|. Columns with environment index 0 are fixed to Σ_k K_k ⊗ |k⟩;
/// the remaining columns are completed deterministically by Gram–Schmidt
/// over canonical basis vectors with a re-orthogonalization pass. The
/// recovery map depends on the dilation, so this completion is part of the
/// artifact's contract.
pub fn stinespring_dilation(ch: &KrausChannel) -> Result<UnitaryDilation> {
    let d = ch.dim();
    let m = ch.ops().len();
    let total = d * m;

    let mut u = CMat::zeros((total, total));
    // fixed columns: input (j, e=0) ↦ Σ_k K_k|j⟩ ⊗ |k⟩
    let mut fixed: Vec<CVec> = Vec::with_capacity(d);
    for j in 0..d {
        let mut col = CVec::zeros(total);
        for (k, op) in ch.ops().iter().enumerate() {
            for i in 0..d {
                col[i * m + k] = op[[i, j]];
            }
        }
        fixed.push(col);
    }
    let mut columns: Vec<CVec> = fixed.clone();

    // complete to a unitary
    let mut completions: Vec<CVec> = Vec::new();
    let mut r = 0usize;
    while columns.len() < total {
        if r >= total {
            return Err(Error::InvalidData(
                "stinespring_dilation: unitary completion failed".into(),
            ));
        }
        let mut v = CVec::zeros(total);
        v[r] = ONE;
        r += 1;
        for _ in 0..2 {
            for c in &columns {
                let overlap: Complex64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c.iter()) {
                    *vi -= overlap * ci;
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let v = v.mapv(|z| z / norm);
            columns.push(v.clone());
            completions.push(v);
        }
    }

    for (j, col) in fixed.iter().enumerate() {
        for i in 0..total {
            u[[i, j * m]] = col[i];
        }
    }
    let mut free_slots = (0..total).filter(|idx| idx % m != 0);
    for col in &completions {
        let slot = free_slots.next().expect("counted free slots");
        for i in 0..total {
            u[[i, slot]] = col[i];
        }
    }

    let env = if m == 1 {
        DensityMatrix::new(identity(1), vec![1])?
    } else {
        let mut e0 = CMat::zeros((m, m));
        e0[[0, 0]] = ONE;
        DensityMatrix::new(e0, vec![m])?
    };
    UnitaryDilation::new(u, d, m, env)
}

/// U(ρ_S ⊗ env)U† as a validated state on S⊗E.
pub fn apply_global(dil: &UnitaryDilation, rho_s: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_s.dim() != dil.d_s() {
        return Err(Error::InvalidArgument(format!(
            "dilation system dimension {} does not match state dimension {}",
            dil.d_s(),
            rho_s.dim()
        )));
    }
    DensityMatrix::new(
        apply_global_raw(dil, rho_s.matrix()),
        vec![dil.d_s(), dil.d_e()],
    )
}

/// JSON wire form of a channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelJson {
    Kraus {
        ops: Vec<MatrixJson>,
    },
    Unitary {
        #[serde(rename = "U")]
        u: MatrixJson,
    },
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        if ch.ops().len() == 1 && is_unitary(&ch.ops()[0], UNITARITY_TOL) {
            ChannelJson::Unitary {
                u: MatrixJson::from_matrix(&ch.ops()[0]),
            }
        } else {
            ChannelJson::Kraus {
                ops: ch.ops().iter().map(MatrixJson::from_matrix).collect(),
            }
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        match self {
            ChannelJson::Kraus { ops } => {
                let ops: Result<Vec<CMat>> = ops.iter().map(MatrixJson::to_matrix).collect();
                KrausChannel::new(ops?)
            }
            ChannelJson::Unitary { u } => KrausChannel::from_unitary(u.to_matrix()?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, swap_matrix, trace};
    use crate::oracle::{random_cptp_channel, random_density_matrix, random_unitary};
    use crate::testfix::{decohering_channel, rho_a};

    #[test]
    fn identity_channel_cj_is_swap() {
        let ch = KrausChannel::from_unitary(identity(2)).unwrap();
        let m = cj_from_kraus(&ch);
        assert_eq!(max_abs_diff(m.matrix(), &swap_matrix(2)), 0.0);
        assert!(m.tp_defect() < 1e-12);
    }

    #[test]
    fn decohering_channel_cj_is_diagonal() {
        let m = cj_from_kraus(&decohering_channel());
        let mut want = CMat::zeros((4, 4));
        want[[0, 0]] = ONE;
        want[[3, 3]] = ONE;
        assert_eq!(max_abs_diff(m.matrix(), &want), 0.0);
    }

    #[test]
    fn diagonal_choi_is_t1_invariant() {
        // the decohering CJ matrix is diagonal, so M^{T1} = M
        let m = cj_from_kraus(&decohering_channel());
        assert_eq!(max_abs_diff(&m.t1(), m.matrix()), 0.0);
        assert!(m.min_eig_t1().unwrap() >= 0.0);
    }

    #[test]
    fn random_unitary_channel_t1_psd() {
        for seed in 0..5u64 {
            let v = random_unitary(2, 1000 + seed);
            let m = cj_from_kraus(&KrausChannel::from_unitary(v).unwrap());
            assert!(m.min_eig_t1().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let mut k = CMat::zeros((2, 2));
        k[[0, 0]] = Complex64::new(0.5, 0.0);
        assert!(KrausChannel::new(vec![k]).is_err());
    }

    #[test]
    fn apply_via_cj_identity_and_decohere() {
        let idch = KrausChannel::from_unitary(identity(2)).unwrap();
        let m = cj_from_kraus(&idch);
        let rho = rho_a(0.7);
        let out = apply_via_cj(&m, &rho).unwrap();
        assert!(frobenius_distance(out.matrix(), rho.matrix()) < 1e-12);

        let a = 0.4;
        let m = cj_from_kraus(&decohering_channel());
        let out = apply_via_cj(&m, &rho_a(a)).unwrap();
        let mut want = CMat::zeros((2, 2));
        want[[0, 0]] = Complex64::new(1.0 - a / 2.0, 0.0);
        want[[1, 1]] = Complex64::new(a / 2.0, 0.0);
        assert!(frobenius_distance(out.matrix(), &want) < 1e-12);
    }

    #[test]
    fn apply_via_cj_matches_kraus_application() {
        for seed in 0..10u64 {
            let ch = random_cptp_channel(1, 3, 2000 + seed).unwrap();
            let rho = random_density_matrix(1, 2, 3000 + seed).unwrap();
            let m = cj_from_kraus(&ch);
            let via_cj = m.apply_raw(rho.matrix());
            let via_kraus = ch.apply_raw(rho.matrix());
            assert!(frobenius_distance(&via_cj, &via_kraus) < 1e-10);
        }
        // CJ trace = d_in for TP channels
        let ch = random_cptp_channel(2, 2, 77).unwrap();
        let m = cj_from_kraus(&ch);
        assert!((trace(m.matrix()).re - 4.0).abs() < 1e-9);
    }

    #[test]
    fn apply_via_cj_dimension_mismatch() {
        let m = cj_from_kraus(&decohering_channel());
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(apply_via_cj(&m, &rho).is_err());
    }

    #[test]
    fn stinespring_unitary_case() {
        let v = random_unitary(2, 4);
        let ch = KrausChannel::from_unitary(v.clone()).unwrap();
        let dil = stinespring_dilation(&ch).unwrap();
        assert_eq!(dil.d_e(), 1);
        assert!(frobenius_distance(dil.unitary(), &v) < 1e-12);
    }

    #[test]
    fn stinespring_reproduces_channel() {
        let cases: Vec<KrausChannel> = vec![
            decohering_channel(),
            random_cptp_channel(1, 2, 5).unwrap(),
            random_cptp_channel(1, 3, 6).unwrap(),
            random_cptp_channel(2, 2, 7).unwrap(),
        ];
        for ch in cases {
            let dil = stinespring_dilation(&ch).unwrap();
            // unitarity to 1e-10
            let gram = dagger(dil.unitary()).dot(dil.unitary());
            assert!(frobenius_distance(&gram, &identity(gram.nrows())) < 1e-10);
            for seed in 0..20u64 {
                let n = ch.n_qubits().unwrap();
                let rho = random_density_matrix(n, 1 << n, 100 + seed).unwrap();
                let via_dilation = dil.induced_channel_raw(rho.matrix());
                let direct = ch.apply_raw(rho.matrix());
                assert!(frobenius_distance(&via_dilation, &direct) < 1e-9);
            }
        }
    }

    #[test]
    fn apply_global_cases() {
        // U = identity ⇒ product state
        let ch = decohering_channel();
        let dil = stinespring_dilation(&ch).unwrap();
        let trivial = UnitaryDilation::new(identity(4), 2, 2, dil.env_state().clone()).unwrap();
        let rho = rho_a(0.3);
        let out = apply_global(&trivial, &rho).unwrap();
        let want = kron(rho.matrix(), dil.env_state().matrix());
        assert!(frobenius_distance(out.matrix(), &want) < 1e-12);

        // SWAP dilation moves ρ into the environment slot
        let swap_dil =
            UnitaryDilation::new(swap_matrix(2), 2, 2, DensityMatrix::pure_zero(1)).unwrap();
        let out = apply_global(&swap_dil, &rho).unwrap();
        let want = kron(DensityMatrix::pure_zero(1).matrix(), rho.matrix());
        assert!(frobenius_distance(out.matrix(), &want) < 1e-12);

        // trace and positivity preserved on random inputs
        for seed in 0..5u64 {
            let ch = random_cptp_channel(1, 2, 40 + seed).unwrap();
            let dil = stinespring_dilation(&ch).unwrap();
            let rho = random_density_matrix(1, 2, 50 + seed).unwrap();
            let out = apply_global(&dil, &rho).unwrap();
            assert!((trace(out.matrix()).re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn channel_json_round_trip() {
        let ch = decohering_channel();
        let j = ChannelJson::from_channel(&ch);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"kind\":\"kraus\""));
        let back = serde_json::from_str::<ChannelJson>(&text)
            .unwrap()
            .to_channel()
            .unwrap();
        assert_eq!(back.ops().len(), 2);

        let u = ChannelJson::from_channel(&KrausChannel::from_unitary(identity(2)).unwrap());
        let text = serde_json::to_string(&u).unwrap();
        assert!(text.contains("\"kind\":\"unitary\"") && text.contains("\"U\""));
    }
}
