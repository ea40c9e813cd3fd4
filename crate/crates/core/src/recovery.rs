//! Reversed-process CJ matrices.
//!
//! The unitary-dilation recovery map reverses an open evolution by running
//! its dilation backward: starting from the correlated system–environment
//! output ρ_{S₂E₂}, the global reversed PDM of conjugation by U† is formed in
//! closed form, both environment slots are traced out, and the reversed CJ
//! matrix M̄ is extracted from the remaining two-slot operator against the
//! output marginal γ. The result is trace preserving and positive but in
//! general not completely positive; when the dilation output is a product
//! state, M̄ is CP. For a bare unitary V the construction collapses to
//! M̄ = Σ |i⟩⟨j| ⊗ V†|j⟩⟨i|V.
//!
//! The Leifer–Spekkens reversal — swap-conjugating the space-time state
//! L = (√ρ⊗1)M(√ρ⊗1) — induces the Petz recovery map instead, whose partial
//! transpose is always PSD. The two reversals are genuinely different maps.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::channel::{unitary_cj, ChoiMatrix, UnitaryDilation};
use crate::eig::{hermitian_inv_sqrt_psd, hermitian_sqrt};
use crate::error::Error;
use crate::extract::{pinv_solve_raw, sylvester_solve_raw, ExtractionMode, RANK_TOL};
use crate::linalg::{
    anticommutator_half, dagger, frobenius_distance, identity, kron, partial_trace, swap_conjugate,
    CMat, MatrixJson,
};
use crate::state::{DensityMatrix, Tolerances};
use crate::Result;

/// PSD threshold for the T₁ positivity flag.
const T1_PSD_TOL: f64 = 1e-8;

/// How a reversed-process CJ matrix was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryMethod {
    Dilation,
    Unitary,
    Petz,
}

/// A reversed-process CJ matrix with its positivity evidence.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub choi_bar: ChoiMatrix,
    /// The dilation the reversal was computed from, when one was used.
    pub dilation_used: Option<UnitaryDilation>,
    pub mode: ExtractionMode,
    pub method: RecoveryMethod,
    pub min_eig_t1: f64,
    pub is_t1_psd: bool,
    /// Deviation of the defining identity Tr_{E₁E₂}R̄ = ½{(γ⊗1), M̄}
    /// (dilation method only).
    pub residual: Option<f64>,
}

impl Serialize for RecoveryResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RecoveryResult", 5)?;
        st.serialize_field("choi_bar", &MatrixJson::from_matrix(self.choi_bar.matrix()))?;
        st.serialize_field("min_eig_T1", &self.min_eig_t1)?;
        st.serialize_field("is_T1_psd", &self.is_t1_psd)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("method", &self.method)?;
        st.end()
    }
}

fn finish(
    mbar: CMat,
    d: usize,
    dilation: Option<UnitaryDilation>,
    mode: ExtractionMode,
    method: RecoveryMethod,
    residual: Option<f64>,
) -> Result<RecoveryResult> {
    let choi_bar = ChoiMatrix::new(mbar, d, d)?;
    let min_eig_t1 = choi_bar.min_eig_t1()?;
    Ok(RecoveryResult {
        choi_bar,
        dilation_used: dilation,
        mode,
        method,
        min_eig_t1,
        is_t1_psd: min_eig_t1 >= -T1_PSD_TOL,
        residual,
    })
}

/// The unitary-dilation recovery map.
///
/// Pipeline: (1) ρ_{S₂E₂} = U(ρ_S⊗env)U†; (2) global reversed PDM
/// ½{(ρ_{S₂E₂}⊗1), M_{U†}} on the two-slot SE space; (3) trace out both
/// environment factors (subsystem order S₁E₁S₂E₂, keeping {0,2});
/// (4) extract M̄ against γ = Tr_E ρ_{S₂E₂}. A rank-deficient γ switches the
/// extraction to the pseudoinverse and flags the result as projected.
pub fn unitary_dilation_recovery(
    rho_s: &DensityMatrix,
    dil: &UnitaryDilation,
) -> Result<RecoveryResult> {
    if rho_s.dim() != dil.d_s() {
        return Err(Error::InvalidArgument(format!(
            "dilation system dimension {} does not match state dimension {}",
            dil.d_s(),
            rho_s.dim()
        )));
    }
    let (d_s, d_e) = (dil.d_s(), dil.d_e());

    // (1) forward output on S⊗E
    let joint = kron(rho_s.matrix(), dil.env_state().matrix());
    let u = dil.unitary();
    let rho_out = u.dot(&joint).dot(&dagger(u));

    // (2) global reversed PDM: initial state ρ_{S₂E₂}, process = conj by U†
    let m_udag = unitary_cj(&dagger(u))?;
    let big = d_s * d_e;
    let lifted = kron(&rho_out, &identity(big));
    let rbar_global = anticommutator_half(&lifted, m_udag.matrix());

    // (3) trace out E₁ and E₂
    let q = partial_trace(&rbar_global, &[d_s, d_e, d_s, d_e], &[0, 2])?;

    // (4) extract against γ
    let gamma_m = partial_trace(&rho_out, &[d_s, d_e], &[0])?;
    let gamma = DensityMatrix::with_tolerances(gamma_m, vec![d_s], &Tolerances::default())?;
    let (mbar, mode) = if gamma.is_full_rank(RANK_TOL)? {
        (
            sylvester_solve_raw(&q, gamma.matrix())?,
            ExtractionMode::Full,
        )
    } else {
        (
            pinv_solve_raw(&q, gamma.matrix())?.0,
            ExtractionMode::Projected,
        )
    };
    let lifted_gamma = kron(gamma.matrix(), &identity(d_s));
    let residual = frobenius_distance(&anticommutator_half(&lifted_gamma, &mbar), &q);
    finish(
        mbar,
        d_s,
        Some(dil.clone()),
        mode,
        RecoveryMethod::Dilation,
        Some(residual),
    )
}

/// Reversal of a bare unitary: M̄ = Σ |i⟩⟨j| ⊗ V†|j⟩⟨i|V.
pub fn unitary_reversal_cj(v: &CMat) -> Result<ChoiMatrix> {
    unitary_cj(&dagger(v))
}

/// The Leifer–Spekkens space-time state L = (√ρ⊗1) M (√ρ⊗1).
pub fn leifer_spekkens_state(rho: &DensityMatrix, m: &ChoiMatrix) -> Result<CMat> {
    if m.d_in() != rho.dim() {
        return Err(Error::InvalidArgument(
            "Choi input dimension does not match the state".into(),
        ));
    }
    let root = hermitian_sqrt(rho.matrix())?;
    let lifted = kron(&root, &identity(m.d_out()));
    Ok(lifted.dot(m.matrix()).dot(&lifted))
}

/// CJ matrix of the reversal induced by swap-conjugating the Leifer–Spekkens
/// state: M̄ = (γ^{−1/2}⊗1)·S L S†·(γ^{−1/2}⊗1) with γ = E(ρ).
///
/// This is the Petz recovery map of (ρ, E); its partial transpose is PSD.
/// A rank-deficient γ uses the pseudoinverse square root and flags the
/// result as projected.
pub fn petz_reversal_cj(rho: &DensityMatrix, m: &ChoiMatrix) -> Result<RecoveryResult> {
    if m.d_in() != rho.dim() || m.d_out() != m.d_in() {
        return Err(Error::InvalidArgument(
            "Petz reversal requires a square Choi matching the state".into(),
        ));
    }
    let d = rho.dim();
    let gamma_m = m.apply_raw(rho.matrix());
    let gamma = DensityMatrix::with_tolerances(gamma_m, vec![d], &Tolerances::default())?;

    let l = leifer_spekkens_state(rho, m)?;
    let lbar = swap_conjugate(&l, d);
    let inv_root = hermitian_inv_sqrt_psd(gamma.matrix(), RANK_TOL)?;
    let lifted = kron(&inv_root, &identity(d));
    let mbar = lifted.dot(&lbar).dot(&lifted);

    let mode = if gamma.is_full_rank(RANK_TOL)? {
        ExtractionMode::Full
    } else {
        ExtractionMode::Projected
    };
    finish(mbar, d, None, mode, RecoveryMethod::Petz, None)
}

/// Wraps [`unitary_reversal_cj`] in the common result shape.
pub fn unitary_reversal_result(v: &CMat) -> Result<RecoveryResult> {
    let choi = unitary_reversal_cj(v)?;
    let d = choi.d_in();
    finish(
        choi.matrix().clone(),
        d,
        None,
        ExtractionMode::Full,
        RecoveryMethod::Unitary,
        None,
    )
}
