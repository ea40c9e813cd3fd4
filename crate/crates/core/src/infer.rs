//! The arrow-of-time decision procedure and its fine-grained companions.
//!
//! Given only a correlator table, both PDMs R and R̄ are built, their
//! marginals taken, and the forward and backward CJ matrices extracted. A
//! forward explanation exists when M^{T₁} is PSD; the verdict compares both
//! directions:
//!
//! * `FORWARD` — M^{T₁} ≥ 0 while M̄^{T₁} is not: the data as recorded is the
//!   forward direction.
//! * `BACKWARD` — the mirror case: the labels were flipped.
//! * `EITHER` — both PSD (symmetric boundary conditions, e.g. unitary
//!   dynamics).
//! * `INCONSISTENT` — neither PSD; no CPTP direction fits the data.
//! * `INDETERMINATE` — a rank-deficient marginal only permits projected
//!   extraction, which leaves the positivity question open.
//!
//! Only the first case is decided by the positivity criterion itself; the
//! remaining verdicts are the symmetric closure a total decision procedure
//! needs, and each one is labeled in the report notes.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::channel::{KrausChannel, UnitaryDilation};
use crate::eig::negativity_functional;
use crate::error::Error;
use crate::extract::{
    extract_choi_pseudoinverse, extract_choi_sylvester, ExtractionMode, ExtractionResult, RANK_TOL,
};
use crate::linalg::{partial_trace, trace_product};
use crate::pauli::{eigenspace_projectors, PauliLabel};
use crate::pdm::{pdm_from_correlators, CorrelatorTable, Direction};
use crate::state::{von_neumann_entropy, DensityMatrix, Tolerances};
use crate::Result;

/// Extraction residual above which the table is rejected as inconsistent
/// with every state + linear-map pair under either labeling.
const CORRUPT_RESIDUAL: f64 = 1e-4;

/// Outcome of the arrow-of-time test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Forward,
    Backward,
    Either,
    Inconsistent,
    Indeterminate,
}

/// Options for [`infer_arrow`].
#[derive(Debug, Clone, Copy)]
pub struct InferOptions {
    /// PSD tolerance on the T₁ eigenvalue tests. Exact pipelines keep the
    /// default; shot-sampled tables should widen it (the CLI uses 3/√shots).
    pub psd_tol: f64,
    /// Relative eigenvalue threshold for marginal rank decisions.
    pub rank_tol: f64,
}

impl Default for InferOptions {
    fn default() -> Self {
        Self {
            psd_tol: 1e-9,
            rank_tol: RANK_TOL,
        }
    }
}

/// Verdict plus the evidence it was based on.
#[derive(Debug, Clone)]
pub struct ArrowReport {
    pub verdict: Verdict,
    /// F(M̄^{T₁}) − F(M^{T₁}); positive favors FORWARD. Absent when either
    /// extraction was only projected.
    pub arrow_measure: Option<f64>,
    pub min_eig_fwd_t1: f64,
    pub min_eig_bwd_t1: f64,
    pub rank_rho: usize,
    pub rank_gamma: usize,
    /// Entropy balance of a dilation; not derivable from a table alone.
    pub entropy_delta: Option<f64>,
    pub residual_fwd: f64,
    pub residual_bwd: f64,
    pub notes: Vec<String>,
}

impl Serialize for ArrowReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ArrowReport", 10)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("arrow_measure", &self.arrow_measure)?;
        st.serialize_field("min_eig_fwd_T1", &self.min_eig_fwd_t1)?;
        st.serialize_field("min_eig_bwd_T1", &self.min_eig_bwd_t1)?;
        st.serialize_field("rank_rho", &self.rank_rho)?;
        st.serialize_field("rank_gamma", &self.rank_gamma)?;
        st.serialize_field("entropy_delta", &self.entropy_delta)?;
        st.serialize_field("residual_fwd", &self.residual_fwd)?;
        st.serialize_field("residual_bwd", &self.residual_bwd)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

/// Runs the full decision procedure on a correlator table.
///
/// Both PDMs are built from the data (the backward one directly, not by
/// conjugating the forward one), marginals are validated, M and M̄ are
/// extracted — the eigenbasis solver on full-rank marginals, the
/// pseudoinverse otherwise — and the verdict follows the T₁ positivity
/// pattern. Residuals above the corrupt-data threshold abort with an error
/// since no state + linear map reproduces the table under either labeling.
pub fn infer_arrow(table: &CorrelatorTable, opts: &InferOptions) -> Result<ArrowReport> {
    let r = pdm_from_correlators(table, Direction::Forward);
    let rbar = pdm_from_correlators(table, Direction::Backward);

    let marg_tol = Tolerances {
        psd: opts.psd_tol.max(Tolerances::default().psd),
        ..Tolerances::default()
    };
    let (rho, gamma) = r.marginals_with(&marg_tol)?;
    let rank_rho = rho.rank(opts.rank_tol)?;
    let rank_gamma = gamma.rank(opts.rank_tol)?;
    let d = rho.dim();

    let mut notes = Vec::new();
    let extract = |p: &crate::pdm::Pdm, s: &DensityMatrix| -> Result<ExtractionResult> {
        if s.rank(opts.rank_tol)? == d {
            extract_choi_sylvester(p, s)
        } else {
            extract_choi_pseudoinverse(p, s)
        }
    };
    let fwd = extract(&r, &rho)?;
    let bwd = extract(&rbar, &gamma)?;

    if fwd.residual > CORRUPT_RESIDUAL || bwd.residual > CORRUPT_RESIDUAL {
        return Err(Error::CorruptData(format!(
            "extraction residuals ({:.3e} forward, {:.3e} backward) exceed {CORRUPT_RESIDUAL:e}; \
             the table is not consistent with any state and linear map under either labeling",
            fwd.residual, bwd.residual
        )));
    }

    let projected = fwd.mode == ExtractionMode::Projected || bwd.mode == ExtractionMode::Projected;
    let fwd_psd = fwd.min_eig_t1 >= -opts.psd_tol;
    let bwd_psd = bwd.min_eig_t1 >= -opts.psd_tol;

    let verdict = if projected {
        if rank_rho < d {
            notes.push(format!(
                "t1 marginal rho is rank deficient (rank {rank_rho} of {d}); extraction is projected"
            ));
        }
        if rank_gamma < d {
            notes.push(format!(
                "t2 marginal gamma is rank deficient (rank {rank_gamma} of {d}); extraction is projected"
            ));
        }
        notes.push(
            "INDETERMINATE: positivity of the full process is not decidable from projected \
             extractions; fine-grained conditional statistics would be needed"
                .into(),
        );
        Verdict::Indeterminate
    } else {
        match (fwd_psd, bwd_psd) {
            (true, false) => {
                notes.push(
                    "FORWARD: M^{T1} is PSD and M̄^{T1} is not — the data as recorded is the \
                     forward direction"
                        .into(),
                );
                Verdict::Forward
            }
            (false, true) => {
                notes.push(
                    "BACKWARD: mirrored criterion — the recorded time labels are flipped".into(),
                );
                Verdict::Backward
            }
            (true, true) => {
                notes.push(
                    "EITHER: both directions admit a CP explanation (symmetric boundary \
                     conditions)"
                        .into(),
                );
                Verdict::Either
            }
            (false, false) => {
                notes.push(
                    "INCONSISTENT: neither direction is CP; no CPTP process fits the data \
                     (verdict outside the positivity criterion, reported with raw eigenvalues)"
                        .into(),
                );
                Verdict::Inconsistent
            }
        }
    };
    notes.push(format!("psd_tol = {:.3e}", opts.psd_tol));

    let arrow_measure = if projected {
        None
    } else {
        Some(arrow_measure_value(&fwd, &bwd)?)
    };

    Ok(ArrowReport {
        verdict,
        arrow_measure,
        min_eig_fwd_t1: fwd.min_eig_t1,
        min_eig_bwd_t1: bwd.min_eig_t1,
        rank_rho,
        rank_gamma,
        entropy_delta: None,
        residual_fwd: fwd.residual,
        residual_bwd: bwd.residual,
        notes,
    })
}

/// A(R) = F(M̄^{T₁}) − F(M^{T₁}); positive means the first argument's
/// labeling is the forward one. Undefined for projected-mode extractions.
pub fn arrow_measure(fwd: &ExtractionResult, bwd: &ExtractionResult) -> Result<f64> {
    if fwd.mode == ExtractionMode::Projected || bwd.mode == ExtractionMode::Projected {
        return Err(Error::Unsupported(
            "arrow measure is undefined for projected-mode extractions".into(),
        ));
    }
    arrow_measure_value(fwd, bwd)
}

fn arrow_measure_value(fwd: &ExtractionResult, bwd: &ExtractionResult) -> Result<f64> {
    let f_fwd = negativity_functional(&fwd.choi.t1())?;
    let f_bwd = negativity_functional(&bwd.choi.t1())?;
    Ok(f_bwd - f_fwd)
}

/// Entropy balance of a dilation step.
#[derive(Debug, Clone, Copy)]
pub struct EntropyBalance {
    /// [S(ρ_{S₂}) + S(ρ_{E₂})] − [S(ρ_{S₁}) + S(ρ_{E₁})]; never below −1e-9
    /// by subadditivity.
    pub delta: f64,
    /// Whether the boundary conditions are entropy symmetric (|ΔS| ≤ 1e-9).
    pub symmetric: bool,
}

/// Sum-of-marginal-entropies change through a dilation; `env` overrides the
/// dilation's stored environment state when given.
pub fn entropy_balance(
    rho_s: &DensityMatrix,
    env: Option<&DensityMatrix>,
    dil: &UnitaryDilation,
) -> Result<EntropyBalance> {
    let dil_owned;
    let dil = match env {
        Some(e) => {
            dil_owned = dil.with_env_state(e.clone())?;
            &dil_owned
        }
        None => dil,
    };
    if rho_s.dim() != dil.d_s() {
        return Err(Error::InvalidArgument(
            "entropy_balance: state does not match dilation system dimension".into(),
        ));
    }
    let before = von_neumann_entropy(rho_s)? + von_neumann_entropy(dil.env_state())?;

    let out = crate::channel::apply_global(dil, rho_s)?;
    let dims = [dil.d_s(), dil.d_e()];
    let s2 = DensityMatrix::new(partial_trace(out.matrix(), &dims, &[0])?, vec![dil.d_s()])?;
    let e2 = DensityMatrix::new(partial_trace(out.matrix(), &dims, &[1])?, vec![dil.d_e()])?;
    let after = von_neumann_entropy(&s2)? + von_neumann_entropy(&e2)?;

    let delta = after - before;
    Ok(EntropyBalance {
        delta,
        symmetric: delta.abs() <= 1e-9,
    })
}

/// Fine-grained joint distribution over the ±1 outcomes of σ_A then σ_B:
/// P(a,b) = Tr[Π_b E(Π_a ρ Π_a)]. Index 0 is outcome +1.
#[derive(Debug, Clone, Copy)]
pub struct JointDistribution {
    pub p: [[f64; 2]; 2],
}

impl JointDistribution {
    pub fn marginal_first(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[0][1], self.p[1][0] + self.p[1][1]]
    }

    pub fn marginal_second(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[1][0], self.p[0][1] + self.p[1][1]]
    }

    /// Coarse-grained correlator Σ ab·P(a,b).
    pub fn coarse_correlator(&self) -> f64 {
        self.p[0][0] + self.p[1][1] - self.p[0][1] - self.p[1][0]
    }

    /// E[second | first = ±1], with probability-zero branches reported as 0.
    pub fn second_given_first(&self) -> [f64; 2] {
        let pa = self.marginal_first();
        let cond = |num: f64, den: f64| if den > 1e-12 { num / den } else { 0.0 };
        [
            cond(self.p[0][0] - self.p[0][1], pa[0]),
            cond(self.p[1][0] - self.p[1][1], pa[1]),
        ]
    }

    /// E[first | second = ±1], with probability-zero branches reported as 0.
    pub fn first_given_second(&self) -> [f64; 2] {
        let pb = self.marginal_second();
        let cond = |num: f64, den: f64| if den > 1e-12 { num / den } else { 0.0 };
        [
            cond(self.p[0][0] - self.p[1][0], pb[0]),
            cond(self.p[0][1] - self.p[1][1], pb[1]),
        ]
    }
}

/// Joint outcome distribution of measuring `a_label`, applying the channel,
/// then measuring `b_label`.
pub fn fine_grained_joint(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    a_label: &PauliLabel,
    b_label: &PauliLabel,
) -> Result<JointDistribution> {
    if a_label.is_identity() || b_label.is_identity() {
        return Err(Error::InvalidArgument(
            "fine-grained statistics need non-identity observables".into(),
        ));
    }
    if rho.dim() != ch.dim() || a_label.dim() != rho.dim() || b_label.dim() != rho.dim() {
        return Err(Error::InvalidArgument(
            "fine_grained_joint: dimension mismatch".into(),
        ));
    }
    let (a_plus, a_minus) = eigenspace_projectors(a_label);
    let (b_plus, b_minus) = eigenspace_projectors(b_label);
    let mut p = [[0.0; 2]; 2];
    for (ai, pa) in [&a_plus, &a_minus].into_iter().enumerate() {
        let evolved = ch.apply_raw(&pa.dot(rho.matrix()).dot(pa));
        for (bi, pb) in [&b_plus, &b_minus].into_iter().enumerate() {
            p[ai][bi] = trace_product(pb, &evolved).re;
        }
    }
    Ok(JointDistribution { p })
}

/// Conditional expectations of one observable given the other's outcome,
/// under one measurement ordering.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalSet {
    /// E[σ_B | σ_A = ±1].
    pub b_given_a: [f64; 2],
    /// E[σ_A | σ_B = ±1].
    pub a_given_b: [f64; 2],
    /// Outcome probabilities of σ_A and σ_B under this ordering.
    pub p_a: [f64; 2],
    pub p_b: [f64; 2],
}

/// Fine-grained comparison of the two measurement orderings.
#[derive(Debug, Clone)]
pub struct FineGrainedComparison {
    /// Statistics with σ_A measured first (hypothesis A→B).
    pub forward: ConditionalSet,
    /// Statistics with σ_B measured first (hypothesis B→A): the same state
    /// and channel with the measurements physically reordered.
    pub reversed: ConditionalSet,
    pub distinguishable: bool,
}

/// Compares the conditional expectation values aligned with each hypothesis;
/// the orderings are distinguishable when any conditional differs by more
/// than `tol`.
pub fn fine_grained_discriminator(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    a_label: &PauliLabel,
    b_label: &PauliLabel,
    tol: f64,
) -> Result<FineGrainedComparison> {
    let fwd_joint = fine_grained_joint(rho, ch, a_label, b_label)?;
    let forward = ConditionalSet {
        b_given_a: fwd_joint.second_given_first(),
        a_given_b: fwd_joint.first_given_second(),
        p_a: fwd_joint.marginal_first(),
        p_b: fwd_joint.marginal_second(),
    };
    // reversed hypothesis: σ_B measured first on the same process
    let bwd_joint = fine_grained_joint(rho, ch, b_label, a_label)?;
    let reversed = ConditionalSet {
        b_given_a: bwd_joint.first_given_second(),
        a_given_b: bwd_joint.second_given_first(),
        p_a: bwd_joint.marginal_second(),
        p_b: bwd_joint.marginal_first(),
    };
    let pairs = [
        (forward.b_given_a[0], reversed.b_given_a[0]),
        (forward.b_given_a[1], reversed.b_given_a[1]),
        (forward.a_given_b[0], reversed.a_given_b[0]),
        (forward.a_given_b[1], reversed.a_given_b[1]),
    ];
    let distinguishable = pairs.iter().any(|(f, r)| (f - r).abs() > tol);
    Ok(FineGrainedComparison {
        forward,
        reversed,
        distinguishable,
    })
}
