//! Pseudo-density matrices and the two-time correlator tables they encode.
//!
//! A correlator table holds `⟨{σ_i1, σ_i2}⟩` for every pair of n-qubit Pauli
//! words, measured with the coarse-grained ±1-eigenspace scheme. The table
//! deliberately carries no time-direction metadata: attaching coefficients
//! to σ_i1⊗σ_i2 gives the forward PDM R, to σ_i2⊗σ_i1 the backward PDM
//! R̄ = S R S†. PDMs are Hermitian with unit trace; negative eigenvalues are
//! expected (they witness temporal correlation) and are not an error.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChoiMatrix, KrausChannel};
use crate::eig::hermitian_eig;
use crate::error::Error;
use crate::linalg::{
    anticommutator_half, identity, is_hermitian, kron, partial_trace, swap_conjugate, trace,
    trace_product, validate_finite, CMat,
};
use crate::pauli::{eigenspace_projectors, enumerate_basis, PauliLabel};
use crate::state::{DensityMatrix, Tolerances};
use crate::Result;

/// Which slot of the PDM carries the earlier time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Slot 1 is the earlier time, as the data was recorded.
    AsRecorded,
    /// The PDM has been swap-conjugated; slot 1 is the later time.
    Swapped,
}

/// Direction selector for building a PDM from a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Complete table of two-time Pauli correlators for n qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    n_qubits: usize,
    /// Row-major over canonical label indices: values[i1·4ⁿ + i2].
    values: Vec<f64>,
}

impl CorrelatorTable {
    /// Builds a complete table by evaluating `f` on every label pair in
    /// canonical order.
    pub fn from_fn(
        n_qubits: usize,
        mut f: impl FnMut(&PauliLabel, &PauliLabel) -> f64,
    ) -> Result<Self> {
        let basis = enumerate_basis(n_qubits)?;
        let mut values = Vec::with_capacity(basis.len() * basis.len());
        for a in &basis {
            for b in &basis {
                values.push(f(a, b));
            }
        }
        let table = Self { n_qubits, values };
        table.validate()?;
        Ok(table)
    }

    /// Builds a table from an unordered entry list, requiring every pair to
    /// appear exactly once.
    pub fn from_entries(
        n_qubits: usize,
        entries: impl IntoIterator<Item = (PauliLabel, PauliLabel, f64)>,
    ) -> Result<Self> {
        let count = 1usize << (4 * n_qubits);
        enumerate_basis(n_qubits)?; // validates n
        let mut values = vec![f64::NAN; count];
        let side = 1usize << (2 * n_qubits);
        for (a, b, v) in entries {
            if a.n_qubits() != n_qubits || b.n_qubits() != n_qubits {
                return Err(Error::InvalidData(format!(
                    "entry ({a}, {b}) has the wrong qubit count for n={n_qubits}"
                )));
            }
            let idx = a.index() * side + b.index();
            if !values[idx].is_nan() {
                return Err(Error::InvalidData(format!("duplicate entry ({a}, {b})")));
            }
            values[idx] = v;
        }
        if let Some(pos) = values.iter().position(|v| v.is_nan()) {
            let (i1, i2) = (pos / side, pos % side);
            return Err(Error::MissingEntry {
                a: PauliLabel::from_index(n_qubits, i1)?.to_string(),
                b: PauliLabel::from_index(n_qubits, i2)?.to_string(),
            });
        }
        let table = Self { n_qubits, values };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let side = 1usize << (2 * self.n_qubits);
        for (pos, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&v) {
                let (i1, i2) = (pos / side, pos % side);
                return Err(Error::InvalidData(format!(
                    "correlator ({}, {}) = {v} outside [-1, 1]",
                    PauliLabel::from_index(self.n_qubits, i1)?,
                    PauliLabel::from_index(self.n_qubits, i2)?,
                )));
            }
        }
        if (self.values[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidData(format!(
                "entry (all-I, all-I) must be 1, got {}",
                self.values[0]
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Value by canonical label indices.
    pub fn value_at(&self, i1: usize, i2: usize) -> f64 {
        let side = 1usize << (2 * self.n_qubits);
        self.values[i1 * side + i2]
    }

    /// Value by label pair.
    pub fn get(&self, a: &PauliLabel, b: &PauliLabel) -> Result<f64> {
        if a.n_qubits() != self.n_qubits || b.n_qubits() != self.n_qubits {
            return Err(Error::InvalidArgument("label qubit count mismatch".into()));
        }
        Ok(self.value_at(a.index(), b.index()))
    }

    /// The relabeled table with every (a, b) pair transposed; involutive.
    pub fn swapped(&self) -> Self {
        let side = 1usize << (2 * self.n_qubits);
        let mut values = vec![0.0; self.values.len()];
        for i1 in 0..side {
            for i2 in 0..side {
                values[i2 * side + i1] = self.values[i1 * side + i2];
            }
        }
        Self {
            n_qubits: self.n_qubits,
            values,
        }
    }

    /// Entries in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (PauliLabel, PauliLabel, f64)> + '_ {
        let side = 1usize << (2 * self.n_qubits);
        self.values.iter().enumerate().map(move |(pos, &v)| {
            let a = PauliLabel::from_index(self.n_qubits, pos / side).expect("valid index");
            let b = PauliLabel::from_index(self.n_qubits, pos % side).expect("valid index");
            (a, b, v)
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TableEntryJson {
    a: PauliLabel,
    b: PauliLabel,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    n_qubits: usize,
    entries: Vec<TableEntryJson>,
}

impl Serialize for CorrelatorTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .iter()
            .map(|(a, b, value)| TableEntryJson { a, b, value })
            .collect();
        TableJson {
            n_qubits: self.n_qubits,
            entries,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CorrelatorTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TableJson::deserialize(d)?;
        CorrelatorTable::from_entries(
            raw.n_qubits,
            raw.entries.into_iter().map(|e| (e.a, e.b, e.value)),
        )
        .map_err(D::Error::custom)
    }
}

/// A pseudo-density matrix on H₁⊗H₂.
#[derive(Debug, Clone)]
pub struct Pdm {
    matrix: CMat,
    n_qubits: usize,
    orientation: Orientation,
}

impl Pdm {
    /// Validates Hermiticity and unit trace; negative eigenvalues are fine.
    pub fn from_matrix(
        matrix: CMat,
        n_qubits: usize,
        orientation: Orientation,
        tol: &Tolerances,
    ) -> Result<Self> {
        let d2 = 1usize << (2 * n_qubits);
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::InvalidArgument(format!(
                "PDM for n={n_qubits} must be {d2}×{d2}"
            )));
        }
        validate_finite(&matrix)?;
        if !is_hermitian(&matrix, tol.herm) {
            return Err(Error::InvalidData("PDM is not Hermitian".into()));
        }
        let tr = trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidData(format!(
                "PDM trace {} is not 1 within tolerance",
                tr.re
            )));
        }
        Ok(Self {
            matrix,
            n_qubits,
            orientation,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Single-slot dimension 2ⁿ.
    pub fn slot_dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// S·R·S† as an exact index permutation; flips the orientation tag.
    pub fn reverse(&self) -> Pdm {
        Pdm {
            matrix: swap_conjugate(&self.matrix, self.slot_dim()),
            n_qubits: self.n_qubits,
            orientation: match self.orientation {
                Orientation::AsRecorded => Orientation::Swapped,
                Orientation::Swapped => Orientation::AsRecorded,
            },
        }
    }

    /// The marginal that multiplies slot 1 in this PDM's closed form
    /// (ρ for an as-recorded PDM, γ for a swapped one).
    pub fn multiplier_marginal(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        let d = self.slot_dim();
        let kept = partial_trace(&self.matrix, &[d, d], &[0])?;
        DensityMatrix::with_tolerances(kept, vec![2; self.n_qubits], tol)
            .map_err(|e| Error::CorruptPdm(format!("slot-1 marginal invalid: {e}")))
    }

    /// The time-ordered marginals (ρ at t₁, γ at t₂) with default tolerances.
    pub fn marginals(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        self.marginals_with(&Tolerances::default())
    }

    /// The time-ordered marginals (ρ at t₁, γ at t₂).
    pub fn marginals_with(&self, tol: &Tolerances) -> Result<(DensityMatrix, DensityMatrix)> {
        let d = self.slot_dim();
        let keep1 = partial_trace(&self.matrix, &[d, d], &[0])?;
        let keep2 = partial_trace(&self.matrix, &[d, d], &[1])?;
        let (rho_m, gamma_m) = match self.orientation {
            Orientation::AsRecorded => (keep1, keep2),
            Orientation::Swapped => (keep2, keep1),
        };
        let dims = vec![2; self.n_qubits];
        let rho = DensityMatrix::with_tolerances(rho_m, dims.clone(), tol)
            .map_err(|e| Error::CorruptPdm(format!("t1 marginal invalid: {e}")))?;
        let gamma = DensityMatrix::with_tolerances(gamma_m, dims, tol)
            .map_err(|e| Error::CorruptPdm(format!("t2 marginal invalid: {e}")))?;
        Ok((rho, gamma))
    }

    /// Sum of the magnitudes of the negative eigenvalues.
    pub fn negativity(&self) -> Result<f64> {
        let (vals, _) = hermitian_eig(&self.matrix)?;
        Ok(vals.iter().filter(|&&x| x < 0.0).map(|&x| -x).sum())
    }

    /// The correlator the PDM assigns to a label pair (slot order as stored):
    /// Tr[(σ_a ⊗ σ_b) R].
    pub fn correlator(&self, a: &PauliLabel, b: &PauliLabel) -> f64 {
        let pa = crate::pauli::pauli_matrix(a);
        let pb = crate::pauli::pauli_matrix(b);
        trace_product(&kron(&pa, &pb), &self.matrix).re
    }
}

/// Builds R (forward) or R̄ (backward) from a complete table:
/// `R = (1/4ⁿ) Σ ⟨{σ_i1, σ_i2}⟩ σ_i1 ⊗ σ_i2`, backward with the factors
/// swapped. The two directions are exact swap-conjugates of each other.
pub fn pdm_from_correlators(table: &CorrelatorTable, direction: Direction) -> Pdm {
    let n = table.n_qubits();
    let d = 1usize << n;
    let d2 = d * d;
    let basis = enumerate_basis(n).expect("table validated its qubit count");
    let norm = 1.0 / (d2 as f64);

    let mut acc = CMat::zeros((d2, d2));
    for (i1, label1) in basis.iter().enumerate() {
        for (i2, label2) in basis.iter().enumerate() {
            let scale = table.value_at(i1, i2) * norm;
            if scale == 0.0 {
                continue;
            }
            for c1 in 0..d {
                let (r1, v1) = label1.column_entry(c1);
                for c2 in 0..d {
                    let (r2, v2) = label2.column_entry(c2);
                    // product first: v1·v2 is bitwise symmetric, which keeps
                    // the forward/backward constructions exact mirrors
                    let term = (v1 * v2) * scale;
                    match direction {
                        Direction::Forward => acc[[r1 * d + r2, c1 * d + c2]] += term,
                        Direction::Backward => acc[[r2 * d + r1, c2 * d + c1]] += term,
                    }
                }
            }
        }
    }
    let orientation = match direction {
        Direction::Forward => Orientation::AsRecorded,
        Direction::Backward => Orientation::Swapped,
    };
    Pdm {
        matrix: acc,
        n_qubits: n,
        orientation,
    }
}

/// Exact coarse-grained correlators of a (state, channel) experiment:
/// `⟨{σ1, σ2}⟩ = Σ_{a,b = ±1} a·b·Tr[Π_b^{σ2} E(Π_a^{σ1} ρ Π_a^{σ1})]`,
/// with the all-I observable contributing its trivial (identity, zero)
/// projector pair.
pub fn correlators_from_process(rho: &DensityMatrix, ch: &KrausChannel) -> Result<CorrelatorTable> {
    let n = require_match(rho, ch)?;
    let basis = enumerate_basis(n)?;
    let side = basis.len();
    let projectors: Vec<(CMat, CMat)> = basis.iter().map(eigenspace_projectors).collect();
    let mut values = vec![0.0; side * side];
    for (i1, (pi_plus, pi_minus)) in projectors.iter().enumerate() {
        let evolved_plus = ch.apply_raw(&pi_plus.dot(rho.matrix()).dot(pi_plus));
        let evolved_minus = ch.apply_raw(&pi_minus.dot(rho.matrix()).dot(pi_minus));
        for (i2, (pi2_plus, pi2_minus)) in projectors.iter().enumerate() {
            let p_pp = trace_product(pi2_plus, &evolved_plus).re;
            let p_pm = trace_product(pi2_minus, &evolved_plus).re;
            let p_mp = trace_product(pi2_plus, &evolved_minus).re;
            let p_mm = trace_product(pi2_minus, &evolved_minus).re;
            values[i1 * side + i2] = (p_pp + p_mm) - (p_pm + p_mp);
        }
    }
    let table = CorrelatorTable {
        n_qubits: n,
        values,
    };
    table.validate()?;
    Ok(table)
}

/// Shot-sampled correlators: for each pair the probability of outcome
/// product +1 is computed exactly and the estimate is drawn from a binomial
/// with the given shot count. Deterministic per seed; pairs are sampled in
/// canonical order.
pub fn correlators_from_process_sampled(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    shots: u64,
    seed: u64,
) -> Result<CorrelatorTable> {
    use rand::SeedableRng;
    use rand_distr::{Binomial, Distribution};

    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be ≥ 1".into()));
    }
    let exact = correlators_from_process(rho, ch)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let side = 1usize << (2 * exact.n_qubits);
    let mut values = vec![0.0; side * side];
    for i1 in 0..side {
        for i2 in 0..side {
            let p_plus = ((exact.value_at(i1, i2) + 1.0) / 2.0).clamp(0.0, 1.0);
            let k = Binomial::new(shots, p_plus)
                .expect("p in [0,1]")
                .sample(&mut rng);
            values[i1 * side + i2] = 2.0 * (k as f64) / (shots as f64) - 1.0;
        }
    }
    // (all-I, all-I) stays exactly 1: p_plus = 1 draws shots successes
    let table = CorrelatorTable {
        n_qubits: exact.n_qubits,
        values,
    };
    table.validate()?;
    Ok(table)
}

fn require_match(rho: &DensityMatrix, ch: &KrausChannel) -> Result<usize> {
    let n = rho
        .n_qubits()
        .ok_or_else(|| Error::InvalidArgument("state is not qubit shaped".into()))?;
    if ch.dim() != rho.dim() {
        return Err(Error::InvalidArgument(format!(
            "channel dimension {} does not match state dimension {}",
            ch.dim(),
            rho.dim()
        )));
    }
    Ok(n)
}

/// Closed form of the forward PDM: R = ½((ρ⊗1)M + M(ρ⊗1)).
pub fn pdm_closed_form(rho: &DensityMatrix, m: &ChoiMatrix) -> Result<Pdm> {
    let n = rho
        .n_qubits()
        .ok_or_else(|| Error::InvalidArgument("state is not qubit shaped".into()))?;
    if m.d_in() != rho.dim() || m.d_out() != rho.dim() {
        return Err(Error::InvalidArgument(
            "Choi dimensions do not match the state".into(),
        ));
    }
    let lifted = kron(rho.matrix(), &identity(m.d_out()));
    let matrix = anticommutator_half(&lifted, m.matrix());
    Pdm::from_matrix(matrix, n, Orientation::AsRecorded, &Tolerances::default())
}

/// Closed form of the backward PDM: R̄ = ½((γ⊗1)M̄ + M̄(γ⊗1)).
pub fn backward_closed_form(gamma: &DensityMatrix, mbar: &ChoiMatrix) -> Result<Pdm> {
    let n = gamma
        .n_qubits()
        .ok_or_else(|| Error::InvalidArgument("state is not qubit shaped".into()))?;
    if mbar.d_in() != gamma.dim() || mbar.d_out() != gamma.dim() {
        return Err(Error::InvalidArgument(
            "Choi dimensions do not match the state".into(),
        ));
    }
    let lifted = kron(gamma.matrix(), &identity(mbar.d_out()));
    let matrix = anticommutator_half(&lifted, mbar.matrix());
    Pdm::from_matrix(matrix, n, Orientation::Swapped, &Tolerances::default())
}
