//! Reconstruction of quantum processes from two-time spatiotemporal
//! measurement data, and inference of the arrow of time.
//!
//! The library is organized around the pseudo-density matrix (PDM): a
//! Hermitian, unit-trace operator on two copies of an n-qubit Hilbert space
//! whose Pauli coefficients are the measured two-time correlators
//! `⟨{σ_i1, σ_i2}⟩`. The same correlator table yields a forward PDM `R` and a
//! backward PDM `R̄ = S R S†` (swap-conjugated), and the central question is
//! which labeling is consistent with a completely positive forward process.
//!
//! Pipeline overview:
//!
//! * [`pauli`] enumerates the n-qubit Pauli basis and its ±1 eigenprojectors.
//! * [`pdm`] builds correlator tables and PDMs (measured, sampled, or in
//!   closed form) and computes marginals, reversal, and negativity.
//! * [`channel`] holds process representations: Kraus sets, Choi–Jamiołkowski
//!   matrices, and Stinespring unitary dilations.
//! * [`extract`] inverts the PDM closed form to recover the Choi matrix of
//!   the process from a PDM and its input marginal.
//! * [`recovery`] constructs reversed-process Choi matrices: the
//!   unitary-dilation recovery map and the Petz/Leifer–Spekkens reversal.
//! * [`infer`] runs the arrow-of-time decision procedure on a correlator
//!   table and reports the verdict with its evidence.
//! * [`oracle`] provides brute-force reference implementations and seeded
//!   random instances for the test suites.
//!
//! A full loop — simulate an experiment, forget the time order, and ask
//! which labeling is physical:
//!
//! ```
//! use qarrow_core::infer::{infer_arrow, InferOptions, Verdict};
//! use qarrow_core::oracle::{random_cptp_channel, random_density_matrix};
//! use qarrow_core::pdm::correlators_from_process;
//!
//! let rho = random_density_matrix(1, 2, 7)?;
//! let channel = random_cptp_channel(1, 3, 8)?;
//! let table = correlators_from_process(&rho, &channel)?;
//!
//! let report = infer_arrow(&table, &InferOptions::default())?;
//! assert!(matches!(report.verdict, Verdict::Forward | Verdict::Either));
//!
//! let mirrored = infer_arrow(&table.swapped(), &InferOptions::default())?;
//! assert!(matches!(mirrored.verdict, Verdict::Backward | Verdict::Either));
//! # Ok::<(), qarrow_core::Error>(())
//! ```

pub mod channel;
pub mod eig;
pub mod error;
pub mod extract;
pub mod infer;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod pdm;
pub mod recovery;
pub mod state;

#[cfg(test)]
pub(crate) mod testfix;

pub use channel::{ChoiMatrix, KrausChannel, UnitaryDilation};
pub use error::Error;
pub use extract::{ExtractionMode, ExtractionResult, MultiplicationSuperoperator};
pub use infer::{ArrowReport, Verdict};
pub use linalg::CMat;
pub use pauli::PauliLabel;
pub use pdm::{CorrelatorTable, Orientation, Pdm};
pub use recovery::RecoveryResult;
pub use state::{DensityMatrix, Tolerances};

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
