//! n-qubit Pauli observables and their ±1 eigenspace projectors.
//!
//! A label is stored as a pair of n-bit masks (X-bits and Z-bits) over the
//! matrix index, so products with basis columns are bitwise: the dense matrix
//! of a label has exactly one nonzero per column, at row `col ⊕ x_mask`, with
//! value `i^{|x∧z|}·(−1)^{|col∧z|}`. Dense matrices are materialized on
//! demand.

use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::linalg::{identity, CMat};
use crate::Result;

/// Largest supported qubit count for basis enumeration.
pub const MAX_QUBITS: usize = 6;

/// One Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    fn from_digit(d: usize) -> Self {
        match d {
            0 => Self::I,
            1 => Self::X,
            2 => Self::Y,
            _ => Self::Z,
        }
    }

    fn digit(self) -> usize {
        match self {
            Self::I => 0,
            Self::X => 1,
            Self::Y => 2,
            Self::Z => 3,
        }
    }

    fn ascii(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli word, e.g. "XZ" = σ_x ⊗ σ_z.
///
/// Canonical index: base-4 with I=0, X=1, Y=2, Z=3, leftmost letter most
/// significant; index 0 is the all-I label. The ASCII string over
/// {I,X,Y,Z} is the wire format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliLabel {
    n: usize,
    /// X component mask over matrix-index bits (leftmost letter ↔ MSB).
    x_mask: u32,
    /// Z component mask over matrix-index bits.
    z_mask: u32,
}

impl PauliLabel {
    /// Label from its canonical base-4 index.
    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        check_qubit_count(n)?;
        if index >= 1usize << (2 * n) {
            return Err(Error::InvalidArgument(format!(
                "pauli index {index} out of range for n={n}"
            )));
        }
        let mut x_mask = 0u32;
        let mut z_mask = 0u32;
        for k in 0..n {
            let digit = (index >> (2 * (n - 1 - k))) & 3;
            let bit = 1u32 << (n - 1 - k);
            match PauliLetter::from_digit(digit) {
                PauliLetter::I => {}
                PauliLetter::X => x_mask |= bit,
                PauliLetter::Y => {
                    x_mask |= bit;
                    z_mask |= bit;
                }
                PauliLetter::Z => z_mask |= bit,
            }
        }
        Ok(Self { n, x_mask, z_mask })
    }

    /// Label from an ASCII word over {I,X,Y,Z}.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s.len();
        check_qubit_count(n)?;
        let mut index = 0usize;
        for ch in s.chars() {
            let digit = match ch {
                'I' => 0,
                'X' => 1,
                'Y' => 2,
                'Z' => 3,
                other => {
                    return Err(Error::InvalidData(format!(
                        "invalid Pauli letter '{other}' in \"{s}\""
                    )))
                }
            };
            index = index * 4 + digit;
        }
        Self::from_index(n, index)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Canonical base-4 index.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for k in 0..self.n {
            idx = idx * 4 + self.letter(k).digit();
        }
        idx
    }

    /// Letter at position k (0 = leftmost).
    pub fn letter(&self, k: usize) -> PauliLetter {
        let bit = 1u32 << (self.n - 1 - k);
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Matrix dimension 2ⁿ.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// The nonzero entry of column `col`: (row, value).
    pub fn column_entry(&self, col: usize) -> (usize, Complex64) {
        let row = col ^ self.x_mask as usize;
        let i_pow = (self.x_mask & self.z_mask).count_ones() % 4;
        let mut val = match i_pow {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if (col as u32 & self.z_mask).count_ones() % 2 == 1 {
            val = -val;
        }
        (row, val)
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n {
            write!(f, "{}", self.letter(k).ascii())?;
        }
        Ok(())
    }
}

impl Serialize for PauliLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PauliLabel::parse(&s).map_err(D::Error::custom)
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubit count {n} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// All 4ⁿ labels in canonical index order; the first is all-I.
pub fn enumerate_basis(n: usize) -> Result<Vec<PauliLabel>> {
    check_qubit_count(n)?;
    (0..1usize << (2 * n))
        .map(|i| PauliLabel::from_index(n, i))
        .collect()
}

/// Dense 2ⁿ×2ⁿ matrix of a label (Kronecker product of its letters).
pub fn pauli_matrix(label: &PauliLabel) -> CMat {
    let d = label.dim();
    let mut m = CMat::zeros((d, d));
    for col in 0..d {
        let (row, val) = label.column_entry(col);
        m[[row, col]] = val;
    }
    m
}

/// Projectors (Π₊, Π₋) = ((1 ± σ)/2) onto the ±1 eigenspaces.
///
/// The all-I observable has only the +1 outcome; by convention it returns
/// (identity, zero).
pub fn eigenspace_projectors(label: &PauliLabel) -> (CMat, CMat) {
    let d = label.dim();
    if label.is_identity() {
        return (identity(d), CMat::zeros((d, d)));
    }
    let m = pauli_matrix(label);
    let half = Complex64::new(0.5, 0.0);
    let mut plus = m.mapv(|z| z * half);
    let mut minus = m.mapv(|z| -z * half);
    for i in 0..d {
        plus[[i, i]] += half;
        minus[[i, i]] += half;
    }
    (plus, minus)
}
