//! Mini-grammar for the `--state` and `--channel` arguments.
//!
//! States: `|0>`, `mixed`, `rhoA:a=<x>`, `file=<path>` (matrix JSON).
//! Channels: `identity`, `decohere`, `depolarize:p=<x>`,
//! `unitary:file=<path>`, `file=<path>` (channel JSON).

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use qarrow_core::channel::{ChannelJson, KrausChannel};
use qarrow_core::linalg::{identity, CMat, MatrixJson};
use qarrow_core::pauli::{enumerate_basis, pauli_matrix};
use qarrow_core::state::DensityMatrix;

pub fn parse_state(spec: &str, n: usize) -> Result<DensityMatrix, String> {
    let d = 1usize
        .checked_shl(n as u32)
        .filter(|_| (1..=qarrow_core::pauli::MAX_QUBITS).contains(&n))
        .ok_or_else(|| format!("unsupported qubit count {n}"))?;
    match spec {
        "|0>" => Ok(DensityMatrix::pure_zero(n)),
        "mixed" => Ok(DensityMatrix::maximally_mixed(n)),
        _ => {
            if let Some(arg) = spec.strip_prefix("rhoA:a=") {
                if n != 1 {
                    return Err("rhoA is a single-qubit preset; use --n 1".into());
                }
                let a: f64 = arg
                    .parse()
                    .map_err(|_| format!("rhoA: cannot parse a = {arg:?}"))?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(format!("rhoA: a = {a} outside [0, 1]"));
                }
                let mut m = CMat::zeros((2, 2));
                m[[0, 0]] = Complex64::new(1.0 - a / 2.0, 0.0);
                m[[0, 1]] = Complex64::new(a / 2.0, 0.0);
                m[[1, 0]] = Complex64::new(a / 2.0, 0.0);
                m[[1, 1]] = Complex64::new(a / 2.0, 0.0);
                DensityMatrix::new(m, vec![2]).map_err(|e| e.to_string())
            } else if let Some(path) = spec.strip_prefix("file=") {
                let m = read_matrix(path)?;
                if m.nrows() != d {
                    return Err(format!(
                        "state file is {}×{} but --n {n} needs {d}×{d}",
                        m.nrows(),
                        m.ncols()
                    ));
                }
                DensityMatrix::new(m, vec![2; n]).map_err(|e| e.to_string())
            } else {
                Err(format!(
                    "unknown state spec {spec:?}; expected |0>, mixed, rhoA:a=<x>, or file=<path>"
                ))
            }
        }
    }
}

pub fn parse_channel(spec: &str, n: usize) -> Result<KrausChannel, String> {
    let d = 1usize << n;
    match spec {
        "identity" => KrausChannel::from_unitary(identity(d)).map_err(|e| e.to_string()),
        "decohere" => {
            // computational-basis dephasing: Kraus {|b⟩⟨b|}
            let ops = (0..d)
                .map(|b| {
                    let mut k = CMat::zeros((d, d));
                    k[[b, b]] = Complex64::new(1.0, 0.0);
                    k
                })
                .collect();
            KrausChannel::new(ops).map_err(|e| e.to_string())
        }
        _ => {
            if let Some(arg) = spec.strip_prefix("depolarize:p=") {
                let p: f64 = arg
                    .parse()
                    .map_err(|_| format!("depolarize: cannot parse p = {arg:?}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("depolarize: p = {p} outside [0, 1]"));
                }
                let basis = enumerate_basis(n).map_err(|e| e.to_string())?;
                let count = basis.len() as f64;
                let mut ops = Vec::with_capacity(basis.len());
                for (i, label) in basis.iter().enumerate() {
                    let weight = if i == 0 {
                        (1.0 - p * (count - 1.0) / count).sqrt()
                    } else {
                        (p / count).sqrt()
                    };
                    ops.push(pauli_matrix(label).mapv(|z| z * weight));
                }
                KrausChannel::new(ops).map_err(|e| e.to_string())
            } else if let Some(path) = spec.strip_prefix("unitary:file=") {
                let u = read_matrix(path)?;
                if u.nrows() != d {
                    return Err(format!(
                        "unitary file is {}×{} but --n {n} needs {d}×{d}",
                        u.nrows(),
                        u.ncols()
                    ));
                }
                KrausChannel::from_unitary(u).map_err(|e| e.to_string())
            } else if let Some(path) = spec.strip_prefix("file=") {
                let text = fs::read_to_string(Path::new(path))
                    .map_err(|e| format!("cannot read {path}: {e}"))?;
                let parsed: ChannelJson =
                    serde_json::from_str(&text).map_err(|e| format!("channel JSON: {e}"))?;
                let ch = parsed.to_channel().map_err(|e| e.to_string())?;
                if ch.dim() != d {
                    return Err(format!(
                        "channel file has dimension {} but --n {n} needs {d}",
                        ch.dim()
                    ));
                }
                Ok(ch)
            } else {
                Err(format!(
                    "unknown channel spec {spec:?}; expected identity, decohere, \
                     depolarize:p=<x>, unitary:file=<path>, or file=<path>"
                ))
            }
        }
    }
}

fn read_matrix(path: &str) -> Result<CMat, String> {
    let text =
        fs::read_to_string(Path::new(path)).map_err(|e| format!("cannot read {path}: {e}"))?;
    let parsed: MatrixJson =
        serde_json::from_str(&text).map_err(|e| format!("matrix JSON: {e}"))?;
    parsed.to_matrix().map_err(|e| e.to_string())
}
