//! Fixtures shared by the integration suites: the decohering worked example
//! with its closed-form matrices, and small assertion helpers.

#![allow(dead_code)]

use num_complex::Complex64;
use qarrow_core::channel::KrausChannel;
use qarrow_core::linalg::CMat;
use qarrow_core::state::DensityMatrix;

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// ρ_A = (1−a)|0⟩⟨0| + a|+⟩⟨+|.
pub fn rho_a(a: f64) -> DensityMatrix {
    let mut m = CMat::zeros((2, 2));
    m[[0, 0]] = re(1.0 - a / 2.0);
    m[[0, 1]] = re(a / 2.0);
    m[[1, 0]] = re(a / 2.0);
    m[[1, 1]] = re(a / 2.0);
    DensityMatrix::new(m, vec![2]).unwrap()
}

/// γ_B = diag(1−a/2, a/2).
pub fn gamma_b(a: f64) -> DensityMatrix {
    let mut m = CMat::zeros((2, 2));
    m[[0, 0]] = re(1.0 - a / 2.0);
    m[[1, 1]] = re(a / 2.0);
    DensityMatrix::new(m, vec![2]).unwrap()
}

/// Kraus set {|0⟩⟨0|, |1⟩⟨1|}.
pub fn decohering_channel() -> KrausChannel {
    let mut k0 = CMat::zeros((2, 2));
    k0[[0, 0]] = re(1.0);
    let mut k1 = CMat::zeros((2, 2));
    k1[[1, 1]] = re(1.0);
    KrausChannel::new(vec![k0, k1]).unwrap()
}

/// Forward CJ matrix of the decohering channel: diag(1,0,0,1).
pub fn decohering_m() -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re(1.0);
    m[[3, 3]] = re(1.0);
    m
}

/// Forward PDM (1/4)[[4−2a,0,a,0],[0,0,0,a],[a,0,0,0],[0,a,0,2a]].
pub fn decohering_r(a: f64) -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re((4.0 - 2.0 * a) / 4.0);
    m[[0, 2]] = re(a / 4.0);
    m[[1, 3]] = re(a / 4.0);
    m[[2, 0]] = re(a / 4.0);
    m[[3, 1]] = re(a / 4.0);
    m[[3, 3]] = re(a / 2.0);
    m
}

/// Backward PDM (1/4)[[4−2a,a,0,0],[a,0,0,0],[0,0,0,a],[0,0,a,2a]].
pub fn decohering_rbar(a: f64) -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re((4.0 - 2.0 * a) / 4.0);
    m[[0, 1]] = re(a / 4.0);
    m[[1, 0]] = re(a / 4.0);
    m[[2, 3]] = re(a / 4.0);
    m[[3, 2]] = re(a / 4.0);
    m[[3, 3]] = re(a / 2.0);
    m
}

/// Reversed-process CJ matrix with off-diagonal a/(4−2a) and the ½ block.
pub fn decohering_mbar(a: f64) -> CMat {
    let c = a / (4.0 - 2.0 * a);
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re(1.0);
    m[[0, 1]] = re(c);
    m[[1, 0]] = re(c);
    m[[2, 3]] = re(0.5);
    m[[3, 2]] = re(0.5);
    m[[3, 3]] = re(1.0);
    m
}

/// The two negative eigenvalues of the reversed-process CJ matrix.
pub fn decohering_mbar_negative_eigs(a: f64) -> (f64, f64) {
    (
        (1.0 - 2.0f64.sqrt()) / 2.0,
        0.5 - (a * a + (2.0 - a) * (2.0 - a)).sqrt() / (2.0 * (2.0 - a)),
    )
}

/// Identity channel on |0⟩: [[1,0,0,0],[0,0,½,0],[0,½,0,0],[0,0,0,0]].
pub fn identity_on_zero_r() -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re(1.0);
    m[[1, 2]] = re(0.5);
    m[[2, 1]] = re(0.5);
    m
}

/// Prints the per-criterion verdict line and enforces the runtime budget.
pub fn finish_criterion(number: usize, name: &str, started: std::time::Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {number:2} ({name}): PASS in {elapsed:.2}s (budget {budget_s}s)");
    assert!(
        elapsed < budget_s,
        "criterion {number} exceeded its runtime budget: {elapsed:.2}s ≥ {budget_s}s"
    );
}
