//! Shared fixtures for the unit tests: the decohering-channel worked example
//! and its closed-form matrices, parameterized by the state weight `a`.

use num_complex::Complex64;

use crate::channel::KrausChannel;
use crate::linalg::{CMat, ONE};
use crate::state::DensityMatrix;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// ρ_A = (1−a)|0⟩⟨0| + a|+⟩⟨+| = [[1−a/2, a/2], [a/2, a/2]].
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

/// The decohering channel with Kraus set {|0⟩⟨0|, |1⟩⟨1|}.
pub fn decohering_channel() -> KrausChannel {
    let mut k0 = CMat::zeros((2, 2));
    k0[[0, 0]] = ONE;
    let mut k1 = CMat::zeros((2, 2));
    k1[[1, 1]] = ONE;
    KrausChannel::new(vec![k0, k1]).unwrap()
}

/// Forward CJ matrix of the decohering channel: diag(1,0,0,1).
pub fn decohering_m() -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = ONE;
    m[[3, 3]] = ONE;
    m
}

/// Forward PDM: (1/4)[[4−2a,0,a,0],[0,0,0,a],[a,0,0,0],[0,a,0,2a]].
pub fn decohering_r(a: f64) -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re((4.0 - 2.0 * a) / 4.0);
    m[[0, 2]] = re(a / 4.0);
    m[[1, 3]] = re(a / 4.0);
    m[[2, 0]] = re(a / 4.0);
    m[[3, 1]] = re(a / 4.0);
    m[[3, 3]] = re(2.0 * a / 4.0);
    m
}

/// Backward PDM: (1/4)[[4−2a,a,0,0],[a,0,0,0],[0,0,0,a],[0,0,a,2a]].
pub fn decohering_rbar(a: f64) -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = re((4.0 - 2.0 * a) / 4.0);
    m[[0, 1]] = re(a / 4.0);
    m[[1, 0]] = re(a / 4.0);
    m[[2, 3]] = re(a / 4.0);
    m[[3, 2]] = re(a / 4.0);
    m[[3, 3]] = re(2.0 * a / 4.0);
    m
}

/// Reversed-process CJ matrix:
/// [[1, a/(4−2a), 0, 0], [a/(4−2a), 0, 0, 0], [0, 0, 0, ½], [0, 0, ½, 1]].
pub fn decohering_mbar(a: f64) -> CMat {
    let c = a / (4.0 - 2.0 * a);
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = ONE;
    m[[0, 1]] = re(c);
    m[[1, 0]] = re(c);
    m[[2, 3]] = re(0.5);
    m[[3, 2]] = re(0.5);
    m[[3, 3]] = ONE;
    m
}

/// The two negative eigenvalues of the reversed-process CJ matrix:
/// (1−√2)/2 and ½ − √(a²+(2−a)²)/(2(2−a)).
pub fn decohering_mbar_negative_eigs(a: f64) -> (f64, f64) {
    (
        (1.0 - 2.0f64.sqrt()) / 2.0,
        0.5 - (a * a + (2.0 - a) * (2.0 - a)).sqrt() / (2.0 * (2.0 - a)),
    )
}

/// Identity-channel PDM for |0⟩: [[1,0,0,0],[0,0,½,0],[0,½,0,0],[0,0,0,0]].
pub fn identity_on_zero_r() -> CMat {
    let mut m = CMat::zeros((4, 4));
    m[[0, 0]] = ONE;
    m[[1, 2]] = re(0.5);
    m[[2, 1]] = re(0.5);
    m
}
