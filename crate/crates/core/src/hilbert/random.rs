//! Haar-random states and unitaries for tests, calibration, and the CLI
//! check commands.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{GateMatrix, HybridState};

/// Haar-random pure state on the given register (complex Gaussian
/// amplitudes, normalized).
pub fn random_state<R: Rng>(dims: &[usize], rng: &mut R) -> HybridState {
    let total: usize = dims.iter().product();
    let amps: Vec<Complex64> = (0..total)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    HybridState::new(dims, &amps).expect("Gaussian vector is almost surely nonzero")
}

/// Haar-random unitary of the given dimension: QR of a Ginibre matrix with
/// the R-diagonal phases divided out.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> GateMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase.conj();
        }
    }
    GateMatrix::unitary(&[dim], q).expect("QR factor is unitary")
}
