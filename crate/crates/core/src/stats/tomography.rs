//! Four-level state tomography from analyzer-projector counts: linear
//! inversion followed by projection onto the physical cone.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eigen, DensityMatrix};
use crate::photonics::{analyzer_projector, AnalyzerSetting};

/// The six canonical single-qubit analysis states.
fn six_states() -> Vec<(Complex64, Complex64)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    vec![
        (c(1.0, 0.0), c(0.0, 0.0)), // H / upper
        (c(0.0, 0.0), c(1.0, 0.0)), // V / lower
        (c(r, 0.0), c(r, 0.0)),     // diagonal
        (c(r, 0.0), c(-r, 0.0)),    // anti-diagonal
        (c(r, 0.0), c(0.0, r)),     // right circular
        (c(r, 0.0), c(0.0, -r)),    // left circular
    ]
}

/// The 36-setting overcomplete analyzer set: every product of the six
/// polarization states with the six path states.
pub fn standard_tomo_settings() -> Vec<AnalyzerSetting> {
    let states = six_states();
    let mut settings = Vec::with_capacity(36);
    for &(a, b) in &states {
        for &(c, d) in &states {
            settings.push(analyzer_projector(a, b, c, d).expect("unit factors"));
        }
    }
    settings
}

/// Hermitian operator basis of the 4×4 matrices: diagonal units, then the
/// symmetric and antisymmetric pair combinations (16 real parameters).
fn hermitian_basis() -> Vec<DMatrix<Complex64>> {
    let mut basis = Vec::with_capacity(16);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    for k in 0..4 {
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m[(k, k)] = one;
        basis.push(m);
    }
    for r in 0..4 {
        for c in (r + 1)..4 {
            let mut m = DMatrix::<Complex64>::zeros(4, 4);
            m[(r, c)] = one;
            m[(c, r)] = one;
            basis.push(m);
            let mut m = DMatrix::<Complex64>::zeros(4, 4);
            m[(r, c)] = -i;
            m[(c, r)] = i;
            basis.push(m);
        }
    }
    basis
}

/// Reconstructs a four-level density matrix from measured projection
/// frequencies `freqs[i] ≈ Tr(Π_i ρ)` by least squares, then clips negative
/// eigenvalues and renormalizes the trace.
pub fn tomography_ququart(
    settings: &[AnalyzerSetting],
    freqs: &[f64],
) -> Result<DensityMatrix> {
    if settings.len() != freqs.len() {
        return Err(Error::LengthMismatch {
            expected: settings.len(),
            got: freqs.len(),
        });
    }
    if settings.len() < 16 {
        return Err(Error::RankDeficient {
            rank: settings.len(),
            needed: 16,
        });
    }
    let basis = hermitian_basis();
    let mut design = DMatrix::<f64>::zeros(settings.len(), 16);
    for (row, s) in settings.iter().enumerate() {
        let proj = s.projector();
        for (col, b) in basis.iter().enumerate() {
            design[(row, col)] = (&proj * b).trace().re;
        }
    }
    let svd = design.clone().svd(true, true);
    let tol = 1e-9 * svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < 16 {
        return Err(Error::RankDeficient { rank, needed: 16 });
    }
    let rhs = DVector::from_column_slice(freqs);
    let x = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::InvalidConfig(format!("least squares failed: {e}")))?;

    let mut mat = DMatrix::<Complex64>::zeros(4, 4);
    for (k, b) in basis.iter().enumerate() {
        mat += b * Complex64::new(x[k], 0.0);
    }
    // exact Hermitization against rounding
    let mat = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);

    // physical-cone projection: clip negative eigenvalues, renormalize
    let (vals, vecs) = hermitian_eigen(&mat);
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut out = DMatrix::<Complex64>::zeros(4, 4);
    for (k, &v) in clipped.iter().enumerate() {
        let col = vecs.column(k);
        out += (col * col.adjoint()) * Complex64::new(v / total, 0.0);
    }
    DensityMatrix::new(&[4], out)
}
