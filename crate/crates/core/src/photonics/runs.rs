//! End-to-end optical pipelines: state preparation, the entangling gate,
//! and the post-selected decoding that leaves the transferred state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HybridState};
use crate::photonics::elements::DistinguishabilityModel;
use crate::photonics::gate::{cx4_register, optical_cx4, Cx4Variant, GateOutput};
use crate::photonics::register::{MixedRegister, Photon, PhotonRegister};
use crate::TOL_ACCUM;

fn check_normalized(norm_sqr: f64) -> Result<()> {
    if (norm_sqr - 1.0).abs() > TOL_ACCUM {
        return Err(Error::NotNormalized(norm_sqr.sqrt()));
    }
    Ok(())
}

/// Control pair `ε|HH⟩ + ζ|VV⟩` on photons (a1, a2).
pub fn prepare_system_a(eps: Complex64, zeta: Complex64) -> Result<PhotonRegister> {
    check_normalized(eps.norm_sqr() + zeta.norm_sqr())?;
    let mut amps = vec![Complex64::default(); 4];
    amps[0] = eps;
    amps[3] = zeta;
    PhotonRegister::new(
        vec![Photon::pol("a1"), Photon::pol("a2")],
        HybridState::new(&[2, 2], &amps)?,
    )
}

/// Dual-rail photon `η|H0⟩ + κ|H1⟩ + λ|V0⟩ + μ|V1⟩`.
pub fn prepare_system_b(
    eta: Complex64,
    kappa: Complex64,
    lambda: Complex64,
    mu: Complex64,
) -> Result<PhotonRegister> {
    check_normalized(eta.norm_sqr() + kappa.norm_sqr() + lambda.norm_sqr() + mu.norm_sqr())?;
    PhotonRegister::new(
        vec![Photon::dual("b")],
        HybridState::new(&[4], &[eta, kappa, lambda, mu])?,
    )
}

/// Source-noise hook: the control pair with its cross coherence reduced to
/// weight q (the distinguishable fraction of emitted pairs dephases).
pub fn prepare_system_a_degraded(
    eps: Complex64,
    zeta: Complex64,
    model: &DistinguishabilityModel,
) -> Result<MixedRegister> {
    let pure = prepare_system_a(eps, zeta)?;
    let q = model.q();
    let psi = DensityMatrix::from_pure(pure.state());
    let mut mat = psi.matrix() * Complex64::new(q, 0.0);
    // |HH⟩ is joint level 0, |VV⟩ is joint level 3
    mat[(0, 0)] += Complex64::new((1.0 - q) * eps.norm_sqr(), 0.0);
    mat[(3, 3)] += Complex64::new((1.0 - q) * zeta.norm_sqr(), 0.0);
    MixedRegister::new(
        pure.photons().to_vec(),
        DensityMatrix::new(&[2, 2], mat)?,
    )
}

/// Result of a full optical run: the decoded output state as a density
/// matrix (unit trace) and the overall post-selection success probability.
#[derive(Debug, Clone)]
pub struct OpticalRunResult {
    pub state: DensityMatrix,
    pub success_probability: f64,
}

const DIAG: [Complex64; 2] = [
    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
];

/// Four-to-two transfer on the bench: control pair at `(1/√2, 1/√2)`, target
/// prepared with the given ququart amplitudes, entangling gate, then b's
/// horizontal components are kept (converted to a polarization qubit) and
/// the second control photon is detected diagonal. The output is the
/// (a1 polarization, b) two-qubit state.
pub fn run_optical_4to2(
    b_coeffs: &[Complex64; 4],
    model: &DistinguishabilityModel,
) -> Result<OpticalRunResult> {
    let r2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let a = prepare_system_a(r2, r2)?;
    let b = prepare_system_b(b_coeffs[0], b_coeffs[1], b_coeffs[2], b_coeffs[3])?;
    let reg = cx4_register(a.state(), b.state())?;
    let (out, _) = optical_cx4(&reg, Cx4Variant::Standard, model)?;
    match out {
        GateOutput::Pure(reg) => {
            let reg = reg.restrict_photon("b", &[0, 1])?;
            let reg = reg.project_photon("a2", &DIAG)?;
            Ok(OpticalRunResult {
                success_probability: reg.success_probability(),
                state: DensityMatrix::from_pure(&reg.state().renormalize()),
            })
        }
        GateOutput::Mixed(reg) => {
            let reg = reg.restrict_photon("b", &[0, 1])?;
            let reg = reg.project_photon("a2", &DIAG)?;
            Ok(OpticalRunResult {
                success_probability: reg.success_probability(),
                state: reg.rho().renormalize(),
            })
        }
    }
}

/// Ideal decoded output of the four-to-two run: `(η, κ | λ, μ)` over the
/// (a1, b) qubit pair.
pub fn ideal_4to2_target(b_coeffs: &[Complex64; 4]) -> Result<HybridState> {
    HybridState::new(&[2, 2], b_coeffs)
}

/// Two-to-four transfer on the bench: control pair `(ε, ζ)`, target carrying
/// `(η, κ)` on its horizontal modes, entangling gate, then both control
/// photons are detected diagonal, leaving the four-mode photon with the
/// whole payload.
pub fn run_optical_2to4(
    eps: Complex64,
    zeta: Complex64,
    eta: Complex64,
    kappa: Complex64,
    model: &DistinguishabilityModel,
) -> Result<OpticalRunResult> {
    let a = prepare_system_a(eps, zeta)?;
    let b = prepare_system_b(eta, kappa, Complex64::default(), Complex64::default())?;
    let reg = cx4_register(a.state(), b.state())?;
    let (out, _) = optical_cx4(&reg, Cx4Variant::Standard, model)?;
    match out {
        GateOutput::Pure(reg) => {
            let reg = reg.project_photon("a1", &DIAG)?;
            let reg = reg.project_photon("a2", &DIAG)?;
            Ok(OpticalRunResult {
                success_probability: reg.success_probability(),
                state: DensityMatrix::from_pure(&reg.state().renormalize()),
            })
        }
        GateOutput::Mixed(reg) => {
            let reg = reg.project_photon("a1", &DIAG)?;
            let reg = reg.project_photon("a2", &DIAG)?;
            Ok(OpticalRunResult {
                success_probability: reg.success_probability(),
                state: reg.rho().renormalize(),
            })
        }
    }
}

/// Ideal decoded output of the two-to-four run: `εη|0⟩ + εκ|1⟩ + ζη|2⟩ + ζκ|3⟩`.
pub fn ideal_2to4_target(
    eps: Complex64,
    zeta: Complex64,
    eta: Complex64,
    kappa: Complex64,
) -> Result<HybridState> {
    HybridState::new(
        &[4],
        &[eps * eta, eps * kappa, zeta * eta, zeta * kappa],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn preparations_validate_norms() {
        assert!(prepare_system_a(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(prepare_system_b(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let a = prepare_system_a(c(r2, 0.0), c(r2, 0.0)).unwrap();
        assert_relative_eq!(a.state().amplitude(&[0, 0]).re, r2, epsilon = 1e-15);
        assert_relative_eq!(a.state().amplitude(&[1, 1]).re, r2, epsilon = 1e-15);
        // ε = 1 is the plain |HH⟩ product
        let a = prepare_system_a(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(a.state().amplitude(&[0, 0]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degraded_preparation_interpolates() {
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let m = DistinguishabilityModel::new(0.5).unwrap();
        let reg = prepare_system_a_degraded(c(r2, 0.0), c(r2, 0.0), &m).unwrap();
        let rho = reg.rho();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(rho.matrix()[(0, 3)].re, 0.25, epsilon = 1e-12);
        assert_relative_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ideal_4to2_run_reaches_fidelity_one() {
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let coeffs = [c(r2, 0.0), c(r2, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = run_optical_4to2(&coeffs, &DistinguishabilityModel::ideal()).unwrap();
        let target = ideal_4to2_target(&coeffs).unwrap();
        assert_relative_eq!(out.state.fidelity(&target).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(out.success_probability, 1.0 / 108.0, epsilon = 1e-13);
    }

    #[test]
    fn ideal_2to4_run_reaches_fidelity_one() {
        // logical |1⟩_A ⊗ |0⟩_B arrives as the third ququart level
        let out = run_optical_2to4(
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            &DistinguishabilityModel::ideal(),
        )
        .unwrap();
        let target = HybridState::basis(&[4], &[2]).unwrap();
        assert_relative_eq!(out.state.fidelity(&target).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(out.success_probability, 1.0 / 108.0, epsilon = 1e-13);
    }

    #[test]
    fn noisy_runs_lose_fidelity_monotonically() {
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let coeffs = [c(r2, 0.0), c(0.0, 0.0), c(r2, 0.0), c(0.0, 0.0)];
        let target = ideal_4to2_target(&coeffs).unwrap();
        let mut last = f64::INFINITY;
        let mut at_0826 = 0.0;
        for q in [1.0, 0.9, 0.826, 0.7] {
            let model = DistinguishabilityModel::new(q).unwrap();
            let out = run_optical_4to2(&coeffs, &model).unwrap();
            let f = out.state.fidelity(&target).unwrap();
            assert!(f <= last + 1e-12, "fidelity rose from {last} to {f} at q={q}");
            if q == 0.826 {
                at_0826 = f;
            }
            last = f;
        }
        assert!(at_0826 > 2.0 / 3.0, "fidelity at q=0.826 is {at_0826}");
    }
}
