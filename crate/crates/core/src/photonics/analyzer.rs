//! The dual-rail photon state analyzer: projects onto any product of a
//! polarization state and a path state.
//!
//! The element realization mirrors the bench layout: a waveplate pair maps
//! the wanted polarization onto H, a 45° plate in the lower rail plus a beam
//! displacer folds the path qubit into polarization, a second waveplate pair
//! maps the wanted (former path) state onto H, and the polarizer passes H in
//! the surviving rail to the detector.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::HybridState;
use crate::photonics::elements::{pol_to_h_angles, OpticalElement, Pol};
use crate::photonics::register::{Photon, PhotonRegister};

/// One analyzer setting: the ideal rank-one projector and the element
/// sequence realizing it.
#[derive(Debug, Clone)]
pub struct AnalyzerSetting {
    /// Normalized target vector over the photon's four modes.
    pub target: Vec<Complex64>,
    /// Waveplate/displacer settings implementing the projection.
    pub elements: Vec<OpticalElement>,
}

fn normalized2(a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if n <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((a / n, b / n))
}

/// Builds the analyzer setting projecting onto
/// `(a|H⟩ + b|V⟩) ⊗ (c|0⟩ + d|1⟩)`.
pub fn analyzer_projector(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
) -> Result<AnalyzerSetting> {
    let (a, b) = normalized2(a, b)?;
    let (c, d) = normalized2(c, d)?;
    let mut target = vec![Complex64::default(); 4];
    for pol in 0..2 {
        for rail in 0..2 {
            let pv = if pol == 0 { a } else { b };
            let rv = if rail == 0 { c } else { d };
            target[pol * 2 + rail] = pv * rv;
        }
    }

    let (q3, h3) = pol_to_h_angles(a, b);
    let (q4, h4) = pol_to_h_angles(c, d);
    let elements = vec![
        // polarization factor → H (both rails)
        OpticalElement::Qwp {
            photon: "b".into(),
            rail: None,
            angle: q3,
        },
        OpticalElement::Hwp {
            photon: "b".into(),
            rail: None,
            angle: h3,
        },
        // fold path into polarization: lower rail H → V, then displace V up
        OpticalElement::hwp_deg("b", Some(1), 45.0),
        OpticalElement::hwp_deg("b", Some(0), 0.0),
        OpticalElement::Bd {
            photon: "b".into(),
            displace: Pol::V,
            shift: -1,
        },
        // former path factor → H, in the surviving rail
        OpticalElement::Qwp {
            photon: "b".into(),
            rail: Some(0),
            angle: q4,
        },
        OpticalElement::Hwp {
            photon: "b".into(),
            rail: Some(0),
            angle: h4,
        },
    ];
    Ok(AnalyzerSetting { target, elements })
}

impl AnalyzerSetting {
    /// Ideal projector matrix `|t⟩⟨t|`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let t = nalgebra::DVector::from_column_slice(&self.target);
        &t * t.adjoint()
    }

    /// Ideal projection probability `|⟨t|ψ⟩|²`.
    pub fn probability(&self, input: &HybridState) -> Result<f64> {
        if input.dims() != [4] {
            return Err(Error::DimensionMismatch(format!(
                "analyzer takes a dual-rail photon, got {:?}",
                input.dims()
            )));
        }
        let amp: Complex64 = self
            .target
            .iter()
            .zip(input.amplitudes().iter())
            .map(|(t, v)| t.conj() * v)
            .sum();
        Ok(amp.norm_sqr())
    }

    /// Probability obtained by driving the input through the element
    /// sequence and detecting H in the upper rail behind the polarizer.
    pub fn probability_via_elements(&self, input: &HybridState) -> Result<f64> {
        if input.dims() != [4] {
            return Err(Error::DimensionMismatch(format!(
                "analyzer takes a dual-rail photon, got {:?}",
                input.dims()
            )));
        }
        let reg = PhotonRegister::new(vec![Photon::dual("b")], input.clone())?;
        let out = reg.apply_circuit(&self.elements)?;
        // PBS + detector: the H, upper-rail mode
        Ok(out.state().amplitudes()[0].norm_sqr())
    }

    /// Probability for a mixed input, `Tr(Π ρ)`.
    pub fn probability_dm(&self, rho: &crate::hilbert::DensityMatrix) -> Result<f64> {
        if rho.dims() != [4] {
            return Err(Error::DimensionMismatch(format!(
                "analyzer takes a dual-rail photon, got {:?}",
                rho.dims()
            )));
        }
        let t = nalgebra::DVector::from_column_slice(&self.target);
        Ok((t.adjoint() * rho.matrix() * &t)[(0, 0)].re)
    }
}
