//! The post-selected polarization CNOT and the qubit-ququart entangling gate
//! built from two of them.
//!
//! One CNOT block superposes a control photon with one rail of the dual-rail
//! photon on the beamsplitter. Loss elements balance the polarization
//! amplitudes so the coincidence map is uniform at 1/3, and the waveplates
//! around the block fix the frame so the block acts as a clean CNOT
//! conditioned on the control being vertical. Two blocks, one per rail with
//! its own control photon, compose into the full controlled half-space swap
//! on the encoded qubit-ququart pair; a final phase plate on the second
//! control arm squares up the sign between the two logical control branches.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HybridState};
use crate::photonics::elements::{DistinguishabilityModel, Interference, OpticalElement, LOSS_V_AMP};
use crate::photonics::register::{MixedRegister, Photon, PhotonRegister};

/// Which construction of the entangling gate to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cx4Variant {
    /// Loss elements in both arms; success probability 1/27 for any input.
    Standard,
    /// Loss elements removed; the control pair is re-prepared with the
    /// strong branch divided by 3 and the rail plates set to 15°. Valid for
    /// targets supported on the horizontal modes.
    SimplifiedPreBiased,
}

/// Output of a post-selected optical gate: pure when every photon pair
/// interferes perfectly, mixed otherwise.
#[derive(Debug, Clone)]
pub enum GateOutput {
    Pure(PhotonRegister),
    Mixed(MixedRegister),
}

impl GateOutput {
    pub fn success_probability(&self) -> f64 {
        match self {
            Self::Pure(r) => r.success_probability(),
            Self::Mixed(r) => r.success_probability(),
        }
    }
}

/// Elements of one beamsplitter block between `control` and the given rail
/// of `target`: the raw interference core of a polarization CNOT, before the
/// frame plates that fix its conditioning.
pub fn cnot_block(
    control: &str,
    target: &str,
    rail: usize,
    variant: Cx4Variant,
) -> Vec<OpticalElement> {
    let mut v = Vec::new();
    if variant == Cx4Variant::Standard {
        v.push(OpticalElement::Loss {
            photon: control.into(),
            rail: None,
            v_amplitude: LOSS_V_AMP,
        });
    }
    let pre_angle = match variant {
        Cx4Variant::Standard => 22.5,
        Cx4Variant::SimplifiedPreBiased => 15.0,
    };
    v.push(OpticalElement::hwp_deg(target, Some(rail), pre_angle));
    if variant == Cx4Variant::Standard {
        v.push(OpticalElement::Loss {
            photon: target.into(),
            rail: Some(rail),
            v_amplitude: LOSS_V_AMP,
        });
    }
    v.push(OpticalElement::Ppbs {
        control: control.into(),
        target: target.into(),
        rail,
    });
    v.push(OpticalElement::hwp_deg(target, Some(rail), 22.5));
    v
}

/// Full element list of the entangling gate on photons (a1, a2, b).
///
/// The interference puts the conditional flip on the horizontal control
/// branch with a sign; the trailing plates — a π phase on a1's vertical
/// component and a 45° plate across both rails of b — turn that into the
/// flip-on-vertical gate with no residual phases.
pub fn cx4_circuit(variant: Cx4Variant) -> Vec<OpticalElement> {
    let mut v = cnot_block("a1", "b", 0, variant);
    v.extend(cnot_block("a2", "b", 1, variant));
    v.push(OpticalElement::PhaseShift {
        photon: "a1".into(),
        rail: None,
        phase: std::f64::consts::PI,
    });
    v.push(OpticalElement::hwp_deg("b", None, 45.0));
    v
}

/// Runs one post-selected polarization CNOT (standard construction, with its
/// own frame plates) between a control photon and the given rail of a
/// dual-rail photon: flips the target's polarization in that rail when the
/// control is vertical. Returns the post-selected register and its success
/// probability.
pub fn ppbs_cnot(
    register: &PhotonRegister,
    control: &str,
    target: &str,
    rail: usize,
    model: &DistinguishabilityModel,
) -> Result<(GateOutput, f64)> {
    let mut elements = cnot_block(control, target, rail, Cx4Variant::Standard);
    elements.push(OpticalElement::PhaseShift {
        photon: control.into(),
        rail: None,
        phase: std::f64::consts::PI,
    });
    elements.push(OpticalElement::hwp_deg(target, Some(rail), 45.0));
    run_elements(register, &elements, model)
}

/// Drives a circuit under the two-point overlap mixture: a weight-q branch
/// where every photon pair interferes and a weight-(1 − q) branch where all
/// pairs are classical. At q = 1 the evolution stays a pure state.
fn run_elements(
    register: &PhotonRegister,
    elements: &[OpticalElement],
    model: &DistinguishabilityModel,
) -> Result<(GateOutput, f64)> {
    let before = register.success_probability();
    if model.is_ideal() {
        let out = register.apply_circuit(elements)?;
        let p = out.success_probability() / before;
        return Ok((GateOutput::Pure(out), p));
    }
    let q = model.q();
    let start = MixedRegister::from_pure(register);
    let coherent = start.apply_circuit(elements, Interference::Coherent)?;
    let classical = start.apply_circuit(elements, Interference::Classical)?;
    let mixed_mat = coherent.rho().matrix() * Complex64::new(q, 0.0)
        + classical.rho().matrix() * Complex64::new(1.0 - q, 0.0);
    let rho = DensityMatrix::unnormalized(coherent.rho().dims(), mixed_mat)?;
    let mixed = MixedRegister::new(coherent.photons().to_vec(), rho)?;
    let p = mixed.success_probability() / before;
    Ok((GateOutput::Mixed(mixed), p))
}

/// The standard register layout for the entangling gate.
pub fn cx4_register(a_pair: &HybridState, b: &HybridState) -> Result<PhotonRegister> {
    if a_pair.dims() != [2, 2] {
        return Err(Error::Register(format!(
            "control pair must be two polarization photons, got {:?}",
            a_pair.dims()
        )));
    }
    if b.dims() != [4] {
        return Err(Error::Register(format!(
            "target must be one dual-rail photon, got {:?}",
            b.dims()
        )));
    }
    PhotonRegister::new(
        vec![Photon::pol("a1"), Photon::pol("a2"), Photon::dual("b")],
        a_pair.tensor(b),
    )
}

/// Checks the register encodes a logical qubit on (a1, a2): support only on
/// `|HH⟩` and `|VV⟩`. Returns the pair amplitudes (ε, ζ) and the b state; the
/// register must be a product across the (a-pair | b) cut for the simplified
/// gate's re-preparation.
fn decode_product(reg: &PhotonRegister) -> Result<(Complex64, Complex64, Vec<Complex64>)> {
    let s = reg.state();
    // leakage out of the logical control span
    let mut leak = 0.0;
    for m in 0..4 {
        leak += s.amplitude(&[0, 1, m]).norm_sqr() + s.amplitude(&[1, 0, m]).norm_sqr();
    }
    if leak > crate::TOL_ACCUM {
        return Err(Error::Register(format!(
            "control photons leave the encoded span (weight {leak:.3e})"
        )));
    }
    let hh: Vec<Complex64> = (0..4).map(|m| s.amplitude(&[0, 0, m])).collect();
    let vv: Vec<Complex64> = (0..4).map(|m| s.amplitude(&[1, 1, m])).collect();
    let nh: f64 = hh.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nv: f64 = vv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    // product check: the two control branches must share one target state
    if nh > 1e-9 && nv > 1e-9 {
        let dot: Complex64 = hh.iter().zip(&vv).map(|(x, y)| x.conj() * y).sum();
        if (dot.norm() - nh * nv).abs() > 1e-9 {
            return Err(Error::Register(
                "simplified gate needs a product (control pair) ⊗ (target) input".into(),
            ));
        }
    }
    // factor out the target from the dominant branch; the other branch's
    // coefficient keeps the relative phase
    let (eps, zeta, b) = if nh >= nv {
        let b: Vec<Complex64> = hh.iter().map(|c| c / Complex64::new(nh, 0.0)).collect();
        let k = (0..4)
            .max_by(|&i, &j| b[i].norm().total_cmp(&b[j].norm()))
            .expect("4 modes");
        let zeta = vv[k] / b[k];
        (Complex64::new(nh, 0.0), zeta, b)
    } else {
        let b: Vec<Complex64> = vv.iter().map(|c| c / Complex64::new(nv, 0.0)).collect();
        let k = (0..4)
            .max_by(|&i, &j| b[i].norm().total_cmp(&b[j].norm()))
            .expect("4 modes");
        let eps = hh[k] / b[k];
        (eps, Complex64::new(nv, 0.0), b)
    };
    Ok((eps, zeta, b))
}

/// Pre-biased control-pair amplitudes for the simplified gate: the vertical
/// branch, which the lossless circuit over-transmits, is divided by 3 —
/// `(ε, ζ/3)/√(|ε|² + |ζ|²/9)`.
pub fn simplified_prebias(eps: Complex64, zeta: Complex64) -> (Complex64, Complex64) {
    let zeta3 = zeta / 3.0;
    let n = (eps.norm_sqr() + zeta3.norm_sqr()).sqrt();
    (eps / n, zeta3 / n)
}

/// Runs the post-selected qubit-ququart entangling gate on a register in the
/// [`cx4_register`] layout. Returns the post-selected output and the success
/// probability.
///
/// The simplified variant re-prepares the control pair with the pre-bias of
/// [`simplified_prebias`] and requires the target photon to carry horizontal
/// polarization only (its logical lower half).
pub fn optical_cx4(
    register: &PhotonRegister,
    variant: Cx4Variant,
    model: &DistinguishabilityModel,
) -> Result<(GateOutput, f64)> {
    expect_cx4_layout(register)?;
    match variant {
        Cx4Variant::Standard => run_elements(register, &cx4_circuit(variant), model),
        Cx4Variant::SimplifiedPreBiased => {
            let (eps, zeta, b) = decode_product(register)?;
            let v_weight = b[2].norm_sqr() + b[3].norm_sqr();
            if v_weight > crate::TOL_ACCUM {
                return Err(Error::Register(format!(
                    "simplified gate requires a horizontally polarized target (V weight {v_weight:.3e})"
                )));
            }
            let (eb, zb) = simplified_prebias(eps, zeta);
            let mut pair = vec![Complex64::default(); 4];
            pair[0] = eb;
            pair[3] = zb;
            let a_pair = HybridState::new(&[2, 2], &pair)?;
            let b_state = HybridState::new(&[4], &b)?;
            let biased = cx4_register(&a_pair, &b_state)?;
            run_elements(&biased, &cx4_circuit(variant), model)
        }
    }
}

fn expect_cx4_layout(register: &PhotonRegister) -> Result<()> {
    let p = register.photons();
    if p.len() != 3
        || p[0].label != "a1"
        || p[1].label != "a2"
        || p[2].label != "b"
        || p[0].dual_rail
        || p[1].dual_rail
        || !p[2].dual_rail
    {
        return Err(Error::Register(
            "expected photons a1, a2 (polarization) and b (dual-rail)".into(),
        ));
    }
    Ok(())
}

/// Logical (qubit, ququart) state carried by a pure (a1, a2, b) register:
/// `|0⟩ = |HH⟩`, `|1⟩ = |VV⟩` on the pair, b's modes are the ququart levels.
/// Unnormalized; errors if weight leaks outside the encoded span.
pub fn logical_state(reg: &PhotonRegister) -> Result<HybridState> {
    expect_cx4_layout(reg)?;
    let s = reg.state();
    let mut amps = vec![Complex64::default(); 8];
    let mut leak = 0.0;
    for m in 0..4 {
        amps[m] = s.amplitude(&[0, 0, m]);
        amps[4 + m] = s.amplitude(&[1, 1, m]);
        leak += s.amplitude(&[0, 1, m]).norm_sqr() + s.amplitude(&[1, 0, m]).norm_sqr();
    }
    if leak > crate::TOL_ACCUM * s.norm_sqr() {
        return Err(Error::Register(format!(
            "register leaks out of the logical span (weight {leak:.3e})"
        )));
    }
    HybridState::unnormalized(&[2, 4], nalgebra::DVector::from_vec(amps))
}

/// Logical (qubit, ququart) density matrix of a mixed (a1, a2, b) register.
pub fn logical_dm(reg: &MixedRegister) -> Result<DensityMatrix> {
    let dims = reg.rho().dims().to_vec();
    if dims != [2, 2, 4] {
        return Err(Error::Register(format!(
            "expected a (a1, a2, b) register, got dims {dims:?}"
        )));
    }
    let logical: Vec<usize> = (0..4)
        .map(|m| crate::hilbert::flat_index(&dims, &[0, 0, m]))
        .chain((0..4).map(|m| crate::hilbert::flat_index(&dims, &[1, 1, m])))
        .collect();
    let mut out = nalgebra::DMatrix::<Complex64>::zeros(8, 8);
    for (r, &i) in logical.iter().enumerate() {
        for (c, &j) in logical.iter().enumerate() {
            out[(r, c)] = reg.rho().matrix()[(i, j)];
        }
    }
    DensityMatrix::unnormalized(&[2, 4], out)
}
