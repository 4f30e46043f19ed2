//! Optical elements as mode-space operators.
//!
//! Photons carry a polarization qubit (H = 0, V = 1) and optionally a path
//! qubit (upper rail = 0, lower rail = 1); a dual-rail photon has four modes
//! ordered `H0, H1, V0, V1` (polarization is the high bit). Waveplates,
//! phase plates and loss elements are single-photon operators, possibly
//! conditioned on one rail. The partially-polarizing beamsplitter is a
//! genuine two-photon element: its coincidence (one photon per output arm)
//! map carries the photon-exchange term, and partial distinguishability
//! splits it into a Kraus mixture.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beamsplitter amplitudes: vertical light is reflected perfectly, a third
/// of horizontal light is reflected and two thirds transmitted.
pub const PPBS_R_H: f64 = 0.577_350_269_189_625_7; // √(1/3)
pub const PPBS_T_H: f64 = 0.816_496_580_927_726; // √(2/3)
pub const PPBS_R_V: f64 = 1.0;
pub const PPBS_T_V: f64 = 0.0;

/// Amplitude transmitted by a loss element for vertical polarization
/// (intensity 1/3); horizontal passes untouched.
pub const LOSS_V_AMP: f64 = 0.577_350_269_189_625_7; // √(1/3)

/// Mode-overlap quality: the fraction of photon pairs that interfere. The
/// remaining 1 − q behave classically at the beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistinguishabilityModel {
    q: f64,
}

impl DistinguishabilityModel {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) || !q.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "overlap quality must lie in [0, 1], got {q}"
            )));
        }
        Ok(Self { q })
    }

    pub fn ideal() -> Self {
        Self { q: 1.0 }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_ideal(&self) -> bool {
        self.q == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pol {
    H,
    V,
}

/// One element of an optical circuit. Angles are radians internally; the
/// serialized form uses degrees.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    /// Half-wave plate on a photon's polarization, optionally in one rail.
    Hwp {
        photon: String,
        rail: Option<usize>,
        angle: f64,
    },
    /// Quarter-wave plate.
    Qwp {
        photon: String,
        rail: Option<usize>,
        angle: f64,
    },
    /// Phase `e^{iφ}` on the vertical component.
    PhaseShift {
        photon: String,
        rail: Option<usize>,
        phase: f64,
    },
    /// Attenuates the vertical component by the given amplitude.
    Loss {
        photon: String,
        rail: Option<usize>,
        v_amplitude: f64,
    },
    /// Beam displacer: shifts the rail of one polarization; modes pushed
    /// outside the two simulated rails are discarded.
    Bd {
        photon: String,
        displace: Pol,
        shift: i8,
    },
    /// Partially-polarizing beamsplitter between a control photon's
    /// polarization and a dual-rail photon in the given rail.
    Ppbs {
        control: String,
        target: String,
        rail: usize,
    },
}

/// Jones matrix of a half-wave plate at angle θ:
/// `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`.
pub fn jones_hwp(theta: f64) -> DMatrix<Complex64> {
    let c = Complex64::new((2.0 * theta).cos(), 0.0);
    let s = Complex64::new((2.0 * theta).sin(), 0.0);
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

/// Jones matrix of a quarter-wave plate at angle θ:
/// `R(θ)·diag(1, i)·R(−θ)`.
pub fn jones_qwp(theta: f64) -> DMatrix<Complex64> {
    let c = theta.cos();
    let s = theta.sin();
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let cc = Complex64::new(c * c, 0.0);
    let ss = Complex64::new(s * s, 0.0);
    let cs = Complex64::new(c * s, 0.0);
    DMatrix::from_row_slice(
        2,
        2,
        &[cc + i * ss, cs * (one - i), cs * (one - i), ss + i * cc],
    )
}

fn phase_v(phi: f64) -> DMatrix<Complex64> {
    let mut m = DMatrix::identity(2, 2);
    m[(1, 1)] = Complex64::from_polar(1.0, phi);
    m
}

fn loss_v(amp: f64) -> DMatrix<Complex64> {
    let mut m = DMatrix::identity(2, 2);
    m[(1, 1)] = Complex64::new(amp, 0.0);
    m
}

/// Lifts a 2×2 polarization operator onto a dual-rail photon's four modes,
/// acting in one rail or in both.
pub fn pol_op_on_dual_rail(op: &DMatrix<Complex64>, rail: Option<usize>) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for p_out in 0..2 {
        for p_in in 0..2 {
            for r in 0..2 {
                let active = rail.is_none_or(|q| q == r);
                let v = if active {
                    op[(p_out, p_in)]
                } else if p_out == p_in {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                };
                m[(p_out * 2 + r, p_in * 2 + r)] = v;
            }
        }
    }
    m
}

fn bd_matrix(displace: Pol, shift: i8) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(4, 4);
    for p in 0..2usize {
        for r in 0..2usize {
            let moved = (p == 1) == matches!(displace, Pol::V);
            let r_out = if moved { r as i8 + shift } else { r as i8 };
            if (0..2).contains(&r_out) {
                m[(p * 2 + r_out as usize, p * 2 + r)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    m
}

fn reflect_amp(pol: usize) -> f64 {
    if pol == 0 {
        PPBS_R_H
    } else {
        PPBS_R_V
    }
}

fn transmit_amp(pol: usize) -> f64 {
    if pol == 0 {
        PPBS_T_H
    } else {
        PPBS_T_V
    }
}

/// Whether a photon pair meeting at the beamsplitter interferes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interference {
    /// Indistinguishable photons: exchange and direct paths add coherently.
    Coherent,
    /// Fully distinguishable photons: the paths contribute classically.
    Classical,
}

/// Coincidence-subspace Kraus operators of the beamsplitter on the joint
/// (control ⊗ dual-rail target) space, indices `c_pol·4 + mode`.
///
/// With the target in the interaction rail, "both photons keep their arm"
/// happens by double reflection (`−r_p r_q`, the sign from beamsplitter
/// unitarity) or by double transmission, which exchanges the photons and
/// swaps the polarization payloads (`t_p t_q`). Coherent pairs add the two
/// paths into one operator; classical pairs contribute each path as its own
/// Kraus branch. With the target in the other rail, the control meets the
/// beamsplitter alone and survives by reflection (`r_p`).
pub fn ppbs_kraus(rail: usize, regime: Interference) -> Vec<DMatrix<Complex64>> {
    let other = 1 - rail;
    let mut stay = DMatrix::<Complex64>::zeros(8, 8);
    let mut cross = DMatrix::<Complex64>::zeros(8, 8);
    let mut alone = DMatrix::<Complex64>::zeros(8, 8);
    for p in 0..2usize {
        for qp in 0..2usize {
            let idx_in = p * 4 + qp * 2 + rail;
            stay[(idx_in, idx_in)] = Complex64::new(-reflect_amp(p) * reflect_amp(qp), 0.0);
            let idx_swap = qp * 4 + p * 2 + rail;
            cross[(idx_swap, idx_in)] = Complex64::new(transmit_amp(p) * transmit_amp(qp), 0.0);
            let idx_other = p * 4 + qp * 2 + other;
            alone[(idx_other, idx_other)] = Complex64::new(reflect_amp(p), 0.0);
        }
    }
    match regime {
        Interference::Coherent => vec![&stay + &cross + &alone],
        Interference::Classical => vec![&stay + &alone, cross],
    }
}

impl OpticalElement {
    /// Degrees-based constructors for the angle-bearing elements.
    pub fn hwp_deg(photon: &str, rail: Option<usize>, degrees: f64) -> Self {
        Self::Hwp {
            photon: photon.into(),
            rail,
            angle: degrees.to_radians(),
        }
    }

    pub fn qwp_deg(photon: &str, rail: Option<usize>, degrees: f64) -> Self {
        Self::Qwp {
            photon: photon.into(),
            rail,
            angle: degrees.to_radians(),
        }
    }

    /// Kraus operators and the photon labels they act on. Every element is a
    /// single operator except the beamsplitter in the classical regime.
    pub fn kraus(&self, regime: Interference) -> (Vec<DMatrix<Complex64>>, Vec<String>) {
        match self {
            Self::Hwp { photon, rail, angle } => {
                (vec![pol_matrix(jones_hwp(*angle), *rail)], vec![photon.clone()])
            }
            Self::Qwp { photon, rail, angle } => {
                (vec![pol_matrix(jones_qwp(*angle), *rail)], vec![photon.clone()])
            }
            Self::PhaseShift { photon, rail, phase } => {
                (vec![pol_matrix(phase_v(*phase), *rail)], vec![photon.clone()])
            }
            Self::Loss {
                photon,
                rail,
                v_amplitude,
            } => (
                vec![pol_matrix(loss_v(*v_amplitude), *rail)],
                vec![photon.clone()],
            ),
            Self::Bd {
                photon,
                displace,
                shift,
            } => (vec![bd_matrix(*displace, *shift)], vec![photon.clone()]),
            Self::Ppbs {
                control,
                target,
                rail,
            } => (
                ppbs_kraus(*rail, regime),
                vec![control.clone(), target.clone()],
            ),
        }
    }

    /// Dimension expected for each photon the element touches; `None` in the
    /// pol-op case means "2 or 4 depending on the photon".
    pub(crate) fn wants_dual_rail(&self) -> bool {
        matches!(self, Self::Bd { .. })
    }
}

/// A pol-space operator either stays 2×2 (pol-only photon) or lifts to 4×4.
/// The caller resolves which via [`resolve_op`]; here we keep both forms.
fn pol_matrix(op: DMatrix<Complex64>, rail: Option<usize>) -> DMatrix<Complex64> {
    match rail {
        None => op, // resolved against the photon's dimension at apply time
        Some(r) => pol_op_on_dual_rail(&op, Some(r)),
    }
}

/// Adapts an element operator to a photon's actual dimension: a 2×2 pol
/// operator meant for a dual-rail photon is lifted to both rails.
pub(crate) fn resolve_op(op: DMatrix<Complex64>, photon_dim: usize) -> Result<DMatrix<Complex64>> {
    match (op.nrows(), photon_dim) {
        (2, 2) | (4, 4) => Ok(op),
        (2, 4) => Ok(pol_op_on_dual_rail(&op, None)),
        (rows, dim) => Err(Error::Register(format!(
            "operator of size {rows} cannot act on a photon with {dim} modes"
        ))),
    }
}

/// Waveplate pair (QWP then HWP angle) rotating an arbitrary polarization
/// state onto `|H⟩` up to a global phase. The quarter-wave plate removes the
/// ellipticity (its axis bisects the Stokes equator projection), the
/// half-wave plate rotates the resulting linear polarization onto H.
pub fn pol_to_h_angles(alpha: Complex64, beta: Complex64) -> (f64, f64) {
    let s1 = alpha.norm_sqr() - beta.norm_sqr();
    let s2 = 2.0 * (alpha.conj() * beta).re;
    let theta_q = 0.5 * s2.atan2(s1);
    let qwp = jones_qwp(theta_q);
    let w0 = qwp[(0, 0)] * alpha + qwp[(0, 1)] * beta;
    let w1 = qwp[(1, 0)] * alpha + qwp[(1, 1)] * beta;
    let t1 = w0.norm_sqr() - w1.norm_sqr();
    let t2 = 2.0 * (w0.conj() * w1).re;
    let phi = 0.5 * t2.atan2(t1);
    (theta_q, phi / 2.0)
}
