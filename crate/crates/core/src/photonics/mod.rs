//! Linear-optics backend: polarization × path encodings, waveplates and
//! beamsplitters as mode operators, the post-selected entangling gate, the
//! two-photon interference model, and the dual-rail state analyzer.

mod analyzer;
mod circuit;
mod elements;
mod gate;
mod hom;
mod register;
mod runs;

pub use analyzer::{analyzer_projector, AnalyzerSetting};
pub use circuit::{CircuitDoc, ElementDoc, PostSelectionRule};
pub use elements::{
    jones_hwp, jones_qwp, pol_to_h_angles, ppbs_kraus, DistinguishabilityModel, Interference,
    OpticalElement, Pol, LOSS_V_AMP, PPBS_R_H, PPBS_R_V, PPBS_T_H, PPBS_T_V,
};
pub use gate::{
    cnot_block, cx4_circuit, cx4_register, logical_dm, logical_state, optical_cx4, ppbs_cnot,
    simplified_prebias, Cx4Variant, GateOutput,
};
pub use hom::{hom_coincidence, model_visibility, visibility, DelayRegime};
pub use register::{MixedRegister, Photon, PhotonRegister};
pub use runs::{
    ideal_2to4_target, ideal_4to2_target, prepare_system_a, prepare_system_a_degraded,
    prepare_system_b, run_optical_2to4, run_optical_4to2, OpticalRunResult,
};
