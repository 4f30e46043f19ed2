//! JSON form of an optical circuit: element list with angles in degrees,
//! plus the post-selection rules applied after it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::elements::{OpticalElement, Pol};

/// Component filter keeping only the listed modes of one photon (the
/// one-photon-per-arm coincidence condition is built into the beamsplitter
/// model itself).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostSelectionRule {
    pub photon: String,
    pub keep_modes: Vec<usize>,
}

impl PostSelectionRule {
    pub fn validate(&self) -> Result<()> {
        if self.keep_modes.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "post-selection on {} keeps no modes",
                self.photon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementDoc {
    Hwp {
        photon: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        rail: Option<usize>,
        angle_deg: f64,
    },
    Qwp {
        photon: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        rail: Option<usize>,
        angle_deg: f64,
    },
    PhaseShift {
        photon: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        rail: Option<usize>,
        phase_deg: f64,
    },
    Loss {
        photon: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        rail: Option<usize>,
        v_amplitude: f64,
    },
    Bd {
        photon: String,
        displace: Pol,
        shift: i8,
    },
    Ppbs {
        control: String,
        target: String,
        rail: usize,
    },
}

impl From<&OpticalElement> for ElementDoc {
    fn from(e: &OpticalElement) -> Self {
        match e {
            OpticalElement::Hwp { photon, rail, angle } => Self::Hwp {
                photon: photon.clone(),
                rail: *rail,
                angle_deg: angle.to_degrees(),
            },
            OpticalElement::Qwp { photon, rail, angle } => Self::Qwp {
                photon: photon.clone(),
                rail: *rail,
                angle_deg: angle.to_degrees(),
            },
            OpticalElement::PhaseShift { photon, rail, phase } => Self::PhaseShift {
                photon: photon.clone(),
                rail: *rail,
                phase_deg: phase.to_degrees(),
            },
            OpticalElement::Loss {
                photon,
                rail,
                v_amplitude,
            } => Self::Loss {
                photon: photon.clone(),
                rail: *rail,
                v_amplitude: *v_amplitude,
            },
            OpticalElement::Bd {
                photon,
                displace,
                shift,
            } => Self::Bd {
                photon: photon.clone(),
                displace: *displace,
                shift: *shift,
            },
            OpticalElement::Ppbs {
                control,
                target,
                rail,
            } => Self::Ppbs {
                control: control.clone(),
                target: target.clone(),
                rail: *rail,
            },
        }
    }
}

impl From<&ElementDoc> for OpticalElement {
    fn from(d: &ElementDoc) -> Self {
        match d {
            ElementDoc::Hwp {
                photon,
                rail,
                angle_deg,
            } => Self::Hwp {
                photon: photon.clone(),
                rail: *rail,
                angle: angle_deg.to_radians(),
            },
            ElementDoc::Qwp {
                photon,
                rail,
                angle_deg,
            } => Self::Qwp {
                photon: photon.clone(),
                rail: *rail,
                angle: angle_deg.to_radians(),
            },
            ElementDoc::PhaseShift {
                photon,
                rail,
                phase_deg,
            } => Self::PhaseShift {
                photon: photon.clone(),
                rail: *rail,
                phase: phase_deg.to_radians(),
            },
            ElementDoc::Loss {
                photon,
                rail,
                v_amplitude,
            } => Self::Loss {
                photon: photon.clone(),
                rail: *rail,
                v_amplitude: *v_amplitude,
            },
            ElementDoc::Bd {
                photon,
                displace,
                shift,
            } => Self::Bd {
                photon: photon.clone(),
                displace: *displace,
                shift: *shift,
            },
            ElementDoc::Ppbs {
                control,
                target,
                rail,
            } => Self::Ppbs {
                control: control.clone(),
                target: target.clone(),
                rail: *rail,
            },
        }
    }
}

/// Serializable circuit description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDoc {
    pub elements: Vec<ElementDoc>,
    #[serde(default)]
    pub post_selection: Vec<PostSelectionRule>,
}

impl CircuitDoc {
    pub fn from_elements(
        elements: &[OpticalElement],
        post_selection: Vec<PostSelectionRule>,
    ) -> Self {
        Self {
            elements: elements.iter().map(ElementDoc::from).collect(),
            post_selection,
        }
    }

    pub fn elements(&self) -> Vec<OpticalElement> {
        self.elements.iter().map(OpticalElement::from).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.post_selection {
            r.validate()?;
        }
        Ok(())
    }
}
