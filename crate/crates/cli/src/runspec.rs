//! The experiment document: a versioned JSON description of one run.
//!
//! The schema lives in `docs/runspec.schema.json`; deserialization here is
//! strict (unknown fields are rejected) and `validate` enforces the value
//! constraints the schema states.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

pub const RUNSPEC_VERSION: u32 = 1;

/// Schema text shipped with the binary (`qitsim schema` prints it).
pub const SCHEMA_JSON: &str = include_str!("../../../docs/runspec.schema.json");

// no deny_unknown_fields here: it cannot coexist with the flattened command
// enum, whose variants reject unknown fields themselves
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSpec {
    pub version: u32,
    #[serde(flatten)]
    pub command: CommandSpec,
    /// Overlap quality of interfering photon pairs.
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default)]
    pub seed: u64,
    /// Detected events per second for counting statistics.
    #[serde(default = "default_rate")]
    pub rate: f64,
    /// Collection time per setting, seconds.
    #[serde(default = "default_duration")]
    pub duration: f64,
}

fn default_q() -> f64 {
    1.0
}

fn default_rate() -> f64 {
    0.22
}

fn default_duration() -> f64 {
    600.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CommandSpec {
    Protocol {
        protocol: ProtocolName,
        /// Input amplitudes as (re, im) pairs over the protocol's register.
        amps: Vec<(f64, f64)>,
        #[serde(default)]
        mode: ModeSpec,
        /// Qudit dimension d for merge; ignored elsewhere.
        #[serde(skip_serializing_if = "Option::is_none", default)]
        d: Option<usize>,
    },
    Optical {
        direction: Direction,
        /// Ququart amplitudes (4-to-2) as (re, im) pairs.
        #[serde(skip_serializing_if = "Option::is_none", default)]
        b_state: Option<Vec<(f64, f64)>>,
        /// Control-pair amplitudes (2-to-4).
        #[serde(skip_serializing_if = "Option::is_none", default)]
        a_coeffs: Option<[(f64, f64); 2]>,
        /// Lower-half target amplitudes (2-to-4).
        #[serde(skip_serializing_if = "Option::is_none", default)]
        b_coeffs: Option<[(f64, f64); 2]>,
    },
    HomScan {
        q_values: Vec<f64>,
    },
    Tomo {
        /// True four-level state; counts are simulated on the 36 analyzer
        /// settings unless `exact` is set.
        state: Vec<(f64, f64)>,
        #[serde(default)]
        exact: bool,
    },
    Synthesize {
        n: usize,
        gate: GateName,
        #[serde(default)]
        order: OrderName,
        #[serde(default)]
        check: bool,
        /// Random inputs used by the check.
        #[serde(default = "default_check_inputs")]
        check_inputs: usize,
    },
    PaperSuite {
        which: SuiteName,
    },
}

fn default_check_inputs() -> usize {
    25
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolName {
    Qit2to2,
    Qit4to2,
    Qit2to4,
    Merge,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    #[serde(rename = "4to2")]
    FourToTwo,
    #[serde(rename = "2to4")]
    TwoToFour,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    #[default]
    FeedForward,
    PostSelect {
        kept: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateName {
    Identity,
    Ccz,
    Ccx,
    Cnot,
    Cz,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrderName {
    #[default]
    FirstLeast,
    FirstMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Fig4,
    Fig5,
    Hom,
    Cx4,
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        if self.version != RUNSPEC_VERSION {
            bail!(
                "unsupported spec version {} (this build understands {RUNSPEC_VERSION})",
                self.version
            );
        }
        if !(0.0..=1.0).contains(&self.q) || !self.q.is_finite() {
            bail!("q must lie in [0, 1], got {}", self.q);
        }
        if self.rate <= 0.0 || self.duration <= 0.0 {
            bail!("rate and duration must be positive");
        }
        match &self.command {
            CommandSpec::Protocol { amps, d, protocol, .. } => {
                if amps.is_empty() {
                    bail!("protocol input amplitudes missing");
                }
                if *protocol == ProtocolName::Merge {
                    if let Some(d) = d {
                        if *d < 2 {
                            bail!("merge needs d ≥ 2");
                        }
                    }
                }
            }
            CommandSpec::Optical {
                direction,
                b_state,
                a_coeffs,
                b_coeffs,
            } => match direction {
                Direction::FourToTwo => {
                    let n = b_state.as_ref().map(Vec::len).unwrap_or(0);
                    if n != 4 {
                        bail!("4to2 needs b_state with four amplitudes");
                    }
                }
                Direction::TwoToFour => {
                    if a_coeffs.is_none() || b_coeffs.is_none() {
                        bail!("2to4 needs a_coeffs and b_coeffs");
                    }
                }
            },
            CommandSpec::HomScan { q_values } => {
                if q_values.is_empty() {
                    bail!("hom-scan needs at least one q value");
                }
                if q_values.iter().any(|q| !(0.0..=1.0).contains(q)) {
                    bail!("hom-scan q values must lie in [0, 1]");
                }
            }
            CommandSpec::Tomo { state, .. } => {
                if state.len() != 4 {
                    bail!("tomo needs a four-amplitude state");
                }
            }
            CommandSpec::Synthesize { n, gate, .. } => {
                if !(2..=4).contains(n) {
                    bail!("synthesize supports 2 ≤ n ≤ 4");
                }
                match gate {
                    GateName::Ccz | GateName::Ccx if *n != 3 => {
                        bail!("{gate:?} is a three-qubit gate");
                    }
                    _ => {}
                }
            }
            CommandSpec::PaperSuite { .. } => {}
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: RunSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}
