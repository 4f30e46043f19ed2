//! JSON experiment format for protocol runs: which protocol, the input
//! amplitudes, the completion mode, and the seed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HybridState;
use crate::protocols::{
    merge_joint, qit_2to2, qit_2to4, qit_4to2, split, CompletionMode, ProtocolResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Qit2to2,
    Qit4to2,
    Qit2to4,
    Merge,
    Split,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ModeSpec {
    FeedForward,
    PostSelect { kept: Vec<usize> },
}

/// A single protocol run, deserializable from the CLI's experiment files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    pub protocol: ProtocolKind,
    /// Register dimensions of the input state.
    pub dims: Vec<usize>,
    /// Input amplitudes as (re, im) pairs, row-major over `dims`.
    pub amps: Vec<(f64, f64)>,
    #[serde(rename = "mode")]
    mode: ModeSpec,
    pub seed: u64,
}

impl ProtocolSpec {
    pub fn new(
        protocol: ProtocolKind,
        dims: &[usize],
        amps: &[Complex64],
        mode: &CompletionMode,
        seed: u64,
    ) -> Self {
        Self {
            protocol,
            dims: dims.to_vec(),
            amps: amps.iter().map(|c| (c.re, c.im)).collect(),
            mode: match mode {
                CompletionMode::FeedForward => ModeSpec::FeedForward,
                CompletionMode::PostSelect(kept) => ModeSpec::PostSelect { kept: kept.clone() },
            },
            seed,
        }
    }

    pub fn mode(&self) -> CompletionMode {
        match &self.mode {
            ModeSpec::FeedForward => CompletionMode::FeedForward,
            ModeSpec::PostSelect { kept } => CompletionMode::PostSelect(kept.clone()),
        }
    }

    pub fn input_state(&self) -> Result<HybridState> {
        let amps: Vec<Complex64> = self.amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        HybridState::new(&self.dims, &amps)
    }

    /// Dispatches to the named protocol.
    pub fn run(&self) -> Result<ProtocolResult> {
        let input = self.input_state()?;
        let mode = self.mode();
        match self.protocol {
            ProtocolKind::Qit2to2 => qit_2to2(&input, &mode, self.seed),
            ProtocolKind::Qit4to2 => qit_4to2(&input, &mode, self.seed),
            ProtocolKind::Qit2to4 => qit_2to4(&input, &mode, self.seed),
            ProtocolKind::Merge => merge_joint(&input, &mode, self.seed),
            ProtocolKind::Split => {
                if input.subsystem_count() != 1 {
                    return Err(Error::InvalidProtocolInput(
                        "split takes a single even-dimension qudit".into(),
                    ));
                }
                split(&input, &mode, self.seed)
            }
        }
    }
}

/// Serializable view of a [`ProtocolResult`] for result files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDoc {
    pub final_dims: Vec<usize>,
    pub final_amps: Vec<(f64, f64)>,
    pub outcomes: Vec<OutcomeDoc>,
    pub corrections: Vec<(String, usize)>,
    pub success_probability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeDoc {
    pub outcome: usize,
    pub probability: f64,
}

impl From<&ProtocolResult> for ResultDoc {
    fn from(r: &ProtocolResult) -> Self {
        Self {
            final_dims: r.final_state.dims().to_vec(),
            final_amps: r
                .final_state
                .amplitudes()
                .iter()
                .map(|c| (c.re, c.im))
                .collect(),
            outcomes: r
                .outcome_log
                .iter()
                .map(|m| OutcomeDoc {
                    outcome: m.outcome,
                    probability: m.probability,
                })
                .collect(),
            corrections: r.corrections_applied.clone(),
            success_probability: r.success_probability,
        }
    }
}
