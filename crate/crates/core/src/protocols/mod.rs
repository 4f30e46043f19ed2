//! Information-transfer protocols between registers of different dimensions.
//!
//! Every protocol follows the same shape: entangle through a controlled
//! half-space swap, measure one side, then either feed the outcome forward
//! into a correction gate (deterministic) or post-select a branch
//! (probabilistic, no correction). The correction assignment is fixed so the
//! lower-block / `+` outcome needs only the identity; the other branch takes
//! the nontrivial element of the protocol's correction set.

mod engine;
mod spec;
mod synthesize;
mod transfer;

pub use engine::{CompletionMode, ProtocolResult};
pub use spec::{ProtocolKind, ProtocolSpec, ResultDoc};
pub use synthesize::{run_synthesized, synthesize_gate, QubitOrder, SynthesizedGate};
pub use transfer::{merge, merge_joint, qit_2to2, qit_2to4, qit_4to2, split};
