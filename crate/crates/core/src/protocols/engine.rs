//! Shared protocol machinery: completion modes, the measurement runner, and
//! the merge/split register steps reused by every protocol.

use std::collections::VecDeque;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{
    apply, basis_branches, controlled, gate_x2d, gate_z2d, plus_minus_basis, subspace_branches,
    HybridState, MeasurementRecord,
};

/// How a protocol resolves its measurements.
///
/// `FeedForward` samples each outcome from the Born distribution (seeded) and
/// applies the matching correction, so the transfer succeeds with certainty.
/// `PostSelect` forces each measurement to the listed outcome label, applies
/// no correction, and accumulates the kept branch probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompletionMode {
    FeedForward,
    PostSelect(Vec<usize>),
}

/// Outcome of a protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub final_state: HybridState,
    pub outcome_log: Vec<MeasurementRecord>,
    pub corrections_applied: Vec<(String, usize)>,
    pub success_probability: f64,
}

/// Walks a protocol through its measurements under a completion mode.
pub(crate) struct Runner {
    policy: Policy,
    pub log: Vec<MeasurementRecord>,
    pub corrections: Vec<(String, usize)>,
    success: f64,
}

enum Policy {
    Feed(Box<ChaCha8Rng>),
    Post(VecDeque<usize>),
}

impl Runner {
    pub fn new(mode: &CompletionMode, seed: u64) -> Self {
        let policy = match mode {
            CompletionMode::FeedForward => Policy::Feed(Box::new(ChaCha8Rng::seed_from_u64(seed))),
            CompletionMode::PostSelect(kept) => Policy::Post(kept.iter().copied().collect()),
        };
        Self {
            policy,
            log: Vec::new(),
            corrections: Vec::new(),
            success: 1.0,
        }
    }

    /// True when corrections should be applied (feed-forward mode).
    pub fn feeds_forward(&self) -> bool {
        matches!(self.policy, Policy::Feed(_))
    }

    fn resolve(&mut self, branches: Vec<MeasurementRecord>) -> Result<MeasurementRecord> {
        match &mut self.policy {
            Policy::Feed(rng) => {
                use rand::Rng;
                let roll: f64 = rng.gen();
                let mut acc = 0.0;
                let last = branches.len() - 1;
                for (i, b) in branches.into_iter().enumerate() {
                    acc += b.probability;
                    if roll < acc || i == last {
                        return Ok(b);
                    }
                }
                unreachable!("branch probabilities sum to one")
            }
            Policy::Post(kept) => {
                let label = kept.pop_front().ok_or_else(|| {
                    Error::InvalidPostSelection("outcome list exhausted".into())
                })?;
                let b = branches
                    .into_iter()
                    .find(|b| b.outcome == label)
                    .ok_or_else(|| {
                        Error::InvalidPostSelection(format!("no outcome labelled {label}"))
                    })?;
                if b.probability <= 0.0 {
                    return Err(Error::InvalidPostSelection(format!(
                        "outcome {label} has zero probability"
                    )));
                }
                self.success *= b.probability;
                Ok(b)
            }
        }
    }

    /// Basis measurement on one subsystem; returns (outcome, collapsed state).
    pub fn measure_basis(
        &mut self,
        state: &HybridState,
        idx: usize,
        basis: &[Vec<Complex64>],
    ) -> Result<(usize, HybridState)> {
        let rec = self.resolve(basis_branches(state, idx, basis)?)?;
        let outcome = rec.outcome;
        let post = rec.post_state.clone();
        self.log.push(rec);
        Ok((outcome, post))
    }

    /// Level-block measurement on one subsystem.
    pub fn measure_subspace(
        &mut self,
        state: &HybridState,
        idx: usize,
        partition: &[Vec<usize>],
    ) -> Result<(usize, HybridState)> {
        let rec = self.resolve(subspace_branches(state, idx, partition)?)?;
        let outcome = rec.outcome;
        let post = rec.post_state.clone();
        self.log.push(rec);
        Ok((outcome, post))
    }

    pub fn record_correction(&mut self, name: &str, subsystem: usize) {
        self.corrections.push((name.to_string(), subsystem));
    }

    pub fn finish(self, final_state: HybridState) -> ProtocolResult {
        let success_probability = match self.policy {
            Policy::Feed(_) => 1.0,
            Policy::Post(_) => self.success,
        };
        ProtocolResult {
            final_state,
            outcome_log: self.log,
            corrections_applied: self.corrections,
            success_probability,
        }
    }
}

/// One merge step inside a larger register: absorbs qubit `a_idx` into the
/// d-level subsystem `b_idx`, leaving it with 2d levels (`|i + x·d⟩` carries
/// what was `|x⟩|i⟩`). The qubit slot is removed from the register.
pub(crate) fn merge_step(
    runner: &mut Runner,
    state: &HybridState,
    a_idx: usize,
    b_idx: usize,
) -> Result<HybridState> {
    if state.dims()[a_idx] != 2 {
        return Err(Error::InvalidProtocolInput(format!(
            "merge control must be a qubit, got dimension {}",
            state.dims()[a_idx]
        )));
    }
    let d = state.dims()[b_idx];
    let s = state.embed_subsystem(b_idx, 2 * d)?;
    let cx = controlled(&gate_x2d(d))?;
    let s = apply(&s, &cx, &[a_idx, b_idx])?;

    let basis = plus_minus_basis();
    let (outcome, s) = runner.measure_basis(&s, a_idx, &basis)?;
    let s = if runner.feeds_forward() {
        if outcome == 1 {
            runner.record_correction(&format!("Z{}", 2 * d), b_idx);
            apply(&s, &gate_z2d(d), &[b_idx])?
        } else {
            runner.record_correction(&format!("I{}", 2 * d), b_idx);
            s
        }
    } else {
        s
    };
    let (s, _) = s.project_subsystem(a_idx, &basis[outcome])?;
    Ok(s.renormalize())
}

/// One split step: introduces a fresh `|+⟩` ancilla in front of the
/// 2d-level subsystem at `b_idx`, distributes the top half of its spectrum
/// onto the ancilla, and shrinks the subsystem to d levels. The new qubit
/// lands at `b_idx`, the halved subsystem at `b_idx + 1`.
pub(crate) fn split_step(
    runner: &mut Runner,
    state: &HybridState,
    b_idx: usize,
) -> Result<HybridState> {
    let dd = state.dims()[b_idx];
    if !dd.is_multiple_of(2) || dd < 4 {
        return Err(Error::InvalidProtocolInput(format!(
            "split needs an even dimension ≥ 4, got {dd}"
        )));
    }
    let d = dd / 2;

    // ancilla in front: register (…, A, B, …) with A at b_idx
    let n = state.subsystem_count();
    let with_ancilla = HybridState::plus().tensor(state);
    let mut perm: Vec<usize> = Vec::with_capacity(n + 1);
    for i in 0..b_idx {
        perm.push(i + 1);
    }
    perm.push(0);
    for i in b_idx..n {
        perm.push(i + 1);
    }
    let s = with_ancilla.permute_subsystems(&perm)?;
    let a_idx = b_idx;
    let b_idx = b_idx + 1;

    let cx = controlled(&gate_x2d(d))?;
    let s = apply(&s, &cx, &[a_idx, b_idx])?;

    let lower: Vec<usize> = (0..d).collect();
    let upper: Vec<usize> = (d..dd).collect();
    let (outcome, s) =
        runner.measure_subspace(&s, b_idx, &[lower.clone(), upper.clone()])?;

    if runner.feeds_forward() {
        let s = if outcome == 1 {
            runner.record_correction("X", a_idx);
            runner.record_correction(&format!("X{dd}"), b_idx);
            let s = apply(&s, &crate::hilbert::gate_x(), &[a_idx])?;
            apply(&s, &gate_x2d(d), &[b_idx])?
        } else {
            runner.record_correction("I", a_idx);
            runner.record_correction(&format!("I{dd}"), b_idx);
            s
        };
        Ok(s.restrict_subsystem(b_idx, &lower)?.renormalize())
    } else {
        // uncorrected branch: support sits in the measured block
        let block = if outcome == 0 { lower } else { upper };
        Ok(s.restrict_subsystem(b_idx, &block)?.renormalize())
    }
}
