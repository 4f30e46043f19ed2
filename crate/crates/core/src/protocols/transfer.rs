//! The dimension-changing transfer protocols.
//!
//! Naming follows the direction of the flow: `qit_4to2` moves one qubit of
//! information out of a four-level system onto a fresh qubit, `qit_2to4`
//! concentrates a qubit and a four-level system (restricted to its lower two
//! levels) into the four-level system alone. `merge`/`split` are the 2d
//! generalizations; `qit_2to2` is the same-dimension baseline.

use crate::error::{Error, Result};
use crate::hilbert::{
    apply, computational_basis, controlled, gate_x, gate_x4, gate_z4, plus_minus_basis,
    HybridState,
};
use crate::protocols::engine::{merge_step, split_step, CompletionMode, ProtocolResult, Runner};
use crate::TOL_ALGEBRAIC;

fn require_normalized(state: &HybridState) -> Result<()> {
    if !state.is_normalized() {
        return Err(Error::InvalidProtocolInput(format!(
            "input state must be normalized (norm {})",
            state.norm()
        )));
    }
    Ok(())
}

fn require_dims(state: &HybridState, dims: &[usize]) -> Result<()> {
    if state.dims() != dims {
        return Err(Error::InvalidProtocolInput(format!(
            "expected register {dims:?}, got {:?}",
            state.dims()
        )));
    }
    Ok(())
}

/// Qubit-to-qubit transfer. A fresh `|+⟩` qubit A is entangled with the
/// payload qubit B through a CNOT; measuring B in the computational basis
/// and correcting A with `I` or `X` leaves B's original state on A.
pub fn qit_2to2(b_state: &HybridState, mode: &CompletionMode, seed: u64) -> Result<ProtocolResult> {
    require_dims(b_state, &[2])?;
    require_normalized(b_state)?;
    let mut runner = Runner::new(mode, seed);

    let joint = HybridState::plus().tensor(b_state);
    let s = apply(&joint, &controlled(&gate_x())?, &[0, 1])?;

    let basis = computational_basis(2);
    let (outcome, s) = runner.measure_basis(&s, 1, &basis)?;
    let s = if runner.feeds_forward() && outcome == 1 {
        runner.record_correction("X", 0);
        apply(&s, &gate_x(), &[0])?
    } else {
        if runner.feeds_forward() {
            runner.record_correction("I", 0);
        }
        s
    };
    let (a, _) = s.project_subsystem(1, &basis[outcome])?;
    Ok(runner.finish(a.renormalize()))
}

/// Four-to-two transfer: a fresh `|+⟩` qubit A is entangled with the
/// four-level B through the controlled half-space swap; measuring which half
/// B occupies and correcting with `I⊗I₄` or `X⊗X₄` leaves the two qubits of
/// payload distributed over (A, lower half of B).
pub fn qit_4to2(b_state: &HybridState, mode: &CompletionMode, seed: u64) -> Result<ProtocolResult> {
    require_dims(b_state, &[4])?;
    require_normalized(b_state)?;
    let mut runner = Runner::new(mode, seed);

    let joint = HybridState::plus().tensor(b_state);
    let s = apply(&joint, &controlled(&gate_x4())?, &[0, 1])?;

    let (outcome, s) = runner.measure_subspace(&s, 1, &[vec![0, 1], vec![2, 3]])?;
    let s = if runner.feeds_forward() {
        if outcome == 1 {
            runner.record_correction("X", 0);
            runner.record_correction("X4", 1);
            let s = apply(&s, &gate_x(), &[0])?;
            apply(&s, &gate_x4(), &[1])?
        } else {
            runner.record_correction("I", 0);
            runner.record_correction("I4", 1);
            s
        }
    } else {
        s
    };
    Ok(runner.finish(s))
}

/// Two-to-four transfer: the joint `[2, 4]` input must keep B inside its
/// lower two levels. The controlled swap moves A's bit into B's half-space
/// degree of freedom; measuring A in `|±⟩` and correcting B with `I₄`/`Z₄`
/// concentrates both qubits of payload on B.
pub fn qit_2to4(joint: &HybridState, mode: &CompletionMode, seed: u64) -> Result<ProtocolResult> {
    require_dims(joint, &[2, 4])?;
    require_normalized(joint)?;
    let leak = joint.amplitude(&[0, 2]).norm_sqr()
        + joint.amplitude(&[0, 3]).norm_sqr()
        + joint.amplitude(&[1, 2]).norm_sqr()
        + joint.amplitude(&[1, 3]).norm_sqr();
    if leak > TOL_ALGEBRAIC {
        return Err(Error::InvalidProtocolInput(format!(
            "B must be supported on its lower two levels (upper weight {leak:.3e})"
        )));
    }
    let mut runner = Runner::new(mode, seed);
    let s = apply(joint, &controlled(&gate_x4())?, &[0, 1])?;

    let basis = plus_minus_basis();
    let (outcome, s) = runner.measure_basis(&s, 0, &basis)?;
    let s = if runner.feeds_forward() && outcome == 1 {
        runner.record_correction("Z4", 1);
        apply(&s, &gate_z4(), &[1])?
    } else {
        if runner.feeds_forward() {
            runner.record_correction("I4", 1);
        }
        s
    };
    let (b, _) = s.project_subsystem(0, &basis[outcome])?;
    Ok(runner.finish(b.renormalize()))
}

/// Merge of a qubit and a d-level qudit into a 2d-level qudit. Product form
/// of [`merge_joint`]; `α|i⟩ + β|i+d⟩` carries what was `(α|0⟩+β|1⟩)⊗|i⟩`.
pub fn merge(
    a_state: &HybridState,
    b_state: &HybridState,
    mode: &CompletionMode,
    seed: u64,
) -> Result<ProtocolResult> {
    require_dims(a_state, &[2])?;
    require_normalized(a_state)?;
    require_normalized(b_state)?;
    merge_joint(&a_state.tensor(b_state), mode, seed)
}

/// Merge accepting an entangled `[2, d]` joint input.
pub fn merge_joint(
    joint: &HybridState,
    mode: &CompletionMode,
    seed: u64,
) -> Result<ProtocolResult> {
    if joint.subsystem_count() != 2 || joint.dims()[0] != 2 {
        return Err(Error::InvalidProtocolInput(format!(
            "merge expects a [2, d] register, got {:?}",
            joint.dims()
        )));
    }
    if joint.dims()[1] < 2 {
        return Err(Error::InvalidProtocolInput("qudit dimension must be ≥ 2".into()));
    }
    require_normalized(joint)?;
    let mut runner = Runner::new(mode, seed);
    let out = merge_step(&mut runner, joint, 0, 1)?;
    Ok(runner.finish(out))
}

/// Split of a 2d-level qudit into a qubit and a d-level qudit: the top half
/// of the spectrum moves onto a fresh qubit, `γ_{i}|0⟩|i⟩ + γ_{i+d}|1⟩|i⟩`.
pub fn split(b_state: &HybridState, mode: &CompletionMode, seed: u64) -> Result<ProtocolResult> {
    if b_state.subsystem_count() != 1 {
        return Err(Error::InvalidProtocolInput(format!(
            "split expects a single qudit, got {:?}",
            b_state.dims()
        )));
    }
    let dd = b_state.dims()[0];
    if !dd.is_multiple_of(2) {
        return Err(Error::InvalidProtocolInput(format!(
            "split needs an even dimension, got {dd}"
        )));
    }
    require_normalized(b_state)?;
    let mut runner = Runner::new(mode, seed);
    let out = split_step(&mut runner, b_state, 0)?;
    Ok(runner.finish(out))
}
