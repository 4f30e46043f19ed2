//! Multi-qubit gate synthesis through a single qudit: merge all qubits into
//! one 2ⁿ-level system, apply the gate as a plain unitary there, then split
//! back out.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{apply, GateMatrix, HybridState};
use crate::protocols::engine::{merge_step, split_step, CompletionMode, ProtocolResult, Runner};

/// Which qubit holds the least significant bit of the merged qudit index.
///
/// `FirstLeastSignificant` merges qubit 2 onto qubit 1 first and then works
/// upward, so qubit 1 ends least significant; the qudit unitary is the input
/// matrix conjugated by the bit-reversal permutation. `FirstMostSignificant`
/// merges from the far end instead, the qudit index coincides with the
/// register's own ordering, and the matrix is applied as given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitOrder {
    FirstLeastSignificant,
    FirstMostSignificant,
}

/// A compiled merge → unitary → split pipeline for an n-qubit gate.
#[derive(Debug, Clone)]
pub struct SynthesizedGate {
    qubit_count: usize,
    order: QubitOrder,
    qudit_unitary: GateMatrix,
    steps: Vec<String>,
}

impl SynthesizedGate {
    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn order(&self) -> QubitOrder {
        self.order
    }

    /// The 2ⁿ-dimensional unitary actually applied to the merged qudit.
    pub fn qudit_unitary(&self) -> &GateMatrix {
        &self.qudit_unitary
    }

    /// Human-readable circuit listing.
    pub fn steps(&self) -> &[String] {
        &self.steps
    }

    /// Number of measurements a run performs (for post-selection lists).
    pub fn measurement_count(&self) -> usize {
        2 * (self.qubit_count - 1)
    }
}

/// Permutation matrix sending basis vector `j` to `reverse_bits(j)` over n
/// bits; its own inverse.
fn bit_reversal(n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        let mut rev = 0usize;
        for b in 0..n {
            if j & (1 << b) != 0 {
                rev |= 1 << (n - 1 - b);
            }
        }
        m[(rev, j)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Plans the merge → unitary → split pipeline implementing the n-qubit gate
/// `u` (a 2ⁿ×2ⁿ unitary over the register's big-endian computational basis).
pub fn synthesize_gate(u: &GateMatrix, n: usize, order: QubitOrder) -> Result<SynthesizedGate> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidProtocolInput(format!(
            "qubit count {n} outside supported range 2..=4"
        )));
    }
    if !u.is_unitary() {
        return Err(Error::NotUnitary(f64::NAN));
    }
    let dim = 1usize << n;
    if u.side() != dim {
        return Err(Error::DimensionMismatch(format!(
            "gate is {}×{}, expected {dim}×{dim}",
            u.side(),
            u.side()
        )));
    }

    let qudit_unitary = match order {
        QubitOrder::FirstMostSignificant => GateMatrix::unitary(&[dim], u.matrix().clone())?,
        QubitOrder::FirstLeastSignificant => {
            let r = bit_reversal(n);
            GateMatrix::unitary(&[dim], &r * u.matrix() * &r)?
        }
    };

    let mut steps = Vec::new();
    match order {
        QubitOrder::FirstLeastSignificant => {
            for k in 2..=n {
                steps.push(format!(
                    "merge(2,{}→{}) absorbing qubit {k}",
                    1 << (k - 1),
                    1 << k
                ));
            }
        }
        QubitOrder::FirstMostSignificant => {
            for k in (1..n).rev() {
                steps.push(format!(
                    "merge(2,{}→{}) absorbing qubit {k}",
                    1 << (n - k - 1),
                    1 << (n - k)
                ));
            }
        }
    }
    steps.push(format!(
        "apply {dim}×{dim} unitary ({})",
        match order {
            QubitOrder::FirstLeastSignificant => "bit-reversed basis, qubit 1 least significant",
            QubitOrder::FirstMostSignificant => "register basis, qubit 1 most significant",
        }
    ));
    for k in (1..n).rev() {
        steps.push(format!("split({}→2,{})", 1 << (k + 1), 1 << k));
    }

    Ok(SynthesizedGate {
        qubit_count: n,
        order,
        qudit_unitary,
        steps,
    })
}

/// Runs the pipeline on an n-qubit input state.
pub fn run_synthesized(
    gate: &SynthesizedGate,
    input: &HybridState,
    mode: &CompletionMode,
    seed: u64,
) -> Result<ProtocolResult> {
    let n = gate.qubit_count;
    if input.dims() != vec![2; n] {
        return Err(Error::InvalidProtocolInput(format!(
            "expected an {n}-qubit register, got {:?}",
            input.dims()
        )));
    }
    if !input.is_normalized() {
        return Err(Error::InvalidProtocolInput("input must be normalized".into()));
    }
    let mut runner = Runner::new(mode, seed);
    let mut s = input.clone();

    match gate.order {
        QubitOrder::FirstLeastSignificant => {
            for _ in 0..n - 1 {
                s = merge_step(&mut runner, &s, 1, 0)?;
            }
            s = apply(&s, &gate.qudit_unitary, &[0])?;
            for k in 0..n - 1 {
                s = split_step(&mut runner, &s, k)?;
            }
            // splits emit the qubits last-merged-first; restore register order
            let perm: Vec<usize> = (0..n).rev().collect();
            s = s.permute_subsystems(&perm)?;
        }
        QubitOrder::FirstMostSignificant => {
            for i in 0..n - 1 {
                s = merge_step(&mut runner, &s, n - 2 - i, n - 1 - i)?;
            }
            s = apply(&s, &gate.qudit_unitary, &[0])?;
            for k in 0..n - 1 {
                s = split_step(&mut runner, &s, k)?;
            }
        }
    }
    Ok(runner.finish(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{controlled, gate_i, gate_x, random_state, random_unitary};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ccz() -> GateMatrix {
        let mut m = DMatrix::<Complex64>::identity(8, 8);
        m[(7, 7)] = Complex64::new(-1.0, 0.0);
        GateMatrix::unitary(&[8], m).unwrap()
    }

    #[test]
    fn identity_pipeline_is_identity() {
        let gate = synthesize_gate(&gate_i(8), 3, QubitOrder::FirstLeastSignificant).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let input = random_state(&[2, 2, 2], &mut rng);
        let out = run_synthesized(&gate, &input, &CompletionMode::FeedForward, 1).unwrap();
        assert!(out.final_state.approx_eq_global_phase(&input, 1e-10));
        assert_eq!(out.outcome_log.len(), 4);
    }

    #[test]
    fn ccz_pipeline_matches_direct_application() {
        let u = ccz();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for order in [QubitOrder::FirstLeastSignificant, QubitOrder::FirstMostSignificant] {
            let gate = synthesize_gate(&u, 3, order).unwrap();
            for seed in 0..5 {
                let input = random_state(&[2, 2, 2], &mut rng);
                let direct = apply(&input, &u.with_dims(&[2, 2, 2]).unwrap(), &[0, 1, 2]).unwrap();
                let out =
                    run_synthesized(&gate, &input, &CompletionMode::FeedForward, seed).unwrap();
                assert!(out.final_state.approx_eq_global_phase(&direct, 1e-10));
            }
        }
    }

    #[test]
    fn cnot_tensor_identity_matches() {
        // CNOT on qubits (1,2) ⊗ I on qubit 3, expanded to 8×8
        let cnot = controlled(&gate_x()).unwrap();
        let big = cnot.matrix().kronecker(gate_i(2).matrix());
        let u = GateMatrix::unitary(&[8], big).unwrap();
        let gate = synthesize_gate(&u, 3, QubitOrder::FirstLeastSignificant).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let input = random_state(&[2, 2, 2], &mut rng);
        let direct = apply(&input, &u.with_dims(&[2, 2, 2]).unwrap(), &[0, 1, 2]).unwrap();
        let out = run_synthesized(&gate, &input, &CompletionMode::FeedForward, 9).unwrap();
        assert!(out.final_state.approx_eq_global_phase(&direct, 1e-10));
    }

    #[test]
    fn random_unitaries_both_orders_n2() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in 0..20 {
            let u = random_unitary(4, &mut rng);
            let input = random_state(&[2, 2], &mut rng);
            let direct = apply(&input, &u.with_dims(&[2, 2]).unwrap(), &[0, 1]).unwrap();
            for order in [QubitOrder::FirstLeastSignificant, QubitOrder::FirstMostSignificant] {
                let gate = synthesize_gate(&u, 2, order).unwrap();
                let out =
                    run_synthesized(&gate, &input, &CompletionMode::FeedForward, k).unwrap();
                assert!(out.final_state.approx_eq_global_phase(&direct, 1e-10));
            }
        }
    }

    #[test]
    fn four_qubit_pipeline() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(16, &mut rng);
        let gate = synthesize_gate(&u, 4, QubitOrder::FirstLeastSignificant).unwrap();
        let input = random_state(&[2, 2, 2, 2], &mut rng);
        let direct = apply(&input, &u.with_dims(&[2, 2, 2, 2]).unwrap(), &[0, 1, 2, 3]).unwrap();
        let out = run_synthesized(&gate, &input, &CompletionMode::FeedForward, 2).unwrap();
        assert!(out.final_state.approx_eq_global_phase(&direct, 1e-10));
        assert_eq!(out.outcome_log.len(), 6);
    }

    #[test]
    fn post_selected_pipeline_probability() {
        let u = ccz();
        let gate = synthesize_gate(&u, 3, QubitOrder::FirstLeastSignificant).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let input = random_state(&[2, 2, 2], &mut rng);
        // keep the correction-free branch of all four measurements
        let mode = CompletionMode::PostSelect(vec![0, 0, 0, 0]);
        let out = run_synthesized(&gate, &input, &mode, 0).unwrap();
        assert_relative_eq!(out.success_probability, 1.0 / 16.0, epsilon = 1e-10);
        let direct = apply(&input, &u.with_dims(&[2, 2, 2]).unwrap(), &[0, 1, 2]).unwrap();
        assert!(out.final_state.approx_eq_global_phase(&direct, 1e-10));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(synthesize_gate(&gate_i(8), 5, QubitOrder::FirstLeastSignificant).is_err());
        assert!(synthesize_gate(&gate_i(4), 3, QubitOrder::FirstLeastSignificant).is_err());
        let m = DMatrix::<Complex64>::zeros(8, 8);
        let not_unitary = GateMatrix::operator(&[8], m).unwrap();
        assert!(synthesize_gate(&not_unitary, 3, QubitOrder::FirstLeastSignificant).is_err());
    }

    #[test]
    fn description_lists_pipeline() {
        let gate = synthesize_gate(&ccz(), 3, QubitOrder::FirstLeastSignificant).unwrap();
        assert_eq!(gate.steps().len(), 5);
        assert!(gate.steps()[0].contains("merge(2,2→4)"));
        assert!(gate.steps()[4].contains("split(4→2,2)"));
        assert_eq!(gate.measurement_count(), 4);
    }
}
