//! Projective measurements on register subsystems.
//!
//! Both measurement flavors sample an outcome from the Born distribution
//! using a caller-supplied generator, so a fixed seed replays the same
//! outcome sequence. The collapsed register keeps its full dimension list.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::state::{unflatten, HybridState};
use crate::TOL_ACCUM;

/// One sampled measurement: outcome label, its Born probability, and the
/// renormalized post-measurement state.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub outcome: usize,
    pub probability: f64,
    pub post_state: HybridState,
}

/// Measures subsystem `idx` in the given orthonormal basis (one vector per
/// level). The post-state leaves the subsystem in the measured basis vector.
pub fn measure_basis<R: Rng>(
    state: &HybridState,
    idx: usize,
    basis: &[Vec<Complex64>],
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let branches = basis_branches(state, idx, basis)?;
    sample_branch(branches, rng)
}

/// All outcomes of a basis measurement, with exact probabilities and
/// renormalized post-states. Deterministic companion to [`measure_basis`].
pub fn basis_branches(
    state: &HybridState,
    idx: usize,
    basis: &[Vec<Complex64>],
) -> Result<Vec<MeasurementRecord>> {
    let n = state.subsystem_count();
    if idx >= n {
        return Err(Error::IndexOutOfRange { index: idx, count: n });
    }
    let d = state.dims()[idx];
    check_orthonormal(basis, d)?;

    let norm_sqr = state.norm_sqr();
    let mut branches = Vec::with_capacity(d);
    for (k, b) in basis.iter().enumerate() {
        // amplitude onto |b_k⟩ on the subsystem, keeping the slot in place
        let mut amps = nalgebra::DVector::<Complex64>::zeros(state.total_dim());
        let mut levels = vec![0usize; n];
        // coefficient c(rest) = Σ_l  b̄_l ψ(levels with idx=l); post-state
        // amplitude at idx=l' is c(rest)·b_{l'}
        let mut rest_coeff = std::collections::HashMap::new();
        for i in 0..state.total_dim() {
            unflatten(state.dims(), i, &mut levels);
            let l = levels[idx];
            let mut key = levels.clone();
            key[idx] = 0;
            *rest_coeff.entry(key).or_insert(Complex64::default()) +=
                b[l].conj() * state.amplitudes()[i];
        }
        let mut prob = 0.0;
        for (key, coeff) in &rest_coeff {
            prob += coeff.norm_sqr();
            for (lp, &bl) in b.iter().enumerate() {
                let mut lv = key.clone();
                lv[idx] = lp;
                amps[crate::hilbert::state::flat_index(state.dims(), &lv)] = coeff * bl;
            }
        }
        prob /= norm_sqr;
        let post = if prob > 0.0 {
            HybridState::new(state.dims(), amps.as_slice())?
        } else {
            state.renormalize()
        };
        branches.push(MeasurementRecord {
            outcome: k,
            probability: prob,
            post_state: post,
        });
    }
    debug_assert!(
        (branches.iter().map(|b| b.probability).sum::<f64>() - 1.0).abs() < TOL_ACCUM
    );
    Ok(branches)
}

/// Measures whether subsystem `idx` lies in one of the level blocks of
/// `partition` (a disjoint cover of the subsystem levels). Coherence inside
/// the surviving block is untouched.
pub fn measure_subspace<R: Rng>(
    state: &HybridState,
    idx: usize,
    partition: &[Vec<usize>],
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let branches = subspace_branches(state, idx, partition)?;
    sample_branch(branches, rng)
}

/// All outcomes of a subspace measurement. Deterministic companion to
/// [`measure_subspace`].
pub fn subspace_branches(
    state: &HybridState,
    idx: usize,
    partition: &[Vec<usize>],
) -> Result<Vec<MeasurementRecord>> {
    let n = state.subsystem_count();
    if idx >= n {
        return Err(Error::IndexOutOfRange { index: idx, count: n });
    }
    let d = state.dims()[idx];
    let mut owner = vec![None; d];
    for (k, block) in partition.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::InvalidPartition(format!("block {k} is empty")));
        }
        for &l in block {
            if l >= d {
                return Err(Error::InvalidPartition(format!(
                    "level {l} out of range for dimension {d}"
                )));
            }
            if owner[l].is_some() {
                return Err(Error::InvalidPartition(format!("level {l} repeated")));
            }
            owner[l] = Some(k);
        }
    }
    if owner.iter().any(Option::is_none) {
        return Err(Error::InvalidPartition(
            "partition does not cover all levels".into(),
        ));
    }

    let norm_sqr = state.norm_sqr();
    let mut branches = Vec::with_capacity(partition.len());
    let mut levels = vec![0usize; n];
    for (k, _) in partition.iter().enumerate() {
        let mut amps = nalgebra::DVector::<Complex64>::zeros(state.total_dim());
        let mut prob = 0.0;
        for i in 0..state.total_dim() {
            unflatten(state.dims(), i, &mut levels);
            if owner[levels[idx]] == Some(k) {
                amps[i] = state.amplitudes()[i];
                prob += amps[i].norm_sqr();
            }
        }
        prob /= norm_sqr;
        let post = if prob > 0.0 {
            HybridState::new(state.dims(), amps.as_slice())?
        } else {
            state.renormalize()
        };
        branches.push(MeasurementRecord {
            outcome: k,
            probability: prob,
            post_state: post,
        });
    }
    Ok(branches)
}

fn sample_branch<R: Rng>(
    branches: Vec<MeasurementRecord>,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let roll: f64 = rng.gen();
    let mut acc = 0.0;
    let last = branches.len() - 1;
    for (i, b) in branches.into_iter().enumerate() {
        acc += b.probability;
        if roll < acc || i == last {
            return Ok(b);
        }
    }
    unreachable!("probabilities cover [0, 1)");
}

fn check_orthonormal(basis: &[Vec<Complex64>], d: usize) -> Result<()> {
    if basis.len() != d {
        return Err(Error::NotOrthonormal(f64::NAN));
    }
    let mut dev: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        if a.len() != d {
            return Err(Error::NotOrthonormal(f64::NAN));
        }
        for (j, b) in basis.iter().enumerate() {
            let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot - Complex64::new(expect, 0.0)).norm());
        }
    }
    if dev > TOL_ACCUM {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

/// The `{|+⟩, |−⟩}` qubit basis, outcomes 0 = `+`, 1 = `−`.
pub fn plus_minus_basis() -> Vec<Vec<Complex64>> {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![vec![r, r], vec![r, -r]]
}

/// The computational qubit basis.
pub fn computational_basis(d: usize) -> Vec<Vec<Complex64>> {
    (0..d)
        .map(|k| {
            let mut v = vec![Complex64::default(); d];
            v[k] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn plus_state_in_plus_minus_basis_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rec = measure_basis(&HybridState::plus(), 0, &plus_minus_basis(), &mut rng).unwrap();
        assert_eq!(rec.outcome, 0);
        assert_relative_eq!(rec.probability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn born_rule_on_computational_basis() {
        let s = HybridState::new(&[2], &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let branches = basis_branches(&s, 0, &computational_basis(2)).unwrap();
        assert_relative_eq!(branches[0].probability, 0.36, epsilon = 1e-12);
        assert_relative_eq!(branches[1].probability, 0.64, epsilon = 1e-12);
        assert_relative_eq!(
            branches.iter().map(|b| b.probability).sum::<f64>(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn subspace_measurement_preserves_block_coherence() {
        let s = HybridState::from_real(&[4], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let branches = subspace_branches(&s, 0, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_relative_eq!(branches[0].probability, 0.5, epsilon = 1e-12);
        let post = &branches[0].post_state;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(post.amplitudes()[0].re, r, epsilon = 1e-12);
        assert_relative_eq!(post.amplitudes()[1].re, r, epsilon = 1e-12);
        assert_relative_eq!(post.amplitudes()[2].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn certain_block_leaves_state_unchanged() {
        let s = HybridState::from_real(&[4], &[0.6, 0.8, 0.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = measure_subspace(&s, 0, &[vec![0, 1], vec![2, 3]], &mut rng).unwrap();
        assert_eq!(rec.outcome, 0);
        assert_relative_eq!(rec.probability, 1.0, epsilon = 1e-12);
        assert_eq!(rec.post_state.amplitudes(), s.amplitudes());

        let upper = HybridState::basis(&[4], &[2]).unwrap();
        let rec = measure_subspace(&upper, 0, &[vec![0, 1], vec![2, 3]], &mut rng).unwrap();
        assert_eq!(rec.outcome, 1);
        assert_relative_eq!(rec.probability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_partition_rejected() {
        let s = HybridState::basis(&[4], &[0]).unwrap();
        assert!(subspace_branches(&s, 0, &[vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(subspace_branches(&s, 0, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let s = HybridState::plus();
        let bad = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        assert!(basis_branches(&s, 0, &bad).is_err());
    }

    #[test]
    fn seeded_outcomes_replay() {
        let s = HybridState::from_real(&[2, 2], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| {
                    measure_basis(&s, 0, &computational_basis(2), &mut rng)
                        .unwrap()
                        .outcome
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(123), run(123));
    }

    #[test]
    fn diagonal_basis_on_three_photon_style_state() {
        // Measuring the second qubit of a GHZ-like [2,2,4] state in the
        // diagonal basis splits 50/50 for any ququart payload.
        let eta = c(0.31, 0.2);
        let kappa = c(-0.4, 0.1);
        let lambda = c(0.5, -0.25);
        let mu = c(0.3, 0.52);
        let mut amps = vec![Complex64::default(); 16];
        // |00⟩⊗(η,κ,λ,μ) + |11⟩⊗(λ,μ,η,κ), each branch weight 1/√2
        for (i, &v) in [eta, kappa, lambda, mu].iter().enumerate() {
            amps[i] = v;
        }
        for (i, &v) in [lambda, mu, eta, kappa].iter().enumerate() {
            amps[12 + i] = v;
        }
        let s = HybridState::new(&[2, 2, 4], &amps).unwrap();
        let branches = basis_branches(&s, 1, &plus_minus_basis()).unwrap();
        assert_relative_eq!(branches[0].probability, 0.5, epsilon = 1e-10);
        assert_relative_eq!(branches[1].probability, 0.5, epsilon = 1e-10);
    }
}
