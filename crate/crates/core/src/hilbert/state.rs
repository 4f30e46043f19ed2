//! Pure states over registers of mixed-dimension subsystems.
//!
//! A register is an ordered list of subsystem dimensions, e.g. `[2, 4]` for a
//! qubit next to a ququart. Amplitudes are stored row-major with the first
//! subsystem most significant, so the basis ket `|x⟩|i⟩` of a `[2, d]`
//! register sits at flat index `x·d + i`. That convention makes the
//! qubit⊗qudit ↔ 2d-level identification a plain reinterpretation of the
//! amplitude vector (see [`HybridState::merge_pair`]).

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::TOL_ALGEBRAIC;

/// Pure state of a register of subsystems with arbitrary dimensions ≥ 2.
///
/// States are normalized on construction. Post-selection intermediates keep
/// their reduced norm and are flagged `normalized = false`; the squared norm
/// of such a state is the success probability of the branch that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    dims: Vec<usize>,
    amps: DVector<Complex64>,
    normalized: bool,
}

impl HybridState {
    /// Builds a normalized state from raw amplitudes.
    pub fn new(dims: &[usize], amps: &[Complex64]) -> Result<Self> {
        let total = check_dims(dims)?;
        if amps.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                got: amps.len(),
            });
        }
        let mut v = DVector::from_column_slice(amps);
        let norm = v.norm();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        v /= Complex64::new(norm, 0.0);
        Ok(Self {
            dims: dims.to_vec(),
            amps: v,
            normalized: true,
        })
    }

    /// Builds a state from real amplitudes.
    pub fn from_real(dims: &[usize], amps: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = amps.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(dims, &c)
    }

    /// The computational basis state `|levels[0], levels[1], ...⟩`.
    pub fn basis(dims: &[usize], levels: &[usize]) -> Result<Self> {
        let total = check_dims(dims)?;
        if levels.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} levels for {} subsystems",
                levels.len(),
                dims.len()
            )));
        }
        for (i, (&l, &d)) in levels.iter().zip(dims).enumerate() {
            if l >= d {
                return Err(Error::DimensionMismatch(format!(
                    "level {l} out of range for subsystem {i} of dimension {d}"
                )));
            }
        }
        let mut v = DVector::zeros(total);
        v[flat_index(dims, levels)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            dims: dims.to_vec(),
            amps: v,
            normalized: true,
        })
    }

    /// The single-qubit `(|0⟩ + |1⟩)/√2` state.
    pub fn plus() -> Self {
        Self::from_real(&[2], &[1.0, 1.0]).expect("static state")
    }

    /// Wraps an amplitude vector without rescaling, for post-selection
    /// intermediates. The norm must lie in (0, 1 + tol].
    pub fn unnormalized(dims: &[usize], amps: DVector<Complex64>) -> Result<Self> {
        let total = check_dims(dims)?;
        if amps.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        if norm > 1.0 + TOL_ALGEBRAIC {
            return Err(Error::NotNormalized(norm));
        }
        let normalized = (norm - 1.0).abs() <= TOL_ALGEBRAIC;
        Ok(Self {
            dims: dims.to_vec(),
            amps,
            normalized,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, levels: &[usize]) -> Complex64 {
        self.amps[flat_index(&self.dims, levels)]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Squared norm; for a post-selected branch this is its Born probability.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// Rescales to unit norm. Renormalization after post-selection is always
    /// this explicit call, never implicit.
    pub fn renormalize(&self) -> Self {
        let norm = self.amps.norm();
        Self {
            dims: self.dims.clone(),
            amps: &self.amps / Complex64::new(norm, 0.0),
            normalized: true,
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = self.amps.kronecker(&other.amps);
        let normalized = self.normalized && other.normalized;
        Self {
            dims,
            amps,
            normalized,
        }
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Squared overlap `|⟨self|other⟩|²`, the pure-state fidelity. Global
    /// phase drops out, which is why state comparisons go through this.
    pub fn overlap_sqr(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// True when the two states agree up to a global phase.
    pub fn approx_eq_global_phase(&self, other: &Self, tol: f64) -> bool {
        if self.dims != other.dims {
            return false;
        }
        let a = self.renormalize();
        let b = other.renormalize();
        (a.overlap_sqr(&b) - 1.0).abs() <= tol
    }

    /// Reorders subsystems: new subsystem `k` is old subsystem `perm[k]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {} subsystems",
                perm.len(),
                n
            )));
        }
        for &p in perm {
            if p >= n {
                return Err(Error::IndexOutOfRange { index: p, count: n });
            }
            if seen[p] {
                return Err(Error::DuplicateTarget(p));
            }
            seen[p] = true;
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut amps = DVector::zeros(self.amps.len());
        let mut levels = vec![0usize; n];
        let mut new_levels = vec![0usize; n];
        for i in 0..self.amps.len() {
            unflatten(&self.dims, i, &mut levels);
            for (k, &p) in perm.iter().enumerate() {
                new_levels[k] = levels[p];
            }
            amps[flat_index(&new_dims, &new_levels)] = self.amps[i];
        }
        Ok(Self {
            dims: new_dims,
            amps,
            normalized: self.normalized,
        })
    }

    /// Contracts subsystem `idx` with `⟨bra|`, dropping it from the register.
    /// Returns the (unnormalized) remainder and the branch probability
    /// `‖⟨bra|ψ⟩‖²`. `bra` must be a unit vector of the subsystem dimension.
    pub fn project_subsystem(&self, idx: usize, bra: &[Complex64]) -> Result<(Self, f64)> {
        let n = self.dims.len();
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, count: n });
        }
        if n == 1 {
            return Err(Error::DimensionMismatch(
                "cannot project out the only subsystem".into(),
            ));
        }
        let d = self.dims[idx];
        if bra.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: bra.len(),
            });
        }
        let bnorm: f64 = bra.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (bnorm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(bnorm));
        }
        let mut rem_dims = self.dims.clone();
        rem_dims.remove(idx);
        let rem_total: usize = rem_dims.iter().product();
        let mut out = DVector::zeros(rem_total);
        let mut levels = vec![0usize; n];
        for i in 0..self.amps.len() {
            unflatten(&self.dims, i, &mut levels);
            let l = levels[idx];
            let mut rem_levels = levels.clone();
            rem_levels.remove(idx);
            out[flat_index(&rem_dims, &rem_levels)] += bra[l].conj() * self.amps[i];
        }
        let prob = out.norm_squared();
        if prob <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let state = Self {
            dims: rem_dims,
            amps: out,
            normalized: false,
        };
        Ok((state, prob))
    }

    /// Enlarges subsystem `idx` from dimension d to `new_dim` by the identity
    /// injection `|i⟩ ↦ |i⟩`; the added levels carry zero amplitude.
    pub fn embed_subsystem(&self, idx: usize, new_dim: usize) -> Result<Self> {
        let n = self.dims.len();
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, count: n });
        }
        let d = self.dims[idx];
        if new_dim < d {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed dimension {d} into smaller dimension {new_dim}"
            )));
        }
        let mut new_dims = self.dims.clone();
        new_dims[idx] = new_dim;
        let total: usize = new_dims.iter().product();
        let mut out = DVector::zeros(total);
        let mut levels = vec![0usize; n];
        for i in 0..self.amps.len() {
            unflatten(&self.dims, i, &mut levels);
            out[flat_index(&new_dims, &levels)] = self.amps[i];
        }
        Ok(Self {
            dims: new_dims,
            amps: out,
            normalized: self.normalized,
        })
    }

    /// Keeps only the listed levels of subsystem `idx`, reindexed to
    /// `0..block.len()` in the given order. The result is unnormalized; its
    /// squared norm is the weight of the kept block.
    pub fn restrict_subsystem(&self, idx: usize, block: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, count: n });
        }
        let d = self.dims[idx];
        if block.is_empty() || block.iter().any(|&b| b >= d) {
            return Err(Error::InvalidPartition(format!(
                "block {block:?} invalid for dimension {d}"
            )));
        }
        let mut pos = vec![None; d];
        for (k, &b) in block.iter().enumerate() {
            if pos[b].is_some() {
                return Err(Error::InvalidPartition(format!("level {b} repeated")));
            }
            pos[b] = Some(k);
        }
        let mut new_dims = self.dims.clone();
        new_dims[idx] = block.len();
        let total: usize = new_dims.iter().product();
        let mut out = DVector::zeros(total);
        let mut levels = vec![0usize; n];
        for i in 0..self.amps.len() {
            unflatten(&self.dims, i, &mut levels);
            if let Some(k) = pos[levels[idx]] {
                let mut new_levels = levels.clone();
                new_levels[idx] = k;
                out[flat_index(&new_dims, &new_levels)] = self.amps[i];
            }
        }
        if out.norm_squared() <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            dims: new_dims,
            amps: out,
            normalized: false,
        })
    }

    /// Canonical identification of an adjacent (qubit, d-level) pair with a
    /// single 2d-level subsystem: `|x⟩|i⟩ ↦ |i + x·d⟩`. With the big-endian
    /// flat ordering this permutes nothing — the amplitude vector is reused
    /// as-is and only the dimension list changes.
    pub fn merge_pair(&self, qubit_idx: usize, qudit_idx: usize) -> Result<Self> {
        let n = self.dims.len();
        if qubit_idx >= n || qudit_idx >= n {
            return Err(Error::IndexOutOfRange {
                index: qubit_idx.max(qudit_idx),
                count: n,
            });
        }
        if qudit_idx != qubit_idx + 1 {
            return Err(Error::DimensionMismatch(
                "merge_pair expects the qudit immediately after the qubit".into(),
            ));
        }
        if self.dims[qubit_idx] != 2 {
            return Err(Error::DimensionMismatch(format!(
                "subsystem {qubit_idx} has dimension {}, expected 2",
                self.dims[qubit_idx]
            )));
        }
        let d = self.dims[qudit_idx];
        let mut new_dims = self.dims.clone();
        new_dims[qubit_idx] = 2 * d;
        new_dims.remove(qudit_idx);
        Ok(Self {
            dims: new_dims,
            amps: self.amps.clone(),
            normalized: self.normalized,
        })
    }

    /// Inverse of [`merge_pair`](Self::merge_pair): splits an even-dimension
    /// subsystem into a (qubit, half-dimension) pair, `|i + x·d⟩ ↦ |x⟩|i⟩`.
    pub fn split_subsystem(&self, idx: usize) -> Result<Self> {
        let n = self.dims.len();
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, count: n });
        }
        let dd = self.dims[idx];
        if !dd.is_multiple_of(2) || dd < 4 {
            return Err(Error::DimensionMismatch(format!(
                "subsystem {idx} has dimension {dd}, expected an even dimension ≥ 4"
            )));
        }
        let mut new_dims = self.dims.clone();
        new_dims[idx] = 2;
        new_dims.insert(idx + 1, dd / 2);
        Ok(Self {
            dims: new_dims,
            amps: self.amps.clone(),
            normalized: self.normalized,
        })
    }
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::DimensionMismatch("empty dimension list".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimension {d} < 2"
        )));
    }
    Ok(dims.iter().product())
}

/// Flat index of the basis ket with the given per-subsystem levels.
pub fn flat_index(dims: &[usize], levels: &[usize]) -> usize {
    debug_assert_eq!(dims.len(), levels.len());
    let mut idx = 0;
    for (&d, &l) in dims.iter().zip(levels) {
        idx = idx * d + l;
    }
    idx
}

/// Per-subsystem levels of flat index `idx`, written into `out`.
pub fn unflatten(dims: &[usize], idx: usize, out: &mut [usize]) {
    let mut rem = idx;
    for k in (0..dims.len()).rev() {
        out[k] = rem % dims[k];
        rem /= dims[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_state_normalizes() {
        // four equal amplitudes become 1/2 each
        let s = HybridState::from_real(&[4], &[1.0, 1.0, 1.0, 1.0]).unwrap();
        for i in 0..4 {
            assert_relative_eq!(s.amplitudes()[i].re, 0.5, epsilon = 1e-15);
        }
        assert!(s.is_normalized());
    }

    #[test]
    fn make_state_rejects_bad_input() {
        assert!(HybridState::from_real(&[4], &[1.0, 0.0]).is_err());
        assert!(HybridState::from_real(&[4], &[0.0; 4]).is_err());
        assert!(HybridState::from_real(&[1], &[1.0]).is_err());
    }

    #[test]
    fn basis_state() {
        let s = HybridState::basis(&[4], &[0]).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        let s = HybridState::basis(&[2, 4], &[1, 2]).unwrap();
        assert_eq!(s.amplitudes()[6], c(1.0, 0.0));
    }

    #[test]
    fn tensor_product_expansion() {
        // |+⟩ ⊗ |0⟩₄ → dims [2,4], amps (1/√2, 0, 0, 0, 1/√2, 0, 0, 0)
        let plus = HybridState::plus();
        let zero4 = HybridState::basis(&[4], &[0]).unwrap();
        let s = plus.tensor(&zero4);
        assert_eq!(s.dims(), &[2, 4]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(s.amplitudes()[0].re, r, epsilon = 1e-15);
        assert_relative_eq!(s.amplitudes()[4].re, r, epsilon = 1e-15);
        assert_relative_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-15);

        // |0⟩ ⊗ |0⟩ = |00⟩
        let z = HybridState::basis(&[2], &[0]).unwrap();
        let s = z.tensor(&z);
        assert_eq!(s.amplitude(&[0, 0]), c(1.0, 0.0));
    }

    #[test]
    fn tensor_of_general_pair() {
        // (ε,ζ) qubit ⊗ (η,κ,λ,μ) ququart → eight products εη … ζμ
        let a = HybridState::new(&[2], &[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = HybridState::from_real(&[4], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let s = a.tensor(&b);
        for x in 0..2 {
            for i in 0..4 {
                let expect = a.amplitudes()[x] * b.amplitudes()[i];
                assert!((s.amplitude(&[x, i]) - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn merge_pair_is_contiguous_relabel() {
        // |1⟩|0⟩ with d = 4 ↦ |4⟩ of an 8-level system
        let s = HybridState::basis(&[2, 4], &[1, 0]).unwrap();
        let m = s.merge_pair(0, 1).unwrap();
        assert_eq!(m.dims(), &[8]);
        assert_eq!(m.amplitudes()[4], c(1.0, 0.0));

        // |0⟩|i⟩ ↦ |i⟩
        let s = HybridState::basis(&[2, 4], &[0, 3]).unwrap();
        let m = s.merge_pair(0, 1).unwrap();
        assert_eq!(m.amplitudes()[3], c(1.0, 0.0));
    }

    #[test]
    fn merge_split_round_trip_exact() {
        let amps: Vec<Complex64> = (0..8).map(|k| c(k as f64 + 1.0, 0.3 * k as f64)).collect();
        let s = HybridState::new(&[2, 4], &amps).unwrap();
        let rt = s.merge_pair(0, 1).unwrap().split_subsystem(0).unwrap();
        assert_eq!(rt.dims(), s.dims());
        assert_eq!(rt.amplitudes(), s.amplitudes());
    }

    #[test]
    fn permute_subsystems_moves_amplitudes() {
        let s = HybridState::basis(&[2, 3, 2], &[1, 2, 0]).unwrap();
        let p = s.permute_subsystems(&[2, 0, 1]).unwrap();
        assert_eq!(p.dims(), &[2, 2, 3]);
        assert_eq!(p.amplitude(&[0, 1, 2]), c(1.0, 0.0));
    }

    #[test]
    fn project_subsystem_gives_branch_probability() {
        let plus = HybridState::plus();
        let zero4 = HybridState::basis(&[4], &[0]).unwrap();
        let s = plus.tensor(&zero4);
        let bra = [c(1.0, 0.0), c(0.0, 0.0)];
        let (rest, prob) = s.project_subsystem(0, &bra).unwrap();
        assert_relative_eq!(prob, 0.5, epsilon = 1e-15);
        assert_eq!(rest.dims(), &[4]);
        assert_relative_eq!(rest.renormalize().amplitudes()[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn restrict_keeps_block_weight() {
        let s = HybridState::from_real(&[2, 4], &[0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5])
            .unwrap();
        let r = s.restrict_subsystem(1, &[0, 1]).unwrap();
        assert_eq!(r.dims(), &[2, 2]);
        assert_relative_eq!(r.norm_sqr(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn distributed_form_maps_to_concentrated_form() {
        // the [2, 4] state with the four-level side confined to its lower
        // half is, up to relabelling, the four-level state with the same
        // four coefficients: restrict the block, then merge the pair
        let (a, b, g, d) = (c(0.1, 0.2), c(0.3, -0.1), c(-0.4, 0.5), c(0.2, 0.6));
        let distributed = HybridState::new(
            &[2, 4],
            &[a, b, c(0.0, 0.0), c(0.0, 0.0), g, d, c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let concentrated = distributed
            .restrict_subsystem(1, &[0, 1])
            .unwrap()
            .renormalize()
            .merge_pair(0, 1)
            .unwrap();
        assert_eq!(concentrated.dims(), &[4]);
        let expect = HybridState::new(&[4], &[a, b, g, d]).unwrap();
        assert!(concentrated.approx_eq_global_phase(&expect, 1e-12));
    }

    #[test]
    fn global_phase_equality() {
        let a = HybridState::from_real(&[2], &[0.6, 0.8]).unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let amps: Vec<Complex64> = a.amplitudes().iter().map(|&x| x * phase).collect();
        let b = HybridState::new(&[2], &amps).unwrap();
        assert!(a.approx_eq_global_phase(&b, 1e-12));
        let c_state = HybridState::from_real(&[2], &[0.8, 0.6]).unwrap();
        assert!(!a.approx_eq_global_phase(&c_state, 1e-12));
    }
}
