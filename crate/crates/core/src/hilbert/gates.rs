//! Gate matrices and their application to register states.
//!
//! The library covers the permutation gates that move amplitude between the
//! lower and upper halves of an even-dimension system (`x2d` and its
//! four-level specializations `x4`, `x02`, `x13`), the half-space phase flip
//! `z2d`/`z4`, and the usual qubit gates. `controlled` promotes any unitary
//! to its qubit-controlled block form.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::state::{flat_index, unflatten, HybridState};
use crate::TOL_ALGEBRAIC;

/// A square operator acting on one or more subsystems of declared dimensions.
///
/// `unitary` records whether the matrix was verified unitary at construction;
/// non-unitary operators (losses, projections) are allowed but cannot be used
/// where a unitary is required.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dims: Vec<usize>,
    mat: DMatrix<Complex64>,
    unitary: bool,
}

impl GateMatrix {
    /// Wraps a matrix after checking shape and unitarity (‖U†U − I‖∞ within
    /// tolerance).
    pub fn unitary(dims: &[usize], mat: DMatrix<Complex64>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if mat.nrows() != side || mat.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{}, register dimension is {side}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = unitarity_deviation(&mat);
        if dev > TOL_ALGEBRAIC {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self {
            dims: dims.to_vec(),
            mat,
            unitary: true,
        })
    }

    /// Wraps a possibly non-unitary operator (norm may only decrease under
    /// post-selected elements, but that is the caller's concern).
    pub fn operator(dims: &[usize], mat: DMatrix<Complex64>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if mat.nrows() != side || mat.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{}, register dimension is {side}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            mat,
            unitary: false,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    /// Re-declares the subsystem layout without touching the matrix, e.g. to
    /// view an 8×8 unitary on one 8-level system as a three-qubit gate. The
    /// new dimension list must have the same product.
    pub fn with_dims(&self, dims: &[usize]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if side != self.side() {
            return Err(Error::DimensionMismatch(format!(
                "layout {dims:?} has dimension {side}, matrix side is {}",
                self.side()
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            mat: self.mat.clone(),
            unitary: self.unitary,
        })
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let mat = &self.mat * &other.mat;
        if self.unitary && other.unitary {
            Self::unitary(&self.dims, mat)
        } else {
            Self::operator(&self.dims, mat)
        }
    }
}

fn unitarity_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let prod = mat.adjoint() * mat;
    let n = mat.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((prod[(i, j)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    dev
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Identity on a d-level system.
pub fn gate_i(d: usize) -> GateMatrix {
    GateMatrix::unitary(&[d], DMatrix::identity(d, d)).expect("identity is unitary")
}

/// Swap of the lower and upper halves of a 2d-level system:
/// `|k⟩ ↔ |k+d⟩` for k in 0..d.
pub fn gate_x2d(d: usize) -> GateMatrix {
    assert!(d >= 1, "half-dimension must be at least 1");
    let n = 2 * d;
    let mut m = DMatrix::zeros(n, n);
    for k in 0..d {
        m[(k, k + d)] = one();
        m[(k + d, k)] = one();
    }
    GateMatrix::unitary(&[n], m).expect("permutation is unitary")
}

/// Phase flip of the upper half of a 2d-level system:
/// `|k+d⟩ ↦ −|k+d⟩` for k in 0..d.
pub fn gate_z2d(d: usize) -> GateMatrix {
    assert!(d >= 1, "half-dimension must be at least 1");
    let n = 2 * d;
    let mut m = DMatrix::identity(n, n);
    for k in 0..d {
        m[(k + d, k + d)] = -one();
    }
    GateMatrix::unitary(&[n], m).expect("diagonal ±1 is unitary")
}

/// Four-level swap `|0⟩↔|2⟩`, `|1⟩↔|3⟩`.
pub fn gate_x4() -> GateMatrix {
    gate_x2d(2)
}

/// Four-level phase flip of `|2⟩` and `|3⟩`.
pub fn gate_z4() -> GateMatrix {
    gate_z2d(2)
}

/// Four-level swap of `|0⟩` and `|2⟩` only.
pub fn gate_x02() -> GateMatrix {
    let mut m = DMatrix::identity(4, 4);
    m[(0, 0)] = Complex64::default();
    m[(2, 2)] = Complex64::default();
    m[(0, 2)] = one();
    m[(2, 0)] = one();
    GateMatrix::unitary(&[4], m).expect("permutation is unitary")
}

/// Four-level swap of `|1⟩` and `|3⟩` only.
pub fn gate_x13() -> GateMatrix {
    let mut m = DMatrix::identity(4, 4);
    m[(1, 1)] = Complex64::default();
    m[(3, 3)] = Complex64::default();
    m[(1, 3)] = one();
    m[(3, 1)] = one();
    GateMatrix::unitary(&[4], m).expect("permutation is unitary")
}

/// Qubit NOT.
pub fn gate_x() -> GateMatrix {
    gate_x2d(1)
}

/// Qubit Z.
pub fn gate_z() -> GateMatrix {
    gate_z2d(1)
}

/// Qubit Hadamard.
pub fn gate_h() -> GateMatrix {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let m = DMatrix::from_row_slice(2, 2, &[r, r, r, -r]);
    GateMatrix::unitary(&[2], m).expect("hadamard is unitary")
}

/// Block form `diag(I, U)` on a `[2, dim(U)]` register; the qubit listed
/// first is the control.
pub fn controlled(u: &GateMatrix) -> Result<GateMatrix> {
    if !u.is_unitary() {
        return Err(Error::NotUnitary(f64::NAN));
    }
    let d = u.side();
    let n = 2 * d;
    let mut m = DMatrix::identity(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(d + i, d + j)] = u.matrix()[(i, j)];
        }
    }
    let mut dims = vec![2];
    dims.extend_from_slice(u.dims());
    GateMatrix::unitary(&dims, m)
}

/// Applies `g` to the listed target subsystems of `state` (identity on the
/// rest). Target order matters: targets[k] is matched with g.dims()[k].
pub fn apply(state: &HybridState, g: &GateMatrix, targets: &[usize]) -> Result<HybridState> {
    let n = state.subsystem_count();
    if targets.len() != g.dims().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for a gate on {} subsystems",
            targets.len(),
            g.dims().len()
        )));
    }
    let mut seen = vec![false; n];
    for (k, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::IndexOutOfRange { index: t, count: n });
        }
        if seen[t] {
            return Err(Error::DuplicateTarget(t));
        }
        seen[t] = true;
        if state.dims()[t] != g.dims()[k] {
            return Err(Error::DimensionMismatch(format!(
                "target {t} has dimension {}, gate slot {k} expects {}",
                state.dims()[t],
                g.dims()[k]
            )));
        }
    }

    let dims = state.dims().to_vec();
    let total = state.total_dim();
    let side = g.side();
    let gdims = g.dims().to_vec();

    // Iterate over the joint levels of the non-target subsystems; for each,
    // gather the amplitude column over target configurations, multiply, and
    // scatter back.
    let spectators: Vec<usize> = (0..n).filter(|i| !targets.contains(i)).collect();
    let spect_total: usize = spectators.iter().map(|&i| dims[i]).product();

    let mut out = nalgebra::DVector::<Complex64>::zeros(total);
    let mut levels = vec![0usize; n];
    let mut glevels = vec![0usize; gdims.len()];
    let mut col = nalgebra::DVector::<Complex64>::zeros(side);

    for s in 0..spect_total {
        // fixed spectator levels for this pass
        let mut rem = s;
        for &i in spectators.iter().rev() {
            levels[i] = rem % dims[i];
            rem /= dims[i];
        }
        for gi in 0..side {
            unflatten(&gdims, gi, &mut glevels);
            for (k, &t) in targets.iter().enumerate() {
                levels[t] = glevels[k];
            }
            col[gi] = state.amplitudes()[flat_index(&dims, &levels)];
        }
        let new_col = g.matrix() * &col;
        for gi in 0..side {
            unflatten(&gdims, gi, &mut glevels);
            for (k, &t) in targets.iter().enumerate() {
                levels[t] = glevels[k];
            }
            out[flat_index(&dims, &levels)] = new_col[gi];
        }
    }

    if g.is_unitary() {
        if state.is_normalized() {
            HybridState::new(&dims, out.as_slice())
        } else {
            HybridState::unnormalized(&dims, out)
        }
    } else {
        HybridState::unnormalized(&dims, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn x4_converts_lower_to_upper() {
        // |1⟩ → |3⟩ and back
        let s = HybridState::basis(&[4], &[1]).unwrap();
        let out = apply(&s, &gate_x4(), &[0]).unwrap();
        assert_relative_eq!(out.amplitudes()[3].re, 1.0, epsilon = 1e-15);
        let back = apply(&out, &gate_x4(), &[0]).unwrap();
        assert_relative_eq!(back.amplitudes()[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn z4_flips_upper_phase() {
        let s = HybridState::basis(&[4], &[2]).unwrap();
        let out = apply(&s, &gate_z4(), &[0]).unwrap();
        assert_relative_eq!(out.amplitudes()[2].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn x13_leaves_even_levels_unchanged() {
        let s = HybridState::basis(&[4], &[0]).unwrap();
        let out = apply(&s, &gate_x13(), &[0]).unwrap();
        assert_relative_eq!(out.amplitudes()[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn x2d_4_swaps_1_and_5() {
        let g = gate_x2d(4);
        let s = HybridState::basis(&[8], &[1]).unwrap();
        let out = apply(&s, &g, &[0]).unwrap();
        assert_relative_eq!(out.amplitudes()[5].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gate_algebra_identities_exact() {
        // x13 · x02 = x4, and the involutions square to identity, all exactly
        let prod = gate_x13().compose(&gate_x02()).unwrap();
        assert_eq!(prod.matrix(), gate_x4().matrix());
        assert_eq!(
            gate_x4().compose(&gate_x4()).unwrap().matrix(),
            gate_i(4).matrix()
        );
        assert_eq!(
            gate_z4().compose(&gate_z4()).unwrap().matrix(),
            gate_i(4).matrix()
        );
        for d in [2usize, 4, 8] {
            let x = gate_x2d(d);
            let z = gate_z2d(d);
            assert_eq!(x.compose(&x).unwrap().matrix(), gate_i(2 * d).matrix());
            assert_eq!(z.compose(&z).unwrap().matrix(), gate_i(2 * d).matrix());
        }
    }

    #[test]
    fn controlled_x4_action() {
        let cx4 = controlled(&gate_x4()).unwrap();
        assert_eq!(cx4.dims(), &[2, 4]);

        // control on: |1⟩⊗|0⟩₄ → |1⟩⊗|2⟩₄
        let s = HybridState::basis(&[2, 4], &[1, 0]).unwrap();
        let out = apply(&s, &cx4, &[0, 1]).unwrap();
        assert_relative_eq!(out.amplitude(&[1, 2]).re, 1.0, epsilon = 1e-15);

        // control off: |0⟩⊗|3⟩₄ unchanged
        let s = HybridState::basis(&[2, 4], &[0, 3]).unwrap();
        let out = apply(&s, &cx4, &[0, 1]).unwrap();
        assert_relative_eq!(out.amplitude(&[0, 3]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        let cnot = controlled(&gate_x()).unwrap();
        let s = HybridState::basis(&[2, 2], &[1, 0]).unwrap();
        let out = apply(&s, &cnot, &[0, 1]).unwrap();
        assert_relative_eq!(out.amplitude(&[1, 1]).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn controlled_rejects_non_unitary() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::default(),
                Complex64::default(),
            ],
        );
        let op = GateMatrix::operator(&[2], m).unwrap();
        assert!(controlled(&op).is_err());
    }

    #[test]
    fn apply_on_middle_subsystem() {
        // X₄ on the ququart slot of |0⟩⊗|0⟩₄ → |0⟩⊗|2⟩₄
        let s = HybridState::basis(&[2, 4], &[0, 0]).unwrap();
        let out = apply(&s, &gate_x4(), &[1]).unwrap();
        assert_relative_eq!(out.amplitude(&[0, 2]).re, 1.0, epsilon = 1e-15);

        // identity leaves the state untouched
        let out = apply(&s, &gate_i(4), &[1]).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn cx4_matches_two_term_expansion() {
        // CX₄ on |+⟩⊗(α,β,γ,δ): the |1⟩ branch picks up the half-swapped
        // ququart — checked against an explicitly constructed expansion.
        let alpha = Complex64::new(0.5, 0.1);
        let beta = Complex64::new(-0.3, 0.2);
        let gamma = Complex64::new(0.4, -0.4);
        let delta = Complex64::new(0.2, 0.45);
        let b = HybridState::new(&[4], &[alpha, beta, gamma, delta]).unwrap();
        let joint = HybridState::plus().tensor(&b);
        let out = apply(&joint, &controlled(&gate_x4()).unwrap(), &[0, 1]).unwrap();

        let bn = b.amplitudes();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut expect = [Complex64::default(); 8];
        for i in 0..4 {
            expect[i] = bn[i] * r;
        }
        // upper branch: |0⟩↔|2⟩, |1⟩↔|3⟩
        expect[4] = bn[2] * r;
        expect[5] = bn[3] * r;
        expect[6] = bn[0] * r;
        expect[7] = bn[1] * r;
        for (i, e) in expect.iter().enumerate() {
            assert!((out.amplitudes()[i] - e).norm() < 1e-15);
        }
    }
}
