//! Density matrices for mixed states, with fidelity and partial trace.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::state::{flat_index, unflatten, HybridState};
use crate::TOL_ACCUM;

/// Eigenvalues may undershoot zero by this much before a matrix is rejected
/// as unphysical.
pub const PSD_SLACK: f64 = 1e-9;

/// Mixed state over a register of subsystems.
///
/// Validated on construction: Hermitian and unit trace within 1e-10,
/// eigenvalues ≥ −1e-9. `unnormalized` wraps post-selection intermediates
/// whose trace is the accumulated success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: DMatrix<Complex64>,
    normalized: bool,
}

impl DensityMatrix {
    /// Wraps and validates a unit-trace density matrix.
    pub fn new(dims: &[usize], mat: DMatrix<Complex64>) -> Result<Self> {
        let dm = Self::unnormalized(dims, mat)?;
        let tr = dm.trace();
        if (tr - 1.0).abs() > TOL_ACCUM {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(Self {
            normalized: true,
            ..dm
        })
    }

    /// Wraps a Hermitian PSD matrix with trace in (0, 1 + tol]; used for
    /// post-selected branches.
    pub fn unnormalized(dims: &[usize], mat: DMatrix<Complex64>) -> Result<Self> {
        let side: usize = dims.iter().product();
        if mat.nrows() != side || mat.ncols() != side {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{}, register dimension is {side}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let mut asym: f64 = 0.0;
        for i in 0..side {
            for j in i..side {
                asym = asym.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if asym > TOL_ACCUM {
            return Err(Error::NotHermitian(asym));
        }
        let tr: f64 = (0..side).map(|i| mat[(i, i)].re).sum();
        if tr <= 0.0 || tr > 1.0 + TOL_ACCUM {
            return Err(Error::InvalidTrace(tr));
        }
        let eigs = hermitian_eigenvalues(&mat);
        let min = eigs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if min < -PSD_SLACK {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            dims: dims.to_vec(),
            mat,
            normalized: false,
        })
    }

    /// `|ψ⟩⟨ψ|` of a pure state (normalized first if needed).
    pub fn from_pure(psi: &HybridState) -> Self {
        let v = psi.renormalize();
        let amps = v.amplitudes();
        let mat = amps * amps.adjoint();
        Self {
            dims: psi.dims().to_vec(),
            mat,
            normalized: true,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.side()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rescales to unit trace.
    pub fn renormalize(&self) -> Self {
        let tr = self.trace();
        Self {
            dims: self.dims.clone(),
            mat: &self.mat / Complex64::new(tr, 0.0),
            normalized: true,
        }
    }

    /// Overlap `⟨ψ|ρ|ψ⟩` with a pure target, i.e. `Tr(ρ|ψ⟩⟨ψ|)`.
    pub fn fidelity(&self, psi: &HybridState) -> Result<f64> {
        if psi.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "state dims {:?} vs density dims {:?}",
                psi.dims(),
                self.dims
            )));
        }
        let v = psi.renormalize();
        let f = (v.amplitudes().adjoint() * &self.mat * v.amplitudes())[(0, 0)];
        Ok(f.re)
    }

    /// Reduced density matrix over the listed subsystems (kept in the given
    /// order); the rest are traced out.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        for &k in keep {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, count: n });
            }
            if seen[k] {
                return Err(Error::DuplicateTarget(k));
            }
            seen[k] = true;
        }
        if keep.is_empty() {
            return Err(Error::DimensionMismatch("nothing kept".into()));
        }
        let drop: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let keep_total: usize = keep_dims.iter().product();
        let drop_total: usize = drop.iter().map(|&i| self.dims[i]).product();

        let mut out = DMatrix::<Complex64>::zeros(keep_total, keep_total);
        let mut row_levels = vec![0usize; n];
        let mut col_levels = vec![0usize; n];
        let mut keep_row = vec![0usize; keep.len()];
        let mut keep_col = vec![0usize; keep.len()];
        for r in 0..keep_total {
            unflatten(&keep_dims, r, &mut keep_row);
            for c in 0..keep_total {
                unflatten(&keep_dims, c, &mut keep_col);
                let mut acc = Complex64::default();
                for t in 0..drop_total.max(1) {
                    let mut rem = t;
                    for &i in drop.iter().rev() {
                        let d = self.dims[i];
                        row_levels[i] = rem % d;
                        col_levels[i] = rem % d;
                        rem /= d;
                    }
                    for (k, &i) in keep.iter().enumerate() {
                        row_levels[i] = keep_row[k];
                        col_levels[i] = keep_col[k];
                    }
                    acc += self.mat[(
                        flat_index(&self.dims, &row_levels),
                        flat_index(&self.dims, &col_levels),
                    )];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self {
            dims: keep_dims,
            mat: out,
            normalized: self.normalized,
        })
    }

    /// Applies a set of Kraus operators on the listed target subsystems:
    /// `ρ ↦ Σ K ρ K†`. The Kraus set may be trace-decreasing (post-selected
    /// elements); the trace then shrinks by the discarded weight.
    pub fn apply_kraus(&self, kraus: &[DMatrix<Complex64>], targets: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        for &t in targets {
            if t >= n {
                return Err(Error::IndexOutOfRange { index: t, count: n });
            }
            if seen[t] {
                return Err(Error::DuplicateTarget(t));
            }
            seen[t] = true;
        }
        let tdims: Vec<usize> = targets.iter().map(|&t| self.dims[t]).collect();
        let side: usize = tdims.iter().product();
        for k in kraus {
            if k.nrows() != side || k.ncols() != side {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}×{}, targets have dimension {side}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let total = self.side();
        let mut acc = DMatrix::<Complex64>::zeros(total, total);
        for k in kraus {
            let full = embed_operator(&self.dims, k, targets);
            acc += &full * &self.mat * full.adjoint();
        }
        Ok(Self {
            dims: self.dims.clone(),
            mat: acc,
            normalized: false,
        })
    }

    /// Eigenvalues (ascending order not guaranteed).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }
}

/// Embeds an operator on the target subsystems into the full register
/// (identity elsewhere).
pub fn embed_operator(
    dims: &[usize],
    op: &DMatrix<Complex64>,
    targets: &[usize],
) -> DMatrix<Complex64> {
    let n = dims.len();
    let total: usize = dims.iter().product();
    let tdims: Vec<usize> = targets.iter().map(|&t| dims[t]).collect();
    let side: usize = tdims.iter().product();
    debug_assert_eq!(op.nrows(), side);

    let spectators: Vec<usize> = (0..n).filter(|i| !targets.contains(i)).collect();
    let mut out = DMatrix::<Complex64>::zeros(total, total);
    let mut row_levels = vec![0usize; n];
    let mut col_levels = vec![0usize; n];
    let mut trow = vec![0usize; targets.len()];
    let mut tcol = vec![0usize; targets.len()];
    let spect_total: usize = spectators.iter().map(|&i| dims[i]).product();
    for s in 0..spect_total.max(1) {
        let mut rem = s;
        for &i in spectators.iter().rev() {
            row_levels[i] = rem % dims[i];
            col_levels[i] = rem % dims[i];
            rem /= dims[i];
        }
        for r in 0..side {
            unflatten(&tdims, r, &mut trow);
            for (k, &t) in targets.iter().enumerate() {
                row_levels[t] = trow[k];
            }
            let ri = flat_index(dims, &row_levels);
            for c in 0..side {
                unflatten(&tdims, c, &mut tcol);
                for (k, &t) in targets.iter().enumerate() {
                    col_levels[t] = tcol[k];
                }
                out[(ri, flat_index(dims, &col_levels))] = op[(r, c)];
            }
        }
    }
    out
}

/// Real eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(mat: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(mat.clone());
    sym.eigenvalues.iter().copied().collect()
}

/// Full Hermitian eigendecomposition: (eigenvalues, eigenvector columns).
pub fn hermitian_eigen(mat: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let sym = nalgebra::SymmetricEigen::new(mat.clone());
    (
        sym.eigenvalues.iter().copied().collect(),
        sym.eigenvectors,
    )
}

/// Dominant eigenvector of a Hermitian PSD matrix, for extracting the pure
/// state out of a rank-1 density matrix.
pub fn dominant_eigenvector(mat: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let (vals, vecs) = hermitian_eigen(mat);
    let (idx, &val) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("real eigenvalues"))
        .expect("non-empty spectrum");
    (val, vecs.column(idx).into_owned())
}
