//! Mixed-dimension register algebra: states, gates, measurements, density
//! matrices, and fidelity. Everything else in the crate is built on top of
//! this module.

mod density;
mod gates;
mod measure;
mod random;
mod state;

pub use density::{
    dominant_eigenvector, embed_operator, hermitian_eigen, hermitian_eigenvalues, DensityMatrix,
    PSD_SLACK,
};
pub use gates::{
    apply, controlled, gate_h, gate_i, gate_x, gate_x02, gate_x13, gate_x2d, gate_x4, gate_z,
    gate_z2d, gate_z4, GateMatrix,
};
pub use measure::{
    basis_branches, computational_basis, measure_basis, measure_subspace, plus_minus_basis,
    subspace_branches, MeasurementRecord,
};
pub use random::{random_state, random_unitary};
pub use state::{flat_index, unflatten, HybridState};
