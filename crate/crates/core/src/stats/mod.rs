//! Counting statistics and estimation: Poisson count tables, fidelity
//! estimation on local bases with propagated error bars, four-level
//! tomography, and the classical-limit comparison.

mod bound;
mod counts;
mod estimator;
mod tomography;

pub use bound::{classical_bound_check, BoundEntry, BoundReport, CLASSICAL_LIMIT};
pub use counts::{
    sample_counts, BasisLabel, CountTable, ExperimentConfig, Setting, SettingCounts,
};
pub use estimator::{
    fidelity_from_counts, plan_for_target, setting_probabilities, CountSource, EstimateMethod,
    FidelityEstimate,
};
pub use tomography::{standard_tomo_settings, tomography_ququart};
