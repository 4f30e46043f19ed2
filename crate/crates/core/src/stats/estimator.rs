//! Fidelity estimation from counts on local qubit bases.
//!
//! The measured system is treated as two qubit factors (a two-qubit register,
//! or one four-level system split into its polarization and path qubits).
//! The target projector is expanded over two-factor Pauli words; each word's
//! expectation comes from the counts of a compatible basis setting, and the
//! standard deviation follows from first-order propagation of independent
//! Poisson outcome variances.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, HybridState};
use crate::stats::counts::{BasisLabel, CountTable, Setting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateMethod {
    BasisDecomposition,
    Tomography,
}

/// A fidelity estimate with its propagated uncertainty. `value` is reported
/// unclamped; `clamped` folds it into [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub std_dev: f64,
    pub clamped: f64,
    pub method: EstimateMethod,
}

impl FidelityEstimate {
    pub fn new(value: f64, std_dev: f64, method: EstimateMethod) -> Self {
        Self {
            value,
            std_dev,
            clamped: value.clamp(0.0, 1.0),
            method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl Pauli {
    fn matrix(&self) -> DMatrix<Complex64> {
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        let z = Complex64::default();
        match self {
            Self::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            Self::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Self::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            Self::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    fn basis(&self) -> Option<BasisLabel> {
        match self {
            Self::I => None,
            Self::X => Some(BasisLabel::X),
            Self::Y => Some(BasisLabel::Y),
            Self::Z => Some(BasisLabel::Z),
        }
    }
}

/// Two-factor Pauli word with its coefficient in the target expansion.
#[derive(Debug, Clone)]
struct Word {
    factors: [Pauli; 2],
    coeff: f64,
}

fn target_words(target: &HybridState) -> Result<Vec<Word>> {
    let dim = target.total_dim();
    if dim != 4 {
        return Err(Error::DimensionMismatch(format!(
            "basis-decomposition estimation expects a four-level target, got dimension {dim}"
        )));
    }
    let t = target.renormalize();
    let v = nalgebra::DVector::from_column_slice(t.amplitudes().as_slice());
    let proj = &v * v.adjoint();
    let mut words = Vec::new();
    for p1 in PAULIS {
        for p2 in PAULIS {
            let m = p1.matrix().kronecker(&p2.matrix());
            let coeff = (m * &proj).trace().re;
            if coeff.abs() > 1e-12 {
                words.push(Word {
                    factors: [p1, p2],
                    coeff,
                });
            }
        }
    }
    Ok(words)
}

/// Minimal set of basis settings that covers every Pauli word of the target:
/// fully-specified words claim their own setting, words with identity factors
/// reuse a compatible one (defaulting the free factor to Z).
pub fn plan_for_target(target: &HybridState) -> Result<Vec<Setting>> {
    let words = target_words(target)?;
    let mut settings: Vec<Setting> = Vec::new();
    let push_unique = |s: Setting, settings: &mut Vec<Setting>| {
        if !settings.contains(&s) {
            settings.push(s);
        }
    };
    for w in words.iter().filter(|w| !w.factors.contains(&Pauli::I)) {
        let s = Setting::new(vec![
            w.factors[0].basis().expect("not identity"),
            w.factors[1].basis().expect("not identity"),
        ]);
        push_unique(s, &mut settings);
    }
    for w in &words {
        if w.factors == [Pauli::I, Pauli::I] {
            continue;
        }
        if find_compatible(&settings, &w.factors).is_none() {
            let bases = vec![
                w.factors[0].basis().unwrap_or(BasisLabel::Z),
                w.factors[1].basis().unwrap_or(BasisLabel::Z),
            ];
            push_unique(Setting::new(bases), &mut settings);
        }
    }
    Ok(settings)
}

fn find_compatible(settings: &[Setting], factors: &[Pauli; 2]) -> Option<usize> {
    settings.iter().position(|s| {
        factors.iter().zip(&s.bases).all(|(p, b)| match p.basis() {
            None => true,
            Some(need) => need == *b,
        })
    })
}

/// Outcome probabilities of one basis setting on a four-level density
/// matrix (two qubit factors, outcome index = 2·o₁ + o₂).
pub fn setting_probabilities(rho: &DensityMatrix, setting: &Setting) -> Result<Vec<f64>> {
    if rho.side() != 4 || setting.bases.len() != 2 {
        return Err(Error::DimensionMismatch(
            "setting probabilities need a four-level state and a two-factor setting".into(),
        ));
    }
    let mut probs = Vec::with_capacity(4);
    for o1 in 0..2 {
        for o2 in 0..2 {
            let proj = basis_projector(setting.bases[0], o1)
                .kronecker(&basis_projector(setting.bases[1], o2));
            probs.push((proj * rho.matrix()).trace().re.max(0.0));
        }
    }
    Ok(probs)
}

fn basis_projector(basis: BasisLabel, outcome: usize) -> DMatrix<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v: Vec<Complex64> = match (basis, outcome) {
        (BasisLabel::Z, 0) => vec![Complex64::new(1.0, 0.0), Complex64::default()],
        (BasisLabel::Z, _) => vec![Complex64::default(), Complex64::new(1.0, 0.0)],
        (BasisLabel::X, 0) => vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        (BasisLabel::X, _) => vec![Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
        (BasisLabel::Y, 0) => vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        (BasisLabel::Y, _) => vec![Complex64::new(r, 0.0), Complex64::new(0.0, -r)],
    };
    let v = nalgebra::DVector::from_vec(v);
    &v * v.adjoint()
}

fn outcome_sign(factors: &[Pauli; 2], outcome: usize) -> f64 {
    let bits = [(outcome >> 1) & 1, outcome & 1];
    let mut s = 1.0;
    for (p, &bit) in factors.iter().zip(&bits) {
        if *p != Pauli::I && bit == 1 {
            s = -s;
        }
    }
    s
}

/// Whether the estimator reads sampled integer counts or the expected values
/// (the infinite-statistics limit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountSource {
    Sampled,
    Expected,
}

/// Estimates `Tr(ρ|ψ⟩⟨ψ|)` from a count table taken on `plan` settings.
///
/// With `CountSource::Expected` and exact probabilities the estimate equals
/// the true fidelity and the standard deviation reflects the nominal counts.
pub fn fidelity_from_counts(
    table: &CountTable,
    target: &HybridState,
    plan: &[Setting],
    source: CountSource,
) -> Result<FidelityEstimate> {
    let words = target_words(target)?;
    if table.rows.len() != plan.len() {
        return Err(Error::InsufficientSettings(format!(
            "{} count rows for {} planned settings",
            table.rows.len(),
            plan.len()
        )));
    }
    for (row, s) in table.rows.iter().zip(plan) {
        if row.setting != s.label() {
            return Err(Error::InsufficientSettings(format!(
                "count row {} does not match planned setting {}",
                row.setting,
                s.label()
            )));
        }
    }

    // assignment: word index → plan setting index
    let mut assigned: Vec<(usize, usize)> = Vec::new(); // (word, setting)
    for (wi, w) in words.iter().enumerate() {
        if w.factors == [Pauli::I, Pauli::I] {
            continue;
        }
        let si = find_compatible(plan, &w.factors).ok_or_else(|| {
            Error::InsufficientSettings(format!(
                "no setting measures the {:?} word",
                w.factors
            ))
        })?;
        assigned.push((wi, si));
    }

    let read = |row: &crate::stats::counts::SettingCounts, o: usize| -> f64 {
        match source {
            CountSource::Sampled => row.counts[o] as f64,
            CountSource::Expected => row.expected[o],
        }
    };

    let mut value = 0.25
        * words
            .iter()
            .find(|w| w.factors == [Pauli::I, Pauli::I])
            .map(|w| w.coeff)
            .unwrap_or(0.0);
    let mut variance = 0.0;

    for (si, row) in table.rows.iter().enumerate() {
        let in_setting: Vec<&Word> = assigned
            .iter()
            .filter(|&&(_, s)| s == si)
            .map(|&(wi, _)| &words[wi])
            .collect();
        if in_setting.is_empty() {
            continue;
        }
        let n_total: f64 = (0..row.counts.len()).map(|o| read(row, o)).sum();
        if n_total <= 0.0 {
            return Err(Error::InsufficientSettings(format!(
                "setting {} has no events",
                row.setting
            )));
        }
        let mut means = Vec::with_capacity(in_setting.len());
        for w in &in_setting {
            let t: f64 = (0..row.counts.len())
                .map(|o| outcome_sign(&w.factors, o) * read(row, o))
                .sum();
            let mean = t / n_total;
            value += 0.25 * w.coeff * mean;
            means.push(mean);
        }
        // first-order Poisson propagation, outcomes independent within the
        // setting and correlations between words sharing it kept
        for o in 0..row.counts.len() {
            let mut deriv = 0.0;
            for (w, &mean) in in_setting.iter().zip(&means) {
                deriv += 0.25 * w.coeff * (outcome_sign(&w.factors, o) - mean) / n_total;
            }
            variance += read(row, o) * deriv * deriv;
        }
    }

    Ok(FidelityEstimate::new(
        value,
        variance.sqrt(),
        EstimateMethod::BasisDecomposition,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random_state;
    use crate::stats::counts::{sample_counts, ExperimentConfig};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_qubit_target() -> HybridState {
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        HybridState::from_real(&[2, 2], &[r2, r2, 0.0, 0.0]).unwrap()
    }

    fn expected_table(rho: &DensityMatrix, plan: &[Setting], scale: f64) -> CountTable {
        let labels: Vec<String> = plan.iter().map(Setting::label).collect();
        let expected: Vec<Vec<f64>> = plan
            .iter()
            .map(|s| {
                setting_probabilities(rho, s)
                    .unwrap()
                    .iter()
                    .map(|p| p * scale)
                    .collect()
            })
            .collect();
        CountTable::from_expected(&labels, &expected)
    }

    #[test]
    fn exact_counts_give_exact_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let target = random_state(&[2, 2], &mut rng);
            let other = random_state(&[2, 2], &mut rng);
            // a mixed state to estimate against
            let mut m = DensityMatrix::from_pure(&other).matrix() * Complex64::new(0.7, 0.0);
            m += DensityMatrix::from_pure(&target).matrix() * Complex64::new(0.3, 0.0);
            let rho = DensityMatrix::new(&[2, 2], m).unwrap();
            let plan = plan_for_target(&target).unwrap();
            let table = expected_table(&rho, &plan, 132.0);
            let est =
                fidelity_from_counts(&table, &target, &plan, CountSource::Expected).unwrap();
            let truth = rho.fidelity(&target).unwrap();
            assert_relative_eq!(est.value, truth, epsilon = 1e-12);
        }
    }

    #[test]
    fn noiseless_infinite_counts_estimate_one() {
        let target = two_qubit_target();
        let rho = DensityMatrix::from_pure(&target);
        let plan = plan_for_target(&target).unwrap();
        let table = expected_table(&rho, &plan, 1e12);
        let est = fidelity_from_counts(&table, &target, &plan, CountSource::Expected).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-12);
        assert!(est.std_dev < 1e-5);
    }

    #[test]
    fn sampled_estimate_within_three_sigma() {
        let target = two_qubit_target();
        let rho = DensityMatrix::from_pure(&target);
        let plan = plan_for_target(&target).unwrap();
        let probs: Vec<Vec<f64>> = plan
            .iter()
            .map(|s| setting_probabilities(&rho, s).unwrap())
            .collect();
        let cfg = ExperimentConfig {
            fourfold_rate: 0.22,
            duration: 600.0,
            seed: 11,
            settings: plan.clone(),
        };
        let table = sample_counts(&probs, &cfg).unwrap();
        let est = fidelity_from_counts(&table, &target, &plan, CountSource::Sampled).unwrap();
        assert!(
            (est.value - 1.0).abs() <= 3.0 * est.std_dev.max(1e-3),
            "estimate {} ± {}",
            est.value,
            est.std_dev
        );
    }

    #[test]
    fn plan_covers_diagonal_target() {
        // (|00⟩+|11⟩)/√2 needs ZZ, XX, YY
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let bell = HybridState::from_real(&[2, 2], &[r2, 0.0, 0.0, r2]).unwrap();
        let plan = plan_for_target(&bell).unwrap();
        let labels: Vec<String> = plan.iter().map(Setting::label).collect();
        for needed in ["ZZ", "XX", "YY"] {
            assert!(labels.iter().any(|l| l == needed), "missing {needed}");
        }
    }

    #[test]
    fn missing_setting_is_an_error() {
        // the Bell target needs ZZ, XX and YY; dropping settings breaks it
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let target = HybridState::from_real(&[2, 2], &[r2, 0.0, 0.0, r2]).unwrap();
        let rho = DensityMatrix::from_pure(&target);
        let plan = plan_for_target(&target).unwrap();
        assert!(plan.len() >= 3);
        let table = expected_table(&rho, &plan, 132.0);
        let truncated_plan = &plan[..1];
        let truncated = CountTable {
            rows: table.rows[..1].to_vec(),
        };
        assert!(matches!(
            fidelity_from_counts(&truncated, &target, truncated_plan, CountSource::Expected),
            Err(Error::InsufficientSettings(_))
        ));
    }

    #[test]
    fn four_level_targets_work_directly() {
        // the ququart is its polarization ⊗ path qubit pair
        let target = HybridState::from_real(&[4], &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let rho = DensityMatrix::from_pure(&target);
        let plan = plan_for_target(&target).unwrap();
        let table = expected_table(&rho, &plan, 132.0);
        let est = fidelity_from_counts(&table, &target, &plan, CountSource::Expected).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-12);
    }
}
