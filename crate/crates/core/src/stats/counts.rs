//! Measurement settings, experiment configuration, and Poisson count tables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TOL_ACCUM;

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    /// Computational `|0⟩, |1⟩`.
    Z,
    /// Diagonal `|±⟩ = (|0⟩ ± |1⟩)/√2`.
    X,
    /// Circular `|±i⟩ = (|0⟩ ± i|1⟩)/√2`.
    Y,
}

impl BasisLabel {
    pub fn letter(&self) -> char {
        match self {
            Self::Z => 'Z',
            Self::X => 'X',
            Self::Y => 'Y',
        }
    }
}

/// One measurement setting: a basis per qubit factor of the measured system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Setting {
    pub bases: Vec<BasisLabel>,
}

impl Setting {
    pub fn new(bases: Vec<BasisLabel>) -> Self {
        Self { bases }
    }

    pub fn label(&self) -> String {
        self.bases.iter().map(BasisLabel::letter).collect()
    }

    pub fn outcome_count(&self) -> usize {
        1 << self.bases.len()
    }
}

/// Counting-run parameters. The expected number of events per setting is
/// `fourfold_rate · duration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Detected events per second.
    pub fourfold_rate: f64,
    /// Collection time per setting, seconds.
    pub duration: f64,
    pub seed: u64,
    /// Measurement settings, one per count-table row.
    pub settings: Vec<Setting>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fourfold_rate <= 0.0 || !self.fourfold_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rate must be positive, got {}",
                self.fourfold_rate
            )));
        }
        if self.duration <= 0.0 || !self.duration.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        Ok(())
    }

    pub fn events_per_setting(&self) -> f64 {
        self.fourfold_rate * self.duration
    }
}

/// Per-setting, per-outcome counts with the expected values that generated
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub setting: String,
    pub counts: Vec<u64>,
    pub expected: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub rows: Vec<SettingCounts>,
}

impl CountTable {
    /// Builds a table directly from expected values (the infinite-statistics
    /// limit: "counts" are the expectations themselves, kept in `expected`;
    /// the integer counts are their rounded values).
    pub fn from_expected(labels: &[String], expected: &[Vec<f64>]) -> Self {
        let rows = labels
            .iter()
            .zip(expected)
            .map(|(l, e)| SettingCounts {
                setting: l.clone(),
                counts: e.iter().map(|&x| x.round() as u64).collect(),
                expected: e.clone(),
            })
            .collect();
        Self { rows }
    }

    /// CSV dump, one row per (setting, outcome).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,outcome,count,expected\n");
        for row in &self.rows {
            for (o, (&n, &e)) in row.counts.iter().zip(&row.expected).enumerate() {
                out.push_str(&format!("{},{},{},{}\n", row.setting, o, n, e));
            }
        }
        out
    }
}

/// Draws independent Poisson counts with mean `rate · duration · p` for each
/// outcome of each setting. Deterministic for a fixed config seed.
pub fn sample_counts(probabilities: &[Vec<f64>], config: &ExperimentConfig) -> Result<CountTable> {
    config.validate()?;
    if probabilities.len() != config.settings.len() {
        return Err(Error::InvalidConfig(format!(
            "{} probability rows for {} settings",
            probabilities.len(),
            config.settings.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let scale = config.events_per_setting();
    let mut rows = Vec::with_capacity(probabilities.len());
    for (setting, probs) in config.settings.iter().zip(probabilities) {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(0.0..=1.0 + TOL_ACCUM).contains(&p)) {
            return Err(Error::InvalidConfig(format!(
                "probabilities out of range in setting {}",
                setting.label()
            )));
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidConfig(format!(
                "probabilities in setting {} sum to {total}",
                setting.label()
            )));
        }
        let mut counts = Vec::with_capacity(probs.len());
        let mut expected = Vec::with_capacity(probs.len());
        for &p in probs {
            let mean = scale * p;
            expected.push(mean);
            let n = if mean > 0.0 {
                Poisson::new(mean)
                    .map_err(|e| Error::InvalidConfig(format!("bad Poisson mean: {e}")))?
                    .sample(&mut rng) as u64
            } else {
                0
            };
            counts.push(n);
        }
        rows.push(SettingCounts {
            setting: setting.label(),
            counts,
            expected,
        });
    }
    Ok(CountTable { rows })
}
