//! Comparison of fidelity estimates against the classical single-copy
//! estimation limit of 2/3.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::estimator::FidelityEstimate;

pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub value: f64,
    pub std_dev: f64,
    /// `(value − 2/3)` in units of the standard deviation; infinite when the
    /// estimate carries no uncertainty.
    pub margin_sigma: f64,
    pub above: bool,
}

/// Per-estimate margins over 2/3 plus the aggregate mean with its propagated
/// uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
    pub mean: f64,
    pub mean_std_dev: f64,
    pub all_above: bool,
}

pub fn classical_bound_check(estimates: &[FidelityEstimate]) -> Result<BoundReport> {
    if estimates.is_empty() {
        return Err(Error::InvalidConfig("no estimates to check".into()));
    }
    let entries: Vec<BoundEntry> = estimates
        .iter()
        .map(|e| {
            let excess = e.value - CLASSICAL_LIMIT;
            let margin_sigma = if e.std_dev > 0.0 {
                excess / e.std_dev
            } else if excess == 0.0 {
                0.0
            } else {
                f64::INFINITY * excess.signum()
            };
            BoundEntry {
                value: e.value,
                std_dev: e.std_dev,
                margin_sigma,
                above: excess > 0.0,
            }
        })
        .collect();
    let n = estimates.len() as f64;
    let mean = estimates.iter().map(|e| e.value).sum::<f64>() / n;
    let mean_std_dev = estimates
        .iter()
        .map(|e| e.std_dev * e.std_dev)
        .sum::<f64>()
        .sqrt()
        / n;
    let all_above = entries.iter().all(|e| e.above);
    Ok(BoundReport {
        entries,
        mean,
        mean_std_dev,
        all_above,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::estimator::EstimateMethod;
    use approx::assert_relative_eq;

    fn est(value: f64, std_dev: f64) -> FidelityEstimate {
        FidelityEstimate::new(value, std_dev, EstimateMethod::BasisDecomposition)
    }

    #[test]
    fn published_four_to_two_values_average() {
        let values = [
            (0.8860, 0.0298),
            (0.7686, 0.0271),
            (0.7342, 0.0255),
            (0.7375, 0.0203),
            (0.8220, 0.0164),
        ];
        let estimates: Vec<_> = values.iter().map(|&(v, s)| est(v, s)).collect();
        let report = classical_bound_check(&estimates).unwrap();
        assert_relative_eq!(report.mean, 0.7897, epsilon = 5e-5);
        assert_relative_eq!(report.mean_std_dev, 0.0109, epsilon = 5e-5);
        assert!(report.all_above);
    }

    #[test]
    fn published_two_to_four_values_average() {
        let values = [
            (0.8018, 0.0271),
            (0.7220, 0.0289),
            (0.6997, 0.0241),
            (0.8772, 0.0217),
            (0.7897, 0.0257),
            (0.8080, 0.0249),
            (0.8770, 0.0130),
            (0.8431, 0.0134),
            (0.9171, 0.0138),
        ];
        let estimates: Vec<_> = values.iter().map(|&(v, s)| est(v, s)).collect();
        let report = classical_bound_check(&estimates).unwrap();
        assert_relative_eq!(report.mean, 0.8151, epsilon = 5e-5);
        assert_relative_eq!(report.mean_std_dev, 0.0074, epsilon = 5e-5);
        assert!(report.all_above);
    }

    #[test]
    fn exact_limit_has_zero_margin() {
        let report = classical_bound_check(&[est(CLASSICAL_LIMIT, 0.01)]).unwrap();
        assert_relative_eq!(report.entries[0].margin_sigma, 0.0, epsilon = 1e-12);
        assert!(!report.entries[0].above);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(classical_bound_check(&[]).is_err());
    }
}
