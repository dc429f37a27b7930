//! Relative l1 error of sketched coordinates against exact features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::GradedTensor;

/// What each level's summed absolute gap is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Level `m` divided by `||Phi||_{1,(m)}`.
    #[default]
    PerLevel,
    /// Every level divided by the top-level norm `||Phi||_{1,(M)}`.
    TopLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `error_m` for `m = 1..=M`.
    pub per_level: Vec<f64>,
    /// Mean of `per_level`.
    pub aggregate: f64,
}

/// `error_m = sum_{|w|=m} |Phi_w - est_w| / norm_m`, `Error_M = mean_m error_m`.
///
/// A level whose gap and norm are both zero contributes zero.
pub fn error_metric(
    exact: &GradedTensor,
    estimates: &GradedTensor,
    normalization: Normalization,
) -> Result<ErrorReport> {
    if exact.alphabet_size() != estimates.alphabet_size() || exact.depth() != estimates.depth() {
        return Err(Error::ShapeMismatch(
            "exact and estimated tensors differ in shape".into(),
        ));
    }
    let depth = exact.depth();
    if depth == 0 {
        return Err(Error::InvalidParameter("error needs depth >= 1".into()));
    }
    let top = exact.l1_level_norm(depth)?;
    let per_level = (1..=depth)
        .map(|m| {
            let gap: f64 = exact
                .level(m)
                .iter()
                .zip(estimates.level(m))
                .map(|(a, b)| (a - b).abs())
                .sum();
            let norm = match normalization {
                Normalization::PerLevel => exact.l1_level_norm(m).expect("m <= depth"),
                Normalization::TopLevel => top,
            };
            if gap == 0.0 {
                0.0
            } else {
                gap / norm
            }
        })
        .collect::<Vec<_>>();
    let aggregate = per_level.iter().sum::<f64>() / depth as f64;
    Ok(ErrorReport {
        per_level,
        aggregate,
    })
}
