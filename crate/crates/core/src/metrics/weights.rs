use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule assigning the weight of each top-j overlap term.
///
/// All schemes produce non-negative, non-increasing weights summing to 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// `w_j ∝ e^(N-j)`
    #[default]
    Softmax,
    /// `w_j ∝ N-j`
    Norm1,
    /// `w_j ∝ (N-j)^2`
    Norm2,
}

impl WeightScheme {
    pub const ALL: [WeightScheme; 3] = [
        WeightScheme::Softmax,
        WeightScheme::Norm1,
        WeightScheme::Norm2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Softmax => "softmax",
            WeightScheme::Norm1 => "norm1",
            WeightScheme::Norm2 => "norm2",
        }
    }

    /// Weight of the top-1 term for `n` candidates.
    pub fn top_weight(self, n: usize) -> Result<f64> {
        weights(self, n).map(|w| w[0])
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "softmax" => Ok(WeightScheme::Softmax),
            "norm1" => Ok(WeightScheme::Norm1),
            "norm2" => Ok(WeightScheme::Norm2),
            other => Err(Error::InvalidArgument(format!(
                "unknown weight scheme {other:?} (expected softmax, norm1 or norm2)"
            ))),
        }
    }
}

/// Weights `w_1..w_n` for `n` candidates.
///
/// Softmax evaluates `e^(N-j)` as `e^-(j-1)` after dividing through by
/// `e^(N-1)`, so large `n` cannot overflow. For `n == 1` every scheme
/// returns `[1.0]` (the polynomial schemes would otherwise divide by zero).
pub fn weights(scheme: WeightScheme, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "weights need at least one candidate".into(),
        ));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let raw: Vec<f64> = match scheme {
        WeightScheme::Softmax => (0..n).map(|k| (-(k as f64)).exp()).collect(),
        WeightScheme::Norm1 => (1..=n).map(|j| (n - j) as f64).collect(),
        WeightScheme::Norm2 => (1..=n).map(|j| ((n - j) as f64).powi(2)).collect(),
    };
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}
