use serde::Serialize;

use super::special::student_t_two_tailed;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

struct Moments {
    mean_x: f64,
    mean_y: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Moments {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Moments {
        mean_x,
        mean_y,
        sxx,
        syy,
        sxy,
    }
}

fn check_samples(x: &[f64], y: &[f64], needed: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "sample lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            actual: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite".into()));
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Pearson product-moment correlation with a two-tailed p-value from
/// `t = r·√((n−2)/(1−r²))` on `n − 2` degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_samples(x, y, 3)?;
    if is_constant(x) {
        return Err(Error::ZeroVariance("x"));
    }
    if is_constant(y) {
        return Err(Error::ZeroVariance("y"));
    }
    let m = moments(x, y);
    let r = (m.sxy / (m.sxx.sqrt() * m.syy.sqrt())).clamp(-1.0, 1.0);
    let n = x.len();
    let dof = (n - 2) as f64;
    let denom = 1.0 - r * r;
    let p_value = if denom <= 0.0 {
        0.0
    } else {
        student_t_two_tailed(r * (dof / denom).sqrt(), dof)
    };
    Ok(CorrelationResult { r, p_value, n })
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
///
/// `r_squared` is the squared product-moment correlation; when `y` is
/// constant the fit is exact and `r_squared` is 1.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    check_samples(x, y, 2)?;
    if is_constant(x) {
        return Err(Error::ZeroVariance("x"));
    }
    let m = moments(x, y);
    let slope = m.sxy / m.sxx;
    let intercept = m.mean_y - slope * m.mean_x;
    let r_squared = if m.syy == 0.0 {
        1.0
    } else {
        (m.sxy * m.sxy / (m.sxx * m.syy)).min(1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
