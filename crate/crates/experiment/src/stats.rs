use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::HarnessError;

/// Relative change of the treatment rate over the control rate.
pub fn uplift(control: f64, treatment: f64) -> Result<f64, HarnessError> {
    if control == 0.0 {
        return Err(HarnessError::DivisionByZero);
    }
    Ok(treatment / control - 1.0)
}

/// Conversion probability after multiplying the odds of `base_rate` by
/// `multiplier`.
pub fn matched_rate(base_rate: f64, multiplier: f64) -> f64 {
    let odds = base_rate / (1.0 - base_rate) * multiplier;
    odds / (1.0 + odds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ZTest {
    pub z: f64,
    /// Two-sided.
    pub p_value: f64,
}

/// Pooled two-proportion z-test of `x2/n2` against `x1/n1`.
pub fn two_proportion_z(x1: u64, n1: u64, x2: u64, n2: u64) -> ZTest {
    if n1 == 0 || n2 == 0 {
        return ZTest { z: 0.0, p_value: 1.0 };
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1f + n2f);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f)).sqrt();
    if se == 0.0 {
        return ZTest { z: 0.0, p_value: 1.0 };
    }
    let z = (x2 as f64 / n2f - x1 as f64 / n1f) / se;
    let normal = Normal::standard();
    ZTest {
        z,
        p_value: 2.0 * normal.cdf(-z.abs()),
    }
}
