//! LMP adaptive filtering, synthetic system-identification data and the deviation metric.

mod lmp;
mod scenario;
mod stable;

pub use lmp::LmpState;
pub use scenario::{OutlierModel, Sample, Scenario, ScenarioConfig, ScenarioStream};
pub use stable::{alpha_stable_sample, AlphaStable};

use crate::error::{check_len, invalid, Result};
use crate::vecops::{dist_sq, norm_sq};

/// Floor applied to [`normalized_deviation_db`] when the estimate is exact.
pub const DEVIATION_FLOOR_DB: f64 = -300.0;

/// `10 log10(‖θ - θ*‖² / ‖θ*‖²)`, floored at [`DEVIATION_FLOOR_DB`].
pub fn normalized_deviation_db(theta: &[f64], theta_star: &[f64]) -> Result<f64> {
    check_len(theta_star.len(), theta.len())?;
    let reference = norm_sq(theta_star);
    if reference == 0.0 {
        return Err(invalid("reference system has zero norm"));
    }
    let ratio = dist_sq(theta, theta_star) / reference;
    if ratio == 0.0 {
        return Ok(DEVIATION_FLOOR_DB);
    }
    Ok((10.0 * ratio.log10()).max(DEVIATION_FLOOR_DB))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_corners() {
        let star = [1.0, -2.0, 0.5];
        assert_eq!(normalized_deviation_db(&star, &star).unwrap(), DEVIATION_FLOOR_DB);
        assert!(normalized_deviation_db(&[0.0; 3], &star).unwrap().abs() < 1e-12);
        let doubled: Vec<f64> = star.iter().map(|v| 2.0 * v).collect();
        assert!(normalized_deviation_db(&doubled, &star).unwrap().abs() < 1e-12);
        let tenth: Vec<f64> = star.iter().map(|v| 0.9 * v).collect();
        assert!((normalized_deviation_db(&tenth, &star).unwrap() + 20.0).abs() < 1e-9);
        assert!(normalized_deviation_db(&star, &[0.0; 3]).is_err());
        assert!(normalized_deviation_db(&star, &[1.0; 2]).is_err());
    }
}
