use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, invalid, Result};
use crate::rff::FeatureVector;

/// Ridge added when the unregularized Gram system is numerically singular.
const SINGULAR_RIDGE: f64 = 1e-10;
/// Relative pivot size below which a Cholesky factor counts as singular.
const PIVOT_TOL: f64 = 1e-13;

/// Averaging weights `d = (ΦᵀΦ + σI)⁻¹ Φᵀ φ_1`, where the columns of `Φ` are `features`
/// and `φ_1 = features[0]` is the reference column.
pub fn ridge_coefficients(features: &[FeatureVector], sigma: f64) -> Result<Vec<f64>> {
    if features.is_empty() {
        return Err(invalid("ridge regression needs at least one column"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("ridge parameter must be nonnegative, got {sigma}")));
    }
    let dim = features[0].len();
    for f in features {
        check_len(dim, f.len())?;
    }
    let n = features.len();
    let gram = DMatrix::from_fn(n, n, |i, j| features[i].dot(&features[j]));
    if n == 1 {
        let g = gram[(0, 0)];
        let denom = if g + sigma > 0.0 { g + sigma } else { g + SINGULAR_RIDGE };
        return Ok(vec![g / denom]);
    }
    let rhs: DVector<f64> = gram.column(0).into_owned();
    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    let solve = |ridge: f64| -> Option<DVector<f64>> {
        let mut a = gram.clone();
        for i in 0..n {
            a[(i, i)] += ridge;
        }
        let chol = a.cholesky()?;
        let l = chol.l_dirty();
        let min_pivot = (0..n).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
        if min_pivot < PIVOT_TOL * scale {
            return None;
        }
        Some(chol.solve(&rhs))
    };
    let d = solve(sigma)
        .or_else(|| solve(sigma + SINGULAR_RIDGE))
        .ok_or_else(|| invalid("ridge system is singular"))?;
    Ok(d.iter().copied().collect())
}
