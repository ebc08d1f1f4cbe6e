//! Classification of level-set functions by the smallest dimension `k` in
//! which they arise from a radial log-concave density.
//!
//! `ell` belongs to class `k` when `s -> ln ell_inverse(s^k)` is concave.
//! Equivalently (for differentiable `ell`), `psi(t) = t ell'(t) /
//! ell(t)^{1-1/k}` is non-increasing. Membership in class `k` yields the
//! spectral-gap lower bound `1/(k+1)` for the slice-sampling kernel, so the
//! smallest such `k` gives the strongest statement. [`build_rho_tilde`]
//! realizes the class witness: the `k`-dimensional radial density with the
//! same level-set function.

use std::sync::Arc;

use crate::geometry::unit_ball_volume;
use crate::targets::{LevelSetFunction, RadialProfile, ScalarFn};
use crate::{Error, Result};

/// Grid resolution used by the suites and the CLI default.
pub const DEFAULT_GRID_SIZE: usize = 512;

/// `psi(t) = t * ell'(t) / ell(t)^(1 - 1/k)`; non-increasing on the support
/// exactly when `ell` belongs to class `k`. Negative wherever defined.
pub fn psi(ell: &LevelSetFunction, t: f64, k: usize) -> Result<f64> {
    assert!(k >= 1, "class index must be at least 1");
    if !(t > 0.0 && t < ell.t_max) {
        return Err(Error::LevelOutsideSupport { t, t_max: ell.t_max });
    }
    let der = ell.derivative_at(t).ok_or(Error::MissingDerivative)?;
    Ok(t * der / ell.value(t).powf(1.0 - 1.0 / k as f64))
}

/// Evidence gathered by [`classify_lambda`]: the concavity residuals of
/// `ln ell_inverse(s^k)` on `s_grid` (positive residual = chord above the
/// function = local convexity) and, when `ell'` exists, the `psi` values on
/// `psi_grid`.
#[derive(Debug, Clone)]
pub struct LambdaReport {
    pub k: usize,
    pub member: bool,
    pub grid_size: usize,
    pub s_grid: Vec<f64>,
    pub second_differences: Vec<f64>,
    pub psi_grid: Vec<f64>,
    pub psi_values: Vec<f64>,
}

/// Decide class-`k` membership on a geometric grid.
///
/// The concavity of `ln ell_inverse(s^k)` is tested by chord residuals at
/// interior grid points (relative tolerance `1e-8`, boundary cells excluded
/// because the function may diverge there); zero residual (a linear piece)
/// counts as concave. When the derivative is available, monotonicity of
/// `psi` is checked on an equally sized grid and the two criteria must
/// agree; disagreement reports an error rather than picking a side.
pub fn classify_lambda(ell: &LevelSetFunction, k: usize, grid_size: usize) -> Result<LambdaReport> {
    assert!(k >= 1, "class index must be at least 1");
    if grid_size < 8 {
        return Err(Error::InvalidArgument(format!(
            "classification grid must have at least 8 points, got {grid_size}"
        )));
    }
    let t_lo = ell.t_max * 1e-8;
    let s_max = ell.value(t_lo).powf(1.0 / k as f64);

    // geometric s-grid spanning eight orders of magnitude below s_max
    let s_grid: Vec<f64> = (0..grid_size)
        .map(|i| s_max * 1e-8f64.powf(1.0 - i as f64 / (grid_size - 1) as f64))
        .collect();
    let mut f = Vec::with_capacity(grid_size);
    for s in &s_grid {
        f.push(ell.inverse(s.powi(k as i32))?.ln());
    }
    let mut second_differences = Vec::with_capacity(grid_size - 2);
    let mut concave = true;
    let mut worst_s = s_grid[1];
    let mut worst = f64::NEG_INFINITY;
    for i in 1..grid_size - 1 {
        let (h1, h2) = (s_grid[i] - s_grid[i - 1], s_grid[i + 1] - s_grid[i]);
        let chord = (h2 * f[i - 1] + h1 * f[i + 1]) / (h1 + h2);
        let residual = chord - f[i]; // > 0 where the chord lies above f
        second_differences.push(residual);
        let tol = 1e-8 * f[i - 1].abs().max(f[i + 1].abs()).max(1.0);
        if residual > tol {
            concave = false;
            if residual > worst {
                worst = residual;
                worst_s = s_grid[i];
            }
        }
    }

    let (psi_grid, psi_values, psi_decreasing) = if ell.has_derivative() {
        let t_hi = ell.t_max * (1.0 - 1e-6);
        let grid: Vec<f64> = (0..grid_size)
            .map(|i| t_lo * (t_hi / t_lo).powf(i as f64 / (grid_size - 1) as f64))
            .collect();
        let mut vals = Vec::with_capacity(grid_size);
        for t in &grid {
            vals.push(psi(ell, *t, k)?);
        }
        let mut dec = true;
        for w in vals.windows(2) {
            let tol = 1e-8 * w[0].abs().max(w[1].abs()).max(1.0);
            if w[1] > w[0] + tol {
                dec = false;
                break;
            }
        }
        (grid, vals, Some(dec))
    } else {
        (vec![], vec![], None)
    };

    if let Some(dec) = psi_decreasing {
        if dec != concave {
            return Err(Error::CriteriaConflict {
                k,
                concave,
                psi_decreasing: dec,
                detail: format!(
                    "worst concavity residual {worst:.3e} at s={worst_s:.6e} \
                     vs psi monotonicity over {grid_size} points"
                ),
            });
        }
    }

    Ok(LambdaReport {
        k,
        member: concave,
        grid_size,
        s_grid,
        second_differences,
        psi_grid,
        psi_values,
    })
}

/// Smallest `k <= k_max` whose membership test passes, or `None`. The
/// classes are nested, so this is the full membership picture.
pub fn min_lambda_k(ell: &LevelSetFunction, k_max: usize) -> Result<Option<usize>> {
    for k in 1..=k_max {
        if classify_lambda(ell, k, DEFAULT_GRID_SIZE)?.member {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// The `k`-dimensional rotationally invariant density with the same
/// level-set function as `ell`:
/// `rho(x) = ell_inverse(unit_ball_volume(k) * |x|^k)` on the ball of
/// radius `(sup ell / unit_ball_volume(k))^{1/k}`.
///
/// Membership of `ell` in class `k` is verified first; it guarantees the
/// profile is log-concave.
pub fn build_rho_tilde(ell: &LevelSetFunction, k: usize) -> Result<RadialProfile> {
    let report = classify_lambda(ell, k, DEFAULT_GRID_SIZE)?;
    if !report.member {
        return Err(Error::NotInLambda { k });
    }
    let lam = unit_ball_volume(k);
    let radius = if ell.ell_sup.is_finite() {
        (ell.ell_sup / lam).powf(1.0 / k as f64)
    } else {
        f64::INFINITY
    };
    let ell_phi = ell.clone();
    let phi: ScalarFn = Arc::new(move |s: f64| {
        let vol = lam * s.powi(k as i32);
        if vol <= 0.0 {
            return -ell_phi.t_max.ln();
        }
        let t = ell_phi
            .inverse(vol)
            .expect("volume inside (0, sup ell) by the domain restriction");
        -t.ln()
    });
    let ell_inv = ell.clone();
    let phi_inverse: ScalarFn = Arc::new(move |u: f64| {
        let t = (-u).exp();
        if t <= 0.0 {
            // exponent beyond floating range: the level set has filled the
            // whole domain
            return radius;
        }
        (ell_inv.value(t) / lam).powf(1.0 / k as f64)
    });
    Ok(RadialProfile::new(
        k,
        phi,
        phi_inverse,
        radius,
        &format!("level-matched-{k}d"),
    ))
}
