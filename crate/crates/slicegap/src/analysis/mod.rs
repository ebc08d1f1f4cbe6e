//! Quantitative analysis of the slice sampler: class membership of
//! level-set functions, dimension reduction to a radial representative,
//! discretized level-kernel spectral gaps, Wasserstein bounds, and the
//! closed-form iteration/total-variation calculators.

mod kernel;
mod lambda;
mod wasserstein;

pub use kernel::{discretize_q, spectral_gap, DiscretizedKernel, GapEstimate, DEFAULT_T_LO_RATIO};
pub use lambda::{
    build_rho_tilde, classify_lambda, min_lambda_k, psi, LambdaReport, DEFAULT_GRID_SIZE,
};
pub use wasserstein::{
    mean_norm_after_step, wasserstein_coupling_ub, wasserstein_dual_lb, Estimate,
};

use crate::{Error, Result};

/// Iterations needed to bring an initial Wasserstein distance `w0` below
/// `epsilon` in dimension `d`, using the per-step contraction factor
/// `1 - 1/(d+1)`: `ceil((d+1) * ln(w0/epsilon))`, or 0 when already there.
pub fn mixing_iterations(d: usize, epsilon: f64, w0: f64) -> Result<u64> {
    assert!(d >= 1, "dimension must be at least 1");
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(w0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "initial distance must be positive, got {w0}"
        )));
    }
    if epsilon >= w0 {
        return Ok(0);
    }
    let raw = (d as f64 + 1.0) * (w0.ln() - epsilon.ln());
    // snap values that are integers up to floating noise before ceiling
    let snapped = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    Ok(snapped as u64)
}

/// Total-variation bound after `n` steps from a start with chi-square-type
/// discrepancy `chi`: `(1 - gap)^n * chi`.
pub fn tv_bound(gap: f64, n: u64, chi: f64) -> Result<f64> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "spectral gap must lie in (0, 1], got {gap}"
        )));
    }
    if !(chi >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "chi-square discrepancy must be nonnegative, got {chi}"
        )));
    }
    Ok((1.0 - gap).powf(n as f64) * chi)
}
