//! Small statistical helpers shared by the samplers, the coupling
//! estimators, and the test suites.

/// Sample mean and standard error (`sd / sqrt(n)`). Panics on empty input.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    assert!(!xs.is_empty(), "mean of empty sample");
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup distance between the
/// empirical CDFs. Panics if either sample is empty.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS of empty sample");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Least-squares slope of `ln y_k` against `k`, returned as the per-step
/// decay factor `exp(slope)`. Returns `None` when fewer than two entries are
/// positive and finite (a flat-at-zero sequence has no decay rate).
pub fn log_linear_decay(ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ys
        .iter()
        .enumerate()
        .filter(|(_, y)| **y > 0.0 && y.is_finite())
        .map(|(k, y)| (k as f64, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum::<f64>();
    if sxx == 0.0 {
        return None;
    }
    let sxy = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>();
    Some((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_se_known_values() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        // sample variance 5/3, se = sqrt(5/3/4)
        assert!((se - (5.0 / 12.0f64).sqrt()).abs() < 1e-15);
        let (m1, se1) = mean_and_se(&[7.0]);
        assert_eq!((m1, se1), (7.0, 0.0));
    }

    #[test]
    fn ks_identical_samples_is_zero() {
        let xs = [0.3, 1.2, 5.0, -2.0];
        assert_eq!(two_sample_ks(&xs, &xs), 0.0);
    }

    #[test]
    fn ks_disjoint_samples_is_one() {
        assert_eq!(two_sample_ks(&[0.0, 1.0], &[5.0, 6.0]), 1.0);
    }

    #[test]
    fn ks_half_shifted() {
        // {0,1} vs {1,2}: CDFs differ by exactly 1/2 just below 1
        let d = two_sample_ks(&[0.0, 1.0], &[1.0, 2.0]);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn decay_rate_of_exact_geometric_sequence() {
        let ys: Vec<f64> = (0..20).map(|k| 3.0 * 0.8f64.powi(k)).collect();
        let rate = log_linear_decay(&ys).unwrap();
        assert!((rate - 0.8).abs() < 1e-12);
    }

    #[test]
    fn decay_rate_ignores_zeros_and_needs_two_points() {
        assert_eq!(log_linear_decay(&[0.0, 0.0, 1.0]), None);
        assert_eq!(log_linear_decay(&[]), None);
        let rate = log_linear_decay(&[1.0, 0.0, 0.25]).unwrap();
        assert!((rate - 0.5).abs() < 1e-12);
    }
}
