//! Cross-module consistency checks: the classified membership level, the
//! discretized spectral gap, and the Wasserstein estimators must tell one
//! coherent story across the whole target catalog.

use slicegap::analysis::{
    discretize_q, min_lambda_k, spectral_gap, wasserstein_coupling_ub, wasserstein_dual_lb,
};
use slicegap::targets::{LevelSetFunction, RadialProfile, TargetDensity};

fn catalog() -> Vec<(String, LevelSetFunction)> {
    let mut out = Vec::new();
    for d in [1usize, 2, 4] {
        out.push((format!("gaussian d={d}"), TargetDensity::gaussian(d).ell));
    }
    for d in [1usize, 2, 3, 5] {
        out.push((
            format!("exponential d={d}"),
            TargetDensity::exponential(d, 1.0).ell,
        ));
    }
    out.push((
        "genexp d=3 gamma=0.5".into(),
        TargetDensity::gen_exponential(3, 1.0, 0.5).ell,
    ));
    out.push((
        "genexp d=4 gamma=2".into(),
        TargetDensity::gen_exponential(4, 2.0, 2.0).ell,
    ));
    for d in [1usize, 2, 3] {
        out.push((format!("volcano d={d}"), TargetDensity::volcano(d).ell));
    }
    for d in [2usize, 3] {
        out.push((format!("bimodal d={d}"), TargetDensity::bimodal(d).ell));
    }
    out
}

fn gap_at(ell: &LevelSetFunction, n: usize) -> f64 {
    let kernel = discretize_q(ell, n, ell.t_max * 1e-8, ell.t_max).unwrap();
    spectral_gap(&kernel, ell).unwrap().gap
}

/// Every catalog target with membership level k has discretized spectral gap
/// at least 1/(k+1) - 0.02.
#[test]
fn gap_respects_membership_level() {
    for (name, ell) in catalog() {
        let k = min_lambda_k(&ell, 12)
            .unwrap()
            .unwrap_or_else(|| panic!("{name}: no membership level up to 12"));
        let gap = gap_at(&ell, 512);
        let bound = 1.0 / (k as f64 + 1.0);
        assert!(
            gap >= bound - 0.02,
            "{name}: gap {gap:.4} below 1/({k}+1) - 0.02"
        );
        println!("{name}: k_min={k} gap={gap:.4} >= {bound:.4} - 0.02");
    }
}

/// Gaussian and exponential targets in d = 1..5 have gap at least 1/(d+1) - 0.02.
#[test]
fn gap_dimension_bound_for_smooth_families() {
    for d in 1..=5usize {
        let bound = 1.0 / (d as f64 + 1.0);
        for (name, ell) in [
            ("gaussian", TargetDensity::gaussian(d).ell),
            ("exponential", TargetDensity::exponential(d, 1.0).ell),
        ] {
            let gap = gap_at(&ell, 512);
            assert!(
                gap >= bound - 0.02,
                "{name} d={d}: gap {gap:.4} below 1/(d+1) - 0.02"
            );
        }
    }
}

/// Doubling the grid moves the gap estimate by less than 0.005 for one
/// representative of each target family.
#[test]
fn gap_is_grid_converged_across_families() {
    let representatives = [
        ("gaussian d=4", TargetDensity::gaussian(4).ell),
        ("exponential d=2", TargetDensity::exponential(2, 1.0).ell),
        (
            "genexp d=3 gamma=0.5",
            TargetDensity::gen_exponential(3, 1.0, 0.5).ell,
        ),
        ("volcano d=2", TargetDensity::volcano(2).ell),
        ("bimodal d=2", TargetDensity::bimodal(2).ell),
    ];
    for (name, ell) in representatives {
        let delta = (gap_at(&ell, 512) - gap_at(&ell, 1024)).abs();
        assert!(delta < 0.005, "{name}: grid delta {delta:.5} not below 0.005");
    }
}

/// The coupling upper bound never falls more than three standard errors below
/// the dual lower bound, across radial profiles and endpoint geometries.
#[test]
fn upper_bound_dominates_lower_bound() {
    let cases: Vec<(RadialProfile, f64, f64)> = vec![
        (RadialProfile::gaussian(2), 1.8, 0.4),
        (RadialProfile::gaussian(5), 3.0, 2.9),
        (RadialProfile::exponential(1, 2.0), 1.2, 0.1),
        (RadialProfile::exponential(4, 0.7), 2.5, 0.5),
        (RadialProfile::gen_exponential(3, 1.0, 3.0), 1.5, 0.2),
    ];
    for (profile, nx, ny) in cases {
        let d = profile.d;
        let mut x = vec![0.0; d];
        x[0] = nx;
        let mut y = vec![0.0; d];
        y[0] = ny;
        let ub = wasserstein_coupling_ub(&profile, &x, &y, 40_000, 5).unwrap();
        let lb = wasserstein_dual_lb(&profile, &x, &y, 40_000, 6).unwrap();
        let slack = 3.0 * (ub.std_error.powi(2) + lb.std_error.powi(2)).sqrt();
        assert!(
            ub.value >= lb.value - slack,
            "{}: ub {} below lb {} - {slack}",
            profile.name,
            ub.value,
            lb.value
        );
    }
}
