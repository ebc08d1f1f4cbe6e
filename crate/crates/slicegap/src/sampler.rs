//! The samplers: exact slice sampling of a catalog target (X-chain), the
//! level-only auxiliary chain (T-chain), and the explicit coupling of two
//! slice-sampler chains driven by shared randomness.
//!
//! One X-step from `x`: draw `t` uniform on `(0, rho(x)]`, then return a
//! uniform point of the level set `{rho >= t}`. The T-chain simulates the
//! induced dynamics of the level variable alone; it depends on the target
//! only through its level-set function, so targets with equal `ell` have
//! identical T-chains. The coupling feeds both chains the same level ratio
//! and the same unit-ball point; for radial log-concave targets this
//! contracts the norm gap by `d/(d+1)` per step in expectation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{dist, norm, sample_annulus, sample_uniform_ball};
use crate::stats::log_linear_decay;
use crate::targets::{LevelSetFunction, RadialProfile, TargetDensity};
use crate::{Error, Result};

/// Steps discarded before recording; enough for any catalog target at desk
/// scale (the contraction factor is at most `1 - 1/(d+1)`).
pub const DEFAULT_BURN_IN: usize = 1000;

/// One slice-sampling transition. Returns the auxiliary level `t` drawn
/// uniformly on `(0, rho(x)]` and the new state, uniform on `{rho >= t}`.
pub fn slice_step<R: Rng + ?Sized>(
    target: &TargetDensity,
    x: &[f64],
    rng: &mut R,
) -> Result<(f64, Vec<f64>)> {
    let rho_x = target.rho(x);
    if rho_x <= 0.0 {
        return Err(Error::OutsideSupport { rho: rho_x });
    }
    // A level set of zero volume can only appear when t lands exactly on
    // sup rho (a measure-zero draw); redraw rather than fail.
    for _ in 0..100 {
        let t = rho_x * (1.0 - rng.random::<f64>()); // uniform on (0, rho_x]
        let annuli = target.level_set(t);
        let total: f64 = annuli.iter().map(|a| a.volume()).sum();
        if total <= 0.0 {
            continue;
        }
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = annuli.last().expect("nonempty by total > 0");
        for a in &annuli {
            pick -= a.volume();
            if pick <= 0.0 {
                chosen = a;
                break;
            }
        }
        let x_new = sample_annulus(chosen, rng);
        assert!(
            target.rho(&x_new) >= t * (1.0 - 1e-9),
            "slice step left the level set: rho(x')={} < t={t}",
            target.rho(&x_new)
        );
        return Ok((t, x_new));
    }
    Err(Error::InvalidArgument(format!(
        "level set at every drawn level has zero volume near rho(x)={rho_x}"
    )))
}

/// A recorded X-chain: `states[i]` was produced with auxiliary level
/// `levels[i]`, and `rho_values[i] = rho(states[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub target_name: String,
    pub d: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub states: Vec<Vec<f64>>,
    pub levels: Vec<f64>,
    pub rho_values: Vec<f64>,
}

/// Run `n` recorded slice-sampling steps from `x0` after `burn_in` discarded
/// ones, on a stream derived from `seed` alone (bit-reproducible).
pub fn run_chain(
    target: &TargetDensity,
    x0: &[f64],
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<ChainTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = x0.to_vec();
    if target.rho(&x) <= 0.0 {
        return Err(Error::OutsideSupport { rho: target.rho(&x) });
    }
    for _ in 0..burn_in {
        x = slice_step(target, &x, &mut rng)?.1;
    }
    let mut trace = ChainTrace {
        target_name: target.name.clone(),
        d: target.d,
        seed,
        burn_in,
        states: Vec::with_capacity(n),
        levels: Vec::with_capacity(n),
        rho_values: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let (t, x_new) = slice_step(target, &x, &mut rng)?;
        x = x_new;
        trace.levels.push(t);
        trace.rho_values.push(target.rho(&x));
        trace.states.push(x.clone());
    }
    Ok(trace)
}

/// One transition of the auxiliary level chain, using only the level-set
/// function: `r = ell_inverse(V * ell(t))` is the level of the implicit
/// uniform point on the current level set, and the new level is uniform on
/// `(0, r]`.
pub fn level_step<R: Rng + ?Sized>(
    ell: &LevelSetFunction,
    t: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(t > 0.0 && t < ell.t_max) {
        return Err(Error::LevelOutsideSupport { t, t_max: ell.t_max });
    }
    let v = 1.0 - rng.random::<f64>(); // (0, 1]
    let r = ell.inverse(v * ell.value(t))?;
    let u = 1.0 - rng.random::<f64>();
    Ok(u * r)
}

/// A recorded T-chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace {
    pub seed: u64,
    pub burn_in: usize,
    pub levels: Vec<f64>,
}

pub fn run_level_chain(
    ell: &LevelSetFunction,
    t0: f64,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<LevelTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = t0;
    for _ in 0..burn_in {
        t = level_step(ell, t, &mut rng)?;
    }
    let mut levels = Vec::with_capacity(n);
    for _ in 0..n {
        t = level_step(ell, t, &mut rng)?;
        levels.push(t);
    }
    Ok(LevelTrace { seed, burn_in, levels })
}

/// One coupled transition for a rotationally invariant log-concave target:
/// both chains share the level ratio `r` and the unit-ball point `z`, and
/// each maps `z` onto its own level-set ball. Marginally each output is an
/// ordinary slice-sampling step. Works on the exponent scale
/// (`phi(|x|) - ln r`), which stays finite far into the tails.
pub fn coupled_step<R: Rng + ?Sized>(
    profile: &RadialProfile,
    x: &[f64],
    y: &[f64],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (nx, ny) = (norm(x), norm(y));
    if nx >= profile.radius || ny >= profile.radius {
        return Err(Error::OutsideSupport { rho: 0.0 });
    }
    let r = 1.0 - rng.random::<f64>(); // level ratio t / rho(x), in (0, 1]
    let log_r = r.ln();
    let radius_x = profile.radius_at_exponent(profile.exponent(nx) - log_r);
    let radius_y = profile.radius_at_exponent(profile.exponent(ny) - log_r);
    let z = sample_uniform_ball(profile.d, 1.0, rng);
    let x_new = z.iter().map(|c| c * radius_x).collect();
    let y_new = z.iter().map(|c| c * radius_y).collect();
    Ok((x_new, y_new))
}

/// One coupled path with per-step distances `|x_n - y_n|` and norm gaps
/// `||x_n| - |y_n||`; index 0 holds the initial pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrace {
    pub seed: u64,
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    pub distances: Vec<f64>,
    pub norm_gaps: Vec<f64>,
}

pub fn run_coupled_path(
    profile: &RadialProfile,
    x0: &[f64],
    y0: &[f64],
    n: usize,
    seed: u64,
) -> Result<CoupledTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = CoupledTrace {
        seed,
        pairs: Vec::with_capacity(n + 1),
        distances: Vec::with_capacity(n + 1),
        norm_gaps: Vec::with_capacity(n + 1),
    };
    let record =
        |trace: &mut CoupledTrace, x: &[f64], y: &[f64]| {
            trace.distances.push(dist(x, y));
            trace.norm_gaps.push((norm(x) - norm(y)).abs());
            trace.pairs.push((x.to_vec(), y.to_vec()));
        };
    record(&mut trace, x0, y0);
    let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
    for _ in 0..n {
        let (xn, yn) = coupled_step(profile, &x, &y, &mut rng)?;
        x = xn;
        y = yn;
        record(&mut trace, &x, &y);
    }
    Ok(trace)
}

/// Replicate-averaged contraction statistics. `mean_distance[k]` and
/// `mean_norm_gap[k]` average step `k` over all replicates (step 0 is the
/// initial pair); `decay_rate` is the per-step factor fitted to the norm
/// gaps of steps `1..=n`, or `None` when the gaps are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionStats {
    pub seed: u64,
    pub reps: usize,
    pub mean_distance: Vec<f64>,
    pub mean_norm_gap: Vec<f64>,
    pub decay_rate: Option<f64>,
}

/// Run `reps` coupled paths of length `n` on independent substreams of
/// `seed` (replicate `i` uses stream `i`, so scheduling cannot change the
/// result) and average.
pub fn run_coupled(
    profile: &RadialProfile,
    x0: &[f64],
    y0: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<ContractionStats> {
    assert!(reps >= 1, "need at least one replicate");
    let mut mean_distance = vec![0.0; n + 1];
    let mut mean_norm_gap = vec![0.0; n + 1];
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep as u64);
        let (mut x, mut y) = (x0.to_vec(), y0.to_vec());
        mean_distance[0] += dist(&x, &y) / reps as f64;
        mean_norm_gap[0] += (norm(&x) - norm(&y)).abs() / reps as f64;
        for k in 1..=n {
            let (xn, yn) = coupled_step(profile, &x, &y, &mut rng)?;
            x = xn;
            y = yn;
            mean_distance[k] += dist(&x, &y) / reps as f64;
            mean_norm_gap[k] += (norm(&x) - norm(&y)).abs() / reps as f64;
        }
    }
    let decay_rate = log_linear_decay(&mean_norm_gap[1..]);
    Ok(ContractionStats { seed, reps, mean_distance, mean_norm_gap, decay_rate })
}
