//! The target-density catalog.
//!
//! Every target exposes three synchronized views of the same object:
//! the density `rho` itself, the level set `{x : rho(x) >= t}` as an exact
//! finite union of disjoint annuli (so uniform sampling on it is exact), and
//! the level-set function `ell(t)` = Lebesgue volume of that level set,
//! together with its inverse and (where known) derivative. Rotationally
//! invariant log-concave targets additionally carry a [`RadialProfile`]
//! (`rho(x) = exp(-phi(|x|))` with `phi` increasing and convex), which is
//! what the explicit coupling in the sampler needs.

use std::fmt;
use std::sync::Arc;

use crate::geometry::{norm, radius_from_volume, unit_ball_volume, Annulus};
use crate::{Error, Result};

/// Shared scalar function handle; all catalog closures are cheap and pure.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Level-set function `t -> volume{x : rho(x) >= t}`: strictly decreasing on
/// `(0, t_max)`, zero at and beyond `t_max = sup rho`, with supremum
/// `ell_sup = lim_{t->0+} ell(t)` (possibly infinite).
#[derive(Clone)]
pub struct LevelSetFunction {
    ell: ScalarFn,
    inverse: Option<ScalarFn>,
    derivative: Option<ScalarFn>,
    pub ell_sup: f64,
    pub t_max: f64,
}

impl fmt::Debug for LevelSetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelSetFunction")
            .field("ell_sup", &self.ell_sup)
            .field("t_max", &self.t_max)
            .field("has_inverse", &self.inverse.is_some())
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl LevelSetFunction {
    pub fn new(
        ell: ScalarFn,
        inverse: Option<ScalarFn>,
        derivative: Option<ScalarFn>,
        ell_sup: f64,
        t_max: f64,
    ) -> Self {
        assert!(t_max > 0.0, "t_max must be positive, got {t_max}");
        assert!(ell_sup > 0.0, "ell_sup must be positive, got {ell_sup}");
        Self { ell, inverse, derivative, ell_sup, t_max }
    }

    /// `ell(t)`; zero for `t >= t_max`. Panics on `t <= 0` (the function is
    /// only defined on positive levels).
    pub fn value(&self, t: f64) -> f64 {
        assert!(t > 0.0, "level must be positive, got {t}");
        if t >= self.t_max {
            0.0
        } else {
            (self.ell)(t)
        }
    }

    /// `ell^{-1}(s)` for `s` in `(0, ell_sup)`: the closed form when the
    /// catalog provides one, otherwise bisection.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < self.ell_sup) {
            return Err(Error::ValueOutOfRange { s, sup: self.ell_sup });
        }
        match &self.inverse {
            Some(inv) => Ok(inv(s)),
            None => level_set_inverse_numeric(self, s),
        }
    }

    /// `ell'(t)` when a closed form is available; `None` otherwise.
    pub fn derivative_at(&self, t: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// The scaled function `c * ell` (same support, scaled volumes). The
    /// class-membership analysis is invariant under this.
    pub fn scaled(&self, c: f64) -> LevelSetFunction {
        assert!(c > 0.0, "scale must be positive, got {c}");
        let ell = self.ell.clone();
        let inverse = self.inverse.clone().map(|inv| -> ScalarFn {
            Arc::new(move |s: f64| inv(s / c))
        });
        let derivative = self.derivative.clone().map(|der| -> ScalarFn {
            Arc::new(move |t: f64| c * der(t))
        });
        LevelSetFunction {
            ell: Arc::new(move |t: f64| c * ell(t)),
            inverse,
            derivative,
            ell_sup: c * self.ell_sup,
            t_max: self.t_max,
        }
    }
}

/// Invert a level-set function by bisection, using only strict monotonicity.
/// Returns `t` with `|ell(t) - s| <= 1e-10 * max(1, s)`.
pub fn level_set_inverse_numeric(ell: &LevelSetFunction, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < ell.ell_sup) {
        return Err(Error::ValueOutOfRange { s, sup: ell.ell_sup });
    }
    let mut hi = ell.t_max;
    // shrink the lower bracket geometrically until ell(lo) >= s
    let mut lo = ell.t_max * 0.5;
    while ell.value(lo) < s {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::ValueOutOfRange { s, sup: ell.ell_sup });
        }
    }
    // geometric bisection handles the wide dynamic range in t
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if ell.value(mid) >= s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let t = (lo * hi).sqrt();
    let err = (ell.value(t) - s).abs();
    if err > 1e-10 * s.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "bisection stalled inverting level-set function at s={s}: residual {err}"
        )));
    }
    Ok(t)
}

/// Rotationally invariant density `rho(x) = exp(-phi(|x|))` on the ball of
/// radius `R` (possibly infinite), with `phi` strictly increasing.
/// `phi_inverse` acts on exponent values `u = -ln t` and is extended by
/// `phi_inverse(u) = R` for `u` beyond the range of `phi`.
#[derive(Clone)]
pub struct RadialProfile {
    pub d: usize,
    phi: ScalarFn,
    phi_inverse: ScalarFn,
    pub radius: f64,
    pub name: String,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("d", &self.d)
            .field("radius", &self.radius)
            .field("name", &self.name)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(d: usize, phi: ScalarFn, phi_inverse: ScalarFn, radius: f64, name: &str) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        assert!(radius > 0.0, "domain radius must be positive");
        Self { d, phi, phi_inverse, radius, name: name.to_string() }
    }

    /// Standard normal shape: `phi(s) = s^2 / 2`.
    pub fn gaussian(d: usize) -> Self {
        Self::gen_exponential_named(d, 0.5, 2.0, "gaussian")
    }

    /// `phi(s) = alpha * s`.
    pub fn exponential(d: usize, alpha: f64) -> Self {
        Self::gen_exponential_named(d, alpha, 1.0, "exponential")
    }

    /// `phi(s) = alpha * s^gamma`.
    pub fn gen_exponential(d: usize, alpha: f64, gamma: f64) -> Self {
        Self::gen_exponential_named(d, alpha, gamma, "genexp")
    }

    fn gen_exponential_named(d: usize, alpha: f64, gamma: f64, name: &str) -> Self {
        assert!(alpha > 0.0 && gamma > 0.0, "alpha and gamma must be positive");
        Self::new(
            d,
            Arc::new(move |s: f64| alpha * s.powf(gamma)),
            Arc::new(move |u: f64| (u.max(0.0) / alpha).powf(1.0 / gamma)),
            f64::INFINITY,
            name,
        )
    }

    /// Density at the radius `r >= 0`; zero outside the domain ball.
    pub fn rho_norm(&self, r: f64) -> f64 {
        assert!(r >= 0.0, "radius must be nonnegative, got {r}");
        if r >= self.radius {
            0.0
        } else {
            (-(self.phi)(r)).exp()
        }
    }

    pub fn rho(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d, "point dimension mismatch");
        self.rho_norm(norm(x))
    }

    pub fn rho_sup(&self) -> f64 {
        (-(self.phi)(0.0)).exp()
    }

    /// `phi(s) = -ln rho(s)`, evaluated directly (no exp/ln round trip).
    pub fn exponent(&self, s: f64) -> f64 {
        assert!(
            (0.0..self.radius).contains(&s),
            "radius {s} outside [0, {})",
            self.radius
        );
        (self.phi)(s)
    }

    /// `phi_inverse` on the exponent scale (`u = -ln t`), including the
    /// extension to the full domain radius.
    pub fn radius_at_exponent(&self, u: f64) -> f64 {
        (self.phi_inverse)(u)
    }

    /// Radius of the ball level set `{rho >= t}` for `t` in `(0, rho_sup]`.
    pub fn ball_radius(&self, t: f64) -> f64 {
        assert!(
            t > 0.0 && t <= self.rho_sup(),
            "level {t} outside (0, {}]",
            self.rho_sup()
        );
        self.radius_at_exponent(-t.ln())
    }

    /// The level-set function of this profile:
    /// `ell(t) = unit_ball_volume(d) * ball_radius(t)^d`.
    pub fn level_set_function(&self) -> LevelSetFunction {
        let lam = unit_ball_volume(self.d);
        let d = self.d;
        let me = self.clone();
        let me_inv = self.clone();
        let ell_sup = if self.radius.is_finite() {
            lam * self.radius.powi(d as i32)
        } else {
            f64::INFINITY
        };
        LevelSetFunction::new(
            Arc::new(move |t: f64| lam * me.ball_radius(t).powi(d as i32)),
            Some(Arc::new(move |s: f64| {
                me_inv.rho_norm(radius_from_volume(d, s))
            })),
            None,
            ell_sup,
            self.rho_sup(),
        )
    }
}

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type LevelSetFn = Arc<dyn Fn(f64) -> Vec<Annulus> + Send + Sync>;

/// A catalog target: density, exact level-set description, level-set
/// function, and the radial profile when the target has one. Immutable after
/// construction and safe to share across threads.
#[derive(Clone)]
pub struct TargetDensity {
    pub d: usize,
    pub name: String,
    rho: PointFn,
    pub rho_sup: f64,
    level_set: LevelSetFn,
    pub ell: LevelSetFunction,
    pub profile: Option<RadialProfile>,
}

impl fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDensity")
            .field("d", &self.d)
            .field("name", &self.name)
            .field("rho_sup", &self.rho_sup)
            .finish()
    }
}

impl TargetDensity {
    pub fn rho(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d, "point dimension mismatch");
        (self.rho)(x)
    }

    /// The level set `{x : rho(x) >= t}` as disjoint annuli; empty when the
    /// set has zero volume (`t >= rho_sup` included). Panics on `t <= 0`.
    pub fn level_set(&self, t: f64) -> Vec<Annulus> {
        assert!(t > 0.0, "level must be positive, got {t}");
        (self.level_set)(t)
    }

    /// `exp(-|x|^2/2)`: level sets are centered balls of radius
    /// `sqrt(2 ln(1/t))`.
    pub fn gaussian(d: usize) -> Self {
        Self::radial_family(d, 0.5, 2.0, "gaussian")
    }

    /// `exp(-alpha |x|)`: centered balls of radius `ln(1/t) / alpha`.
    pub fn exponential(d: usize, alpha: f64) -> Self {
        Self::radial_family(d, alpha, 1.0, "exponential")
    }

    /// `exp(-alpha |x|^gamma)`: centered balls of radius
    /// `(ln(1/t) / alpha)^{1/gamma}`.
    pub fn gen_exponential(d: usize, alpha: f64, gamma: f64) -> Self {
        Self::radial_family(d, alpha, gamma, "genexp")
    }

    fn radial_family(d: usize, alpha: f64, gamma: f64, name: &str) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        assert!(alpha > 0.0 && gamma > 0.0, "alpha and gamma must be positive");
        let profile = RadialProfile::gen_exponential_named(d, alpha, gamma, name);
        let lam = unit_ball_volume(d);
        let m = d as f64 / gamma; // ell(t) = lam * (ln(1/t) / alpha)^m
        let p = profile.clone();
        let rho: PointFn = Arc::new(move |x: &[f64]| p.rho(x));
        let p2 = profile.clone();
        let level_set: LevelSetFn = Arc::new(move |t: f64| {
            if t >= 1.0 {
                return vec![];
            }
            let r = p2.ball_radius(t);
            if r > 0.0 {
                vec![Annulus::ball(vec![0.0; p2.d], r)]
            } else {
                vec![]
            }
        });
        let ell = LevelSetFunction::new(
            Arc::new(move |t: f64| lam * ((1.0 / t).ln() / alpha).powf(m)),
            Some(Arc::new(move |s: f64| (-alpha * (s / lam).powf(1.0 / m)).exp())),
            Some(Arc::new(move |t: f64| {
                let u = (1.0 / t).ln();
                -lam * m * (u / alpha).powf(m - 1.0) / (alpha * t)
            })),
            f64::INFINITY,
            1.0,
        );
        Self {
            d,
            name: name.to_string(),
            rho,
            rho_sup: 1.0,
            level_set,
            ell,
            profile: Some(profile),
        }
    }

    /// `exp(-|x|^{2d} + 2|x|^d)`: a ridge of height `e` on the unit sphere.
    /// Level sets are balls for `t <= 1` and annuli for `1 < t < e`; the
    /// level-set function has a kink at `t = 1` and no derivative there.
    pub fn volcano(d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        let lam = unit_ball_volume(d);
        let di = d as i32;
        let rho: PointFn = Arc::new(move |x: &[f64]| {
            let p = norm(x).powi(di);
            (p * (2.0 - p)).exp()
        });
        let level_set: LevelSetFn = Arc::new(move |t: f64| {
            let dinv = 1.0 / d as f64;
            if t <= 1.0 {
                // |x|^d <= 1 + sqrt(1 + ln(1/t))
                let p_out = 1.0 + (1.0 + (1.0 / t).ln()).sqrt();
                vec![Annulus::ball(vec![0.0; d], p_out.powf(dinv))]
            } else if t < std::f64::consts::E {
                let w = (1.0 - t.ln()).sqrt();
                if w > 0.0 {
                    vec![Annulus::new(
                        vec![0.0; d],
                        (1.0 - w).powf(dinv),
                        (1.0 + w).powf(dinv),
                    )]
                } else {
                    vec![]
                }
            } else {
                vec![]
            }
        });
        // ell / lam is dimension-free: 1 + sqrt(1 + ln(1/t)) below the ridge,
        // 2 sqrt(1 - ln t) above it.
        let ell = LevelSetFunction::new(
            Arc::new(move |t: f64| {
                if t <= 1.0 {
                    lam * (1.0 + (1.0 + (1.0 / t).ln()).sqrt())
                } else {
                    lam * 2.0 * (1.0 - t.ln()).sqrt()
                }
            }),
            Some(Arc::new(move |s: f64| {
                let sp = s / lam;
                if sp >= 2.0 {
                    (sp * (2.0 - sp)).exp()
                } else {
                    (1.0 - sp * sp / 4.0).exp()
                }
            })),
            Some(Arc::new(move |t: f64| {
                if t < 1.0 {
                    -lam / (2.0 * t * (1.0 + (1.0 / t).ln()).sqrt())
                } else {
                    -lam / (t * (1.0 - t.ln()).sqrt())
                }
            })),
            f64::INFINITY,
            std::f64::consts::E,
        );
        Self {
            d,
            name: "volcano".to_string(),
            rho,
            rho_sup: std::f64::consts::E,
            level_set,
            ell,
            profile: None,
        }
    }

    /// `max(exp(-|x|^2/2), exp(-|x-m0|^2/4)) - 1/2` with `m0 = (5,0,...,0)`:
    /// two disjoint ball components of different widths, bounded level-set
    /// function, supremum 1/2.
    pub fn bimodal(d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        let lam = unit_ball_volume(d);
        let df = d as f64;
        let big_c = 2f64.powf(df / 2.0) + 4f64.powf(df / 2.0);
        let m0 = Self::bimodal_mode_center(d);
        let m0c = m0.clone();
        let rho: PointFn = Arc::new(move |x: &[f64]| {
            let r0 = norm(x);
            let r1 = crate::geometry::dist(x, &m0c);
            let v = (-r0 * r0 / 2.0).exp().max((-r1 * r1 / 4.0).exp()) - 0.5;
            v.max(0.0)
        });
        let m0l = m0.clone();
        let level_set: LevelSetFn = Arc::new(move |t: f64| {
            if t >= 0.5 {
                return vec![];
            }
            let c = -(t + 0.5).ln(); // in (0, ln 2)
            vec![
                Annulus::ball(vec![0.0; d], (2.0 * c).sqrt()),
                Annulus::ball(m0l.clone(), 2.0 * c.sqrt()),
            ]
        });
        let ell_sup = big_c * lam * std::f64::consts::LN_2.powf(df / 2.0);
        let ell = LevelSetFunction::new(
            Arc::new(move |t: f64| {
                let c = -(t + 0.5).ln();
                big_c * lam * c.powf(df / 2.0)
            }),
            Some(Arc::new(move |s: f64| {
                let c = (s / (big_c * lam)).powf(2.0 / df);
                (-c).exp() - 0.5
            })),
            Some(Arc::new(move |t: f64| {
                let c = -(t + 0.5).ln();
                -big_c * lam * (df / 2.0) * c.powf(df / 2.0 - 1.0) / (t + 0.5)
            })),
            ell_sup,
            0.5,
        );
        Self {
            d,
            name: "bimodal".to_string(),
            rho,
            rho_sup: 0.5,
            level_set,
            ell,
            profile: None,
        }
    }

    /// Center of the second mode of the bimodal target.
    pub fn bimodal_mode_center(d: usize) -> Vec<f64> {
        let mut m0 = vec![0.0; d];
        m0[0] = 5.0;
        m0
    }
}
