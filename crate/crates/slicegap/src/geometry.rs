//! Euclidean balls and annuli: volumes and exact uniform sampling in any
//! dimension. All randomness flows through a caller-supplied `Rng`; there is
//! no global state.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

/// Closed annulus `{x : r_in <= |x - center| <= r_out}`; a ball is the
/// degenerate case `r_in = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Annulus {
    pub center: Vec<f64>,
    pub r_in: f64,
    pub r_out: f64,
}

impl Annulus {
    /// Panics unless `0 <= r_in < r_out` and the center is nonempty.
    pub fn new(center: Vec<f64>, r_in: f64, r_out: f64) -> Self {
        assert!(!center.is_empty(), "dimension must be at least 1");
        assert!(
            r_in >= 0.0 && r_in < r_out,
            "need 0 <= r_in < r_out, got [{r_in}, {r_out}]"
        );
        Self { center, r_in, r_out }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Self::new(center, 0.0, radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        let d = self.dim();
        unit_ball_volume(d) * (self.r_out.powi(d as i32) - self.r_in.powi(d as i32))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r = dist(&self.center, x);
        self.r_in <= r && r <= self.r_out
    }
}

/// Volume of the unit ball in `R^d`, via the recursion
/// `lam_1 = 2`, `lam_2 = pi`, `lam_d = lam_{d-2} * 2 pi / d`
/// (exact for integer `d`, no gamma function needed).
pub fn unit_ball_volume(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    let (mut v, mut k) = if d % 2 == 1 { (2.0, 1) } else { (PI, 2) };
    while k < d {
        k += 2;
        v *= 2.0 * PI / k as f64;
    }
    v
}

/// Radius of the ball in `R^d` with volume `v`. Panics on negative `v`.
pub fn radius_from_volume(d: usize, v: f64) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    assert!(v >= 0.0, "volume must be nonnegative, got {v}");
    (v / unit_ball_volume(d)).powf(1.0 / d as f64)
}

/// Uniform direction: normalized vector of `d` independent standard normals.
pub fn sample_unit_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    assert!(d >= 1, "dimension must be at least 1");
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 0.0 && n.is_finite() {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in the centered ball of the given radius:
/// direction uniform on the sphere, radius `R * V^(1/d)`.
pub fn sample_uniform_ball<R: Rng + ?Sized>(d: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    assert!(radius > 0.0, "radius must be positive, got {radius}");
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    sample_unit_sphere(d, rng)
        .into_iter()
        .map(|x| x * r)
        .collect()
}

/// Quantile function of the radius of a uniform point in an annulus:
/// `r = (r_in^d + v * (r_out^d - r_in^d))^(1/d)` for `v` in `[0, 1]`.
pub fn annulus_radius_quantile(d: usize, r_in: f64, r_out: f64, v: f64) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    assert!(
        r_in >= 0.0 && r_in < r_out,
        "need 0 <= r_in < r_out, got [{r_in}, {r_out}]"
    );
    assert!((0.0..=1.0).contains(&v), "quantile level must be in [0, 1]");
    let di = d as i32;
    (r_in.powi(di) + v * (r_out.powi(di) - r_in.powi(di))).powf(1.0 / d as f64)
}

/// Radius of a uniform point in the annulus `[r_in, r_out]` in `R^d`.
pub fn sample_annulus_radius<R: Rng + ?Sized>(
    d: usize,
    r_in: f64,
    r_out: f64,
    rng: &mut R,
) -> f64 {
    annulus_radius_quantile(d, r_in, r_out, rng.random::<f64>())
}

/// Uniform point in an annulus: quantile radius times a uniform direction,
/// translated by the center.
pub fn sample_annulus<R: Rng + ?Sized>(a: &Annulus, rng: &mut R) -> Vec<f64> {
    let d = a.dim();
    let r = sample_annulus_radius(d, a.r_in, a.r_out, rng);
    let dir = sample_unit_sphere(d, rng);
    a.center
        .iter()
        .zip(dir)
        .map(|(c, u)| c + r * u)
        .collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
