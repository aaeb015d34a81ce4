//! Per-trial random streams and surface samplers.

use std::f64::consts::TAU;

use noneuclid::{Geometry, Point, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sphere: normalized Gaussian triple. Hyperboloid: `(sinh r cos θ,
/// sinh r sin θ, cosh r)` with `r ∈ [0, 2]`. Plane: uniform in `[−2, 2]²`.
pub fn sample_point<R: Rng>(g: Geometry, rng: &mut R) -> Point {
    match g {
        Geometry::Spherical => loop {
            let v = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
            if v.norm() > 1e-6 {
                return g.renormalize(&v).expect("nonzero vector");
            }
        },
        Geometry::Euclidean => g
            .point(rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0), 1.0)
            .expect("chart point"),
        Geometry::Hyperbolic => {
            let r: f64 = rng.random_range(0.0..=2.0);
            let th: f64 = rng.random_range(0.0..TAU);
            g.renormalize(&Vec3::new(r.sinh() * th.cos(), r.sinh() * th.sin(), r.cosh())).expect("timelike")
        }
    }
}

/// Unit tangent direction at `p`, uniform in angle.
pub fn sample_direction<R: Rng>(g: Geometry, p: &Point, rng: &mut R) -> Vec3 {
    let (e1, e2) = g.tangent_frame(p, None);
    let a: f64 = rng.random_range(0.0..TAU);
    e1 * a.cos() + e2 * a.sin()
}
