//! Seeded random generators and samplers shared by scans and tests.
//!
//! Every experiment derives its generator from a single `u64` seed. Distinct
//! purposes use distinct ChaCha streams, and per-item substreams keep parallel
//! scans reproducible regardless of scheduling.

use std::f64::consts::PI;

use nalgebra::{Quaternion, Rotation3, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::ChartState;
use crate::profiles::RotatorProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Frame = 1,
    States = 2,
    Phases = 3,
}

pub fn experiment_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    substream_rng(seed, stream, 0)
}

pub fn substream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 40) | index);
    rng
}

/// Uniform direction on the unit sphere.
pub fn unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let az: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * az.cos(), r * az.sin(), z]
}

/// Haar-uniform rotation (Shoemake's construction).
pub fn uniform_rotation<R: Rng>(rng: &mut R) -> Rotation3<f64> {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random_range(0.0..2.0 * PI);
    let u3: f64 = rng.random_range(0.0..2.0 * PI);
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = Quaternion::new(a * u2.cos(), a * u2.sin(), b * u3.sin(), b * u3.cos());
    UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// Bounds for random chart states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBounds {
    pub max_speed: f64,
    pub max_w: f64,
    /// θ is drawn from `[margin, π − margin]`.
    pub theta_margin: f64,
}

impl Default for StateBounds {
    fn default() -> Self {
        StateBounds {
            max_speed: 0.9,
            max_w: 2.0,
            theta_margin: 0.2,
        }
    }
}

pub fn random_state<R: Rng>(rng: &mut R, bounds: &StateBounds) -> ChartState {
    let theta = rng.random_range(bounds.theta_margin..=PI - bounds.theta_margin);
    let phi_sph = rng.random_range(0.0..2.0 * PI);
    let dir = unit_vector(rng);
    let speed = rng.random_range(0.0..=bounds.max_speed);
    let w1 = rng.random_range(-bounds.max_w..=bounds.max_w);
    let w2 = rng.random_range(-bounds.max_w..=bounds.max_w);
    ChartState {
        theta,
        phi_sph,
        v: dir.map(|c| c * speed),
        theta_dot: w1,
        phi_sph_dot: w2 / theta.sin(),
    }
}

/// Random state whose `Q` lies well inside the profile's domain.
pub fn random_state_for<R: Rng>(
    rng: &mut R,
    profile: &RotatorProfile,
    bounds: &StateBounds,
) -> ChartState {
    loop {
        let s = random_state(rng, bounds);
        let q = s.q();
        if profile.sampling_admits(q) {
            return s;
        }
    }
}
