//! Shared fixtures for the criterion benchmarks.

use std::f64::consts::FRAC_PI_2;

use rotator_core::sampling::{random_state_for, substream_rng, StateBounds, Stream};
use rotator_core::{ChartState, RotatorProfile};

/// The reference state used across benches (`Q ≈ 0.1605`).
pub fn reference_state() -> ChartState {
    ChartState {
        theta: FRAC_PI_2,
        phi_sph: 0.0,
        v: [0.1, 0.0, 0.0],
        theta_dot: 0.2,
        phi_sph_dot: 0.3,
    }
}

/// `n` reproducible states admissible for `profile`.
pub fn sample_states(profile: &RotatorProfile, n: usize, seed: u64) -> Vec<ChartState> {
    let mut rng = substream_rng(seed, Stream::States, 0);
    (0..n)
        .map(|_| random_state_for(&mut rng, profile, &StateBounds::default()))
        .collect()
}
