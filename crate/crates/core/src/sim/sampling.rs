use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::time::Time;

/// Shortest duration a sampled action can take.
pub const EPSILON: Time = Time::MILLI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DurationModel {
    /// Every action takes its maximum duration.
    Deterministic,
    /// `N(0.75 t, 0.125 t)` for maximum duration `t`, rounded to the
    /// millisecond and clamped to `[EPSILON, t]`.
    Stochastic,
}

/// One draw from the stochastic model.
///
/// # Panics
/// If `t_max` is not positive.
pub fn sample_duration<R: Rng + ?Sized>(t_max: Time, rng: &mut R) -> Time {
    assert!(t_max > Time::ZERO, "maximum duration must be positive");
    let t = t_max.to_f64();
    let normal = Normal::new(0.75 * t, 0.125 * t).expect("finite positive deviation");
    let x = normal.sample(rng);
    Time::from_f64_millis(x)
        .unwrap_or(EPSILON)
        .max(EPSILON)
        .min(t_max)
}

/// Durations for plan steps with the given maximums, in order.
pub fn sample_durations<R: Rng + ?Sized>(
    maximums: &[Time],
    model: DurationModel,
    rng: &mut R,
) -> Vec<Time> {
    match model {
        DurationModel::Deterministic => maximums.to_vec(),
        DurationModel::Stochastic => maximums.iter().map(|&t| sample_duration(t, rng)).collect(),
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of iteration `k`: the `(k + 1)`-th output of a SplitMix64 generator
/// started at `seed`.
pub fn iteration_seed(seed: u64, k: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(k.wrapping_add(1))))
}

/// The generator for iteration `k`.
pub fn iteration_rng(seed: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(iteration_seed(seed, k))
}
