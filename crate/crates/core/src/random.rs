//! Seeded random inputs for property checks and sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collar_geometry::MetricJet;
use crate::frame_algebra::{symtf, Mat3};
use crate::log_series::MatSeries;

pub const SEED_VAR: &str = "NAHM_SEED";

/// Seed from `NAHM_SEED` when set and parseable, `default` otherwise.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in [−scale, scale].
pub fn matrix(rng: &mut impl Rng, scale: f64) -> Mat3 {
    Mat3::from_fn(|_, _| rng.gen_range(-scale..=scale))
}

pub fn symmetric(rng: &mut impl Rng, scale: f64) -> Mat3 {
    let mut m = Mat3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = rng.gen_range(-scale..=scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn symmetric_trace_free(rng: &mut impl Rng, scale: f64) -> Mat3 {
    symtf(&symmetric(rng, scale))
}

pub fn skew(rng: &mut impl Rng, scale: f64) -> Mat3 {
    let m = matrix(rng, scale);
    (m - m.transpose()) * 0.5
}

/// Jets H₁, …, H_order with symmetric entries in [−scale, scale].
pub fn metric_jet(rng: &mut impl Rng, order: usize, scale: f64) -> MetricJet {
    let mut c = vec![Mat3::identity()];
    c.extend((0..order).map(|_| symmetric(rng, scale)));
    MetricJet::new(c).expect("random jet is valid")
}

/// An SO(3)-valued jet g = exp(X) with g₀ = I, known through `order`. X has
/// terms xᵏ for 1 ≤ k ≤ 3 and, when `logs` is set, an x log x term.
pub fn gauge_jet(rng: &mut impl Rng, order: i32, scale: f64, logs: bool) -> MatSeries {
    let mut x = MatSeries::new(1, order);
    for k in 1..=3.min(order) {
        x.set(k, 0, skew(rng, scale));
    }
    if logs {
        x.set(1, 1, skew(rng, scale));
    }
    x.exp().expect("gauge generator vanishes at the boundary")
}
