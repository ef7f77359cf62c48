//! Seeded slot simulator.
//!
//! Each slot draws the number of active users `k ~ Binomial(m, p)` and every
//! active user sends one message at rate `r`. The slot delivers `k r` bits
//! if `k r <= cap(k)` and nothing otherwise. Because `cap(j)/j` is
//! nonincreasing, checking the full active set covers every subset.
//!
//! Slots are split into batches. Batch `b` draws from the ChaCha8 stream `b`
//! keyed by the seed and only contributes a histogram of `k`, so the result
//! does not depend on how batches are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelModel, Prob};
use crate::error::{Error, Result};
use crate::numerics::binom_cdf_vec;
use crate::throughput::RatePolicy;

/// Relative slack on the decodability test, absorbing rounding in `k r`.
const DECODE_SLACK: f64 = 1e-12;

pub const DEFAULT_BATCH_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateChoice {
    /// Threshold policy evaluated at the configured `p`.
    Policy(RatePolicy),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotSimConfig {
    pub model: ChannelModel,
    pub m: u32,
    pub p: Prob,
    pub rate: RateChoice,
    pub n_slots: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl SlotSimConfig {
    /// Configuration using the optimal threshold policy for `(model, m)`.
    pub fn with_policy(model: ChannelModel, m: u32, p: Prob, n_slots: u64, seed: u64) -> Result<Self> {
        let policy = RatePolicy::new(model, m)?;
        Ok(SlotSimConfig {
            model,
            m,
            p,
            rate: RateChoice::Policy(policy),
            n_slots,
            seed,
            batch_size: DEFAULT_BATCH_SIZE,
        })
    }

    pub fn with_rate(model: ChannelModel, m: u32, p: Prob, rate: f64, n_slots: u64, seed: u64) -> Self {
        SlotSimConfig { model, m, p, rate: RateChoice::Fixed(rate), n_slots, seed, batch_size: DEFAULT_BATCH_SIZE }
    }

    /// Per-user rate used in every slot.
    pub fn effective_rate(&self) -> f64 {
        match &self.rate {
            RateChoice::Policy(policy) => policy.rate(self.p),
            RateChoice::Fixed(r) => *r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    /// Mean delivered bits per slot.
    pub empirical_sum_rate: f64,
    /// Fraction of slots with at least one active user that decoded nothing.
    pub collision_fraction: f64,
    /// Standard error of `empirical_sum_rate`.
    pub std_error: f64,
    pub n_slots: u64,
    pub seed: u64,
    pub rate: f64,
    /// Slots per active-user count `k = 0..=m`.
    pub histogram: Vec<u64>,
}

fn run_batch(cdf: &[f64], seed: u64, batch: u64, slots: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let mut hist = vec![0u64; cdf.len()];
    for _ in 0..slots {
        let u: f64 = rng.random();
        // Smallest k with u < F(k); the last entry is exactly 1.
        let k = cdf.partition_point(|&c| c <= u);
        hist[k] += 1;
    }
    hist
}

/// Runs the configured number of slots.
pub fn simulate(config: &SlotSimConfig) -> Result<SimReport> {
    if config.n_slots == 0 {
        return Err(Error::domain("n_slots must be at least 1"));
    }
    if config.batch_size == 0 {
        return Err(Error::domain("batch_size must be at least 1"));
    }
    if config.m == 0 {
        return Err(Error::domain("m must be at least 1"));
    }
    if let RateChoice::Policy(policy) = &config.rate {
        if policy.m != config.m || policy.model != config.model {
            return Err(Error::domain("policy does not match the configured channel"));
        }
    }
    let rate = config.effective_rate();
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!("rate {rate} must be finite and > 0")));
    }
    let cdf = binom_cdf_vec(u64::from(config.m), config.p.get());
    let n_batches = config.n_slots.div_ceil(config.batch_size);
    let histogram = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let start = b * config.batch_size;
            let slots = config.batch_size.min(config.n_slots - start);
            run_batch(&cdf, config.seed, b, slots)
        })
        .reduce(
            || vec![0u64; cdf.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(summarize(&config.model, rate, histogram, config.n_slots, config.seed))
}

fn summarize(model: &ChannelModel, rate: f64, histogram: Vec<u64>, n_slots: u64, seed: u64) -> SimReport {
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let (mut active, mut failed) = (0u64, 0u64);
    for (k, &count) in histogram.iter().enumerate().skip(1) {
        active += count;
        let load = k as f64 * rate;
        if load <= model.sum_capacity(k as u32) * (1.0 + DECODE_SLACK) {
            sum += count as f64 * load;
            sum_sq += count as f64 * load * load;
        } else {
            failed += count;
        }
    }
    let n = n_slots as f64;
    let mean = sum / n;
    let std_error = if n_slots > 1 {
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let collision_fraction = if active == 0 { 0.0 } else { failed as f64 / active as f64 };
    SimReport { empirical_sum_rate: mean, collision_fraction, std_error, n_slots, seed, rate, histogram }
}

/// Slotted ALOHA: rate one, success only when a single user is active.
pub fn simulate_aloha(m: u32, p: Prob, n_slots: u64, seed: u64) -> Result<SimReport> {
    simulate(&SlotSimConfig::with_rate(ChannelModel::Bd, m, p, 1.0, n_slots, seed))
}

/// SplitMix64 step applied to `master + (index + 1) * γ`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs every configuration with its seed replaced by
/// `derive_seed(master_seed, index)`.
pub fn sweep(configs: &[SlotSimConfig], master_seed: u64) -> Result<Vec<SimReport>> {
    configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = c.clone();
            c.seed = derive_seed(master_seed, i as u64);
            simulate(&c)
        })
        .collect()
}
