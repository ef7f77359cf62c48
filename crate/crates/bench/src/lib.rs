//! Shared inputs for the benchmarks.

use racap_core::channel::Snr;

/// Received SNR of 20 dB.
pub fn snr_20db() -> Snr {
    Snr::from_db(20.0).expect("finite")
}

/// Evenly spaced activity probabilities in `(0, 1]`.
pub fn p_grid(n: usize) -> Vec<f64> {
    racap_core::throughput::uniform_grid(n)
}
