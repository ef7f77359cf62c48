//! Binomial and Poisson probabilities and the Gaussian capacity function.
//!
//! Binomial terms with `m <= 60` are evaluated by direct multiplication. For
//! larger `m` the term at the anchor index comes from a saddle-point
//! expansion in log space and the
//! remaining terms follow from the ratio recurrence
//! `f(i+1) / f(i) = (m - i) / (i + 1) * p / (1 - p)`, walking away from the
//! mode so every step shrinks the term.

use crate::channel::Snr;
use crate::error::{Error, Result};

/// Largest `m` evaluated by direct multiplication.
pub const DIRECT_LIMIT: u64 = 60;

/// Largest population accepted by the binomial primitives.
pub const MAX_TRIALS: u64 = 10_000;

/// Relative size below which tail terms stop contributing to a sum.
const TAIL_CUTOFF: f64 = 1e-18;

/// `C(x) = 0.5 * log2(1 + x)`, the capacity of a real Gaussian channel at
/// linear SNR `x`, in bits per channel use.
pub fn awgn_c(x: Snr) -> f64 {
    0.5 * x.get().ln_1p() / std::f64::consts::LN_2
}

/// `ln C(m, k)` as a sum of logs of the ratios `(m - k' + i) / i`.
pub fn ln_choose(m: u64, k: u64) -> f64 {
    debug_assert!(k <= m);
    let k = k.min(m - k);
    let base = (m - k) as f64;
    (1..=k).map(|i| ((base + i as f64) / i as f64).ln()).sum()
}

fn choose_direct(m: u64, k: u64) -> f64 {
    let k = k.min(m - k);
    let base = (m - k) as f64;
    (1..=k).fold(1.0, |acc, i| acc * (base + i as f64) / i as f64)
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("probability {p} outside [0, 1]")))
    }
}

/// Probability of exactly `k` successes in `m` Bernoulli(`p`) trials.
pub fn binom_pmf(m: u64, k: u64, p: f64) -> Result<f64> {
    if k > m {
        return Err(Error::domain(format!("k = {k} exceeds m = {m}")));
    }
    if m > MAX_TRIALS {
        return Err(Error::domain(format!("m = {m} exceeds {MAX_TRIALS}")));
    }
    check_p(p)?;
    Ok(pmf_unchecked(m, k, p))
}

pub(crate) fn pmf_unchecked(m: u64, k: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == m { 1.0 } else { 0.0 };
    }
    if m <= DIRECT_LIMIT {
        choose_direct(m, k) * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)
    } else {
        saddle_point_pmf(m, k, p)
    }
}

/// `ln k! - ((k + 1/2) ln k - k + ln(2π)/2)` for `k = 0..=15`.
const STIRLING_ERR: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258,
    0.041_340_695_955_409_294,
    0.027_677_925_684_998_339,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_192,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_770,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_871,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_530,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

/// Error of Stirling's approximation to `ln n!`.
fn stirling_err(n: u64) -> f64 {
    if n < 16 {
        return STIRLING_ERR[n as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let n = n as f64;
    let nn = n * n;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
}

/// Deviance term `x ln(x / np) + np - x`, by series when `x` is close to `np`.
fn deviance(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// Saddle-point evaluation of the binomial term (Loader, 2000): avoids the
/// cancellation between `ln C(m, k)` and `k ln p + (m - k) ln(1 - p)`.
fn saddle_point_pmf(m: u64, k: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if k == 0 {
        return (m as f64 * (-p).ln_1p()).exp();
    }
    if k == m {
        return (m as f64 * p.ln()).exp();
    }
    let (n, x) = (m as f64, k as f64);
    let lc = stirling_err(m) - stirling_err(k) - stirling_err(m - k) - deviance(x, n * p) - deviance(n - x, n * q);
    let lf = (2.0 * std::f64::consts::PI).ln() + x.ln() + (-x / n).ln_1p();
    (lc - 0.5 * lf).exp()
}

fn mode(m: u64, p: f64) -> u64 {
    (((m + 1) as f64 * p).floor() as u64).min(m)
}

/// Probability of at most `k` successes in `m` Bernoulli(`p`) trials.
///
/// `k = -1` is the empty sum and gives 0; `k >= m` gives 1.
pub fn binom_cdf(m: u64, k: i64, p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p), "p = {p}");
    if k < 0 {
        return 0.0;
    }
    let k = k as u64;
    if k >= m {
        return 1.0;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0;
    }
    if m <= DIRECT_LIMIT {
        return (0..=k).map(|i| pmf_unchecked(m, i, p)).sum::<f64>().min(1.0);
    }
    // Terms decrease monotonically below the mode.
    let anchor = k.min(mode(m, p));
    let mut term = pmf_unchecked(m, anchor, p);
    let mut upper = 0.0;
    // Between anchor and k the terms are past the mode and decreasing.
    let odds = p / (1.0 - p);
    let mut t = term;
    for i in anchor..k {
        t *= (m - i) as f64 / (i + 1) as f64 * odds;
        upper += t;
        if t < TAIL_CUTOFF * upper {
            break;
        }
    }
    let mut sum = term + upper;
    let inv_odds = (1.0 - p) / p;
    let mut i = anchor;
    while i > 0 {
        term *= i as f64 / (m - i + 1) as f64 * inv_odds;
        sum += term;
        if term < TAIL_CUTOFF * sum {
            break;
        }
        i -= 1;
    }
    sum.min(1.0)
}

/// All terms `f(m, 0..=m)` of the Binomial(`m`, `p`) distribution.
pub fn binom_pmf_vec(m: u64, p: f64) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&p));
    let n = m as usize;
    let mut out = vec![0.0; n + 1];
    if p == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p == 1.0 {
        out[n] = 1.0;
        return out;
    }
    if m <= DIRECT_LIMIT {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = pmf_unchecked(m, k as u64, p);
        }
        return out;
    }
    let md = mode(m, p);
    let odds = p / (1.0 - p);
    out[md as usize] = pmf_unchecked(m, md, p);
    for i in md..m {
        let next = out[i as usize] * (m - i) as f64 / (i + 1) as f64 * odds;
        out[i as usize + 1] = next;
    }
    for i in (1..=md).rev() {
        let prev = out[i as usize] * i as f64 / (m - i + 1) as f64 / odds;
        out[i as usize - 1] = prev;
    }
    out
}

/// Running sums of [`binom_pmf_vec`]: entry `k` is `F(m, k)`.
pub fn binom_cdf_vec(m: u64, p: f64) -> Vec<f64> {
    let mut v = binom_pmf_vec(m, p);
    let mut acc = 0.0;
    for x in v.iter_mut() {
        acc += *x;
        *x = acc.min(1.0);
    }
    if let Some(last) = v.last_mut() {
        *last = 1.0;
    }
    v
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Probability of at most `k` events of a Poisson(`lambda`) variable,
/// i.e. the regularized upper incomplete gamma `Γ(k+1, λ) / k!`.
pub fn poisson_cdf(k: u64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda = {lambda} must be finite and >= 0")));
    }
    Ok(poisson_cdf_unchecked(k, lambda))
}

pub(crate) fn poisson_cdf_unchecked(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let anchor = k.min(lambda.floor() as u64);
    let ln_term = anchor as f64 * lambda.ln() - lambda - ln_factorial(anchor);
    let mut term = ln_term.exp();
    let mut t = term;
    let mut sum = term;
    for i in anchor..k {
        t *= lambda / (i + 1) as f64;
        sum += t;
        if t < TAIL_CUTOFF * sum {
            break;
        }
    }
    let mut i = anchor;
    while i > 0 {
        term *= i as f64 / lambda;
        sum += term;
        if term < TAIL_CUTOFF * sum {
            break;
        }
        i -= 1;
    }
    sum.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn snr(x: f64) -> Snr {
        Snr::new(x).unwrap()
    }

    #[test]
    fn pmf_examples() {
        assert_relative_eq!(binom_pmf(2, 1, 0.5).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(binom_pmf(5, 0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(binom_pmf(4, 2, 0.3).unwrap(), 0.2646, max_relative = 1e-13);
    }

    #[test]
    fn pmf_domain_errors() {
        assert!(matches!(binom_pmf(3, 4, 0.5), Err(Error::Domain(_))));
        assert!(matches!(binom_pmf(3, 1, 1.2), Err(Error::Domain(_))));
        assert!(matches!(binom_pmf(20_000, 1, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(binom_cdf(3, 3, 0.7), 1.0);
        assert_eq!(binom_cdf(3, -1, 0.7), 0.0);
        assert_relative_eq!(binom_cdf(3, 1, 0.5), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn poisson_examples() {
        assert_eq!(poisson_cdf(0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(poisson_cdf(0, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-14);
        // mpmath: 0.80884683053805812988...
        assert_relative_eq!(poisson_cdf(2, 1.5).unwrap(), 0.808_846_830_538_058_1, max_relative = 1e-13);
        assert!(poisson_cdf(1, -0.5).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(awgn_c(snr(0.0)), 0.0);
        assert_relative_eq!(awgn_c(snr(1.0)), 0.5, max_relative = 1e-15);
        assert_relative_eq!(awgn_c(snr(3.0)), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn log_space_pmf_matches_exact_product() {
        // C(100, 50) * 2^-100, exact product evaluated with integer steps.
        let mut c = 1.0f64;
        for i in 1..=50u32 {
            c = c * f64::from(50 + i) / f64::from(i);
        }
        let exact = c * 0.5f64.powi(100);
        assert_relative_eq!(binom_pmf(100, 50, 0.5).unwrap(), exact, max_relative = 1e-13);
    }

    #[test]
    fn pmf_vec_agrees_with_pointwise() {
        for &(m, p) in &[(10u64, 0.3), (61, 0.2), (500, 0.77), (1000, 0.01)] {
            let v = binom_pmf_vec(m, p);
            for k in (0..=m).step_by((m as usize / 17).max(1)) {
                let a = v[k as usize];
                let b = pmf_unchecked(m, k, p);
                assert!((a - b).abs() <= 1e-12 * b.max(1e-300) + 1e-300, "m={m} k={k}: {a} vs {b}");
            }
            let total: f64 = v.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_per_user_strictly_decreasing() {
        for &pw in &[0.01, 1.0, 31.6, 1e4] {
            let s = snr(pw);
            let mut prev = f64::INFINITY;
            for k in 1..=64 {
                let v = awgn_c(s.scaled(k as f64)) / k as f64;
                assert!(v < prev, "P={pw} k={k}");
                prev = v;
            }
        }
    }
}
