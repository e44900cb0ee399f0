use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::StreamKey;

/// `E|g([m])|` for a uniform random map `[m] → [k]`: `k(1 − (1 − 1/k)^m)`.
pub fn expected_image_size(m: u64, k: u64) -> Result<f64> {
    if m == 0 || k == 0 {
        return Err(Error::Domain(format!(
            "image size needs m, k >= 1, got m={m}, k={k}"
        )));
    }
    let k = k as f64;
    Ok(-k * (m as f64 * (-1.0 / k).ln_1p()).exp_m1())
}

/// The same expectation as an unreduced fraction
/// `(k^m − (k−1)^m) / k^{m−1}`; `None` if it overflows `u128`.
pub fn expected_image_size_exact(m: u32, k: u64) -> Option<(u128, u128)> {
    if m == 0 || k == 0 {
        return None;
    }
    let k = u128::from(k);
    let num = k.checked_pow(m)?.checked_sub((k - 1).checked_pow(m)?)?;
    Some((num, k.checked_pow(m - 1)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub a: f64,
    /// Fraction of trials with `|Y − E Y| ≥ a`.
    pub tail_frequency: f64,
    pub standard_error: f64,
    /// `2 e^{−2a²/m}`.
    pub mcdiarmid_bound: f64,
    /// Fraction of trials with `|Y − m| > a`.
    pub shifted_tail_frequency: f64,
    /// `2 e^{−2(a − m²/2k)²/m}`, meaningful only when `a > m²/2k`.
    pub shifted_bound: f64,
    pub shifted_applicable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyStats {
    pub m: u64,
    pub k: u64,
    pub expected: f64,
    pub trials: u64,
    pub seed: u64,
    pub empirical_mean: f64,
    pub max_observed_deviation: f64,
    pub tails: Vec<TailRow>,
    /// Image size of every trial, in trial order.
    pub image_sizes: Vec<u64>,
}

fn image_size(m: u64, k: u64, key: &StreamKey) -> u64 {
    let mut rng = key.rng();
    let mut hit = vec![false; k as usize];
    let mut count = 0;
    for _ in 0..m {
        let slot = &mut hit[rng.gen_range(0..k) as usize];
        if !*slot {
            *slot = true;
            count += 1;
        }
    }
    count
}

/// Default deviation grid `{√m, 2√m, 3√m}`.
pub fn default_deviations(m: u64) -> Vec<f64> {
    let s = (m as f64).sqrt();
    vec![s, 2.0 * s, 3.0 * s]
}

/// Trial `t` draws its map from `(seed, t)`.
pub fn occupancy_experiment(m: u64, k: u64, trials: u64, seed: u64) -> Result<OccupancyStats> {
    occupancy_experiment_with(m, k, trials, seed, &default_deviations(m))
}

pub fn occupancy_experiment_with(
    m: u64,
    k: u64,
    trials: u64,
    seed: u64,
    deviations: &[f64],
) -> Result<OccupancyStats> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let expected = expected_image_size(m, k)?;
    let base = StreamKey::new(seed);
    let image_sizes: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| image_size(m, k, &base.child(t)))
        .collect();

    let t = trials as f64;
    let empirical_mean = image_sizes.iter().sum::<u64>() as f64 / t;
    let max_observed_deviation = image_sizes
        .iter()
        .map(|&y| (y as f64 - expected).abs())
        .fold(0.0, f64::max);
    let (mf, kf) = (m as f64, k as f64);
    let shift = mf * mf / (2.0 * kf);
    let tails = deviations
        .iter()
        .map(|&a| {
            let count = image_sizes
                .iter()
                .filter(|&&y| (y as f64 - expected).abs() >= a)
                .count();
            let shifted = image_sizes
                .iter()
                .filter(|&&y| (y as f64 - mf).abs() > a)
                .count();
            let freq = count as f64 / t;
            TailRow {
                a,
                tail_frequency: freq,
                standard_error: (freq * (1.0 - freq) / t).sqrt(),
                mcdiarmid_bound: 2.0 * (-2.0 * a * a / mf).exp(),
                shifted_tail_frequency: shifted as f64 / t,
                shifted_bound: 2.0 * (-2.0 * (a - shift).powi(2) / mf).exp(),
                shifted_applicable: a > shift,
            }
        })
        .collect();
    Ok(OccupancyStats {
        m,
        k,
        expected,
        trials,
        seed,
        empirical_mean,
        max_observed_deviation,
        tails,
        image_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_expectations() {
        assert!((expected_image_size(3, 2).unwrap() - 1.75).abs() < 1e-15);
        assert!((expected_image_size(2, 2).unwrap() - 1.5).abs() < 1e-15);
        for m in [1, 5, 1_000_000] {
            assert_eq!(expected_image_size(m, 1).unwrap(), 1.0);
        }
        assert!((expected_image_size(1000, 1000).unwrap() - 632.3046).abs() < 1e-3);
        assert!(expected_image_size(0, 3).is_err());
    }

    /// Mean image size over all `k^m` maps, by enumeration.
    fn enumerated(m: u32, k: u64) -> num_rational::Ratio<u128> {
        let total = k.pow(m);
        let mut sum = 0u128;
        for code in 0..total {
            let mut seen = 0u64;
            let mut c = code;
            for _ in 0..m {
                seen |= 1 << (c % k);
                c /= k;
            }
            sum += u128::from(seen.count_ones());
        }
        num_rational::Ratio::new(sum, u128::from(total))
    }

    #[test]
    fn exact_matches_enumeration() {
        for m in 1..=6u32 {
            for k in 1..=6u64 {
                let (num, den) = expected_image_size_exact(m, k).unwrap();
                let exact = num_rational::Ratio::new(num, den);
                assert_eq!(exact, enumerated(m, k), "m={m} k={k}");
                let float = expected_image_size(u64::from(m), k).unwrap();
                let target = num as f64 / den as f64;
                assert!(
                    (float - target).abs() <= 4.0 * f64::EPSILON * target,
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn expectation_within_range() {
        for m in 1..40 {
            for k in 1..40 {
                let e = expected_image_size(m, k).unwrap();
                assert!(
                    e >= 1.0 - 1e-12 && e <= m.min(k) as f64 + 1e-12,
                    "m={m} k={k}"
                );
            }
        }
    }

    #[test]
    fn single_point_map() {
        let s = occupancy_experiment(1, 1, 20, 0).unwrap();
        assert_eq!(s.empirical_mean, 1.0);
        assert_eq!(s.max_observed_deviation, 0.0);
    }

    #[test]
    fn thousand_balls_thousand_bins() {
        let s = occupancy_experiment(1000, 1000, 2000, 17).unwrap();
        assert!((s.empirical_mean - 632.30).abs() < 0.01 * 632.30);
        for row in &s.tails {
            assert!(row.tail_frequency <= row.mcdiarmid_bound + 4.0 * row.standard_error);
        }
    }

    #[test]
    fn pool_size_invariant() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| occupancy_experiment(50, 30, 100, 2).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
