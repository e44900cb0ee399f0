use serde::Serialize;

/// Two-sided 95% standard normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub successes: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl ProbabilityEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, WILSON_Z95);
        Self {
            p_hat: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            trials,
            successes,
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 8/10: center 0.7406, half-width 0.1901 (standard tables).
        let (lo, hi) = wilson_interval(8, 10, WILSON_Z95);
        assert!(
            (lo - 0.4902).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4,
            "{lo} {hi}"
        );
    }

    #[test]
    fn wilson_extremes_contain_estimate() {
        for t in [1u64, 7, 200] {
            for s in [0, t / 2, t] {
                let e = ProbabilityEstimate::from_counts(s, t, 0);
                assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
                assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
            }
        }
        let e = ProbabilityEstimate::from_counts(0, 200, 0);
        assert_eq!(e.ci_low, 0.0);
        assert!(e.ci_high > 0.0 && e.ci_high < 0.02);
    }
}
