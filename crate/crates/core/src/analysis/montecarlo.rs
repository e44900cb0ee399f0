use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::Serialize;

use super::stats::ProbabilityEstimate;
use crate::error::{Error, Result};
use crate::graph::{GraphParams, MultilayerGraph};
use crate::rainbow::{dp_table_bits, rainbow_verdict_with_budget, DEFAULT_DP_BUDGET_BITS};
use crate::rng::StreamKey;

pub const MIN_TRIALS_PER_POINT: u64 = 50;

/// Bracket ends may sit on the wrong side of 1/2 by at most this many
/// Wilson half-widths before the run is flagged as noisy.
pub const NOISE_HALF_WIDTHS: f64 = 3.0;

fn check_budget(params: &GraphParams, budget_bits: u128) -> Result<()> {
    let needed = dp_table_bits(params.n, params.h);
    if needed > budget_bits {
        return Err(Error::Budget {
            needed,
            budget: budget_bits,
        });
    }
    Ok(())
}

/// `trials` graphs, trial `t` drawn from `base.child(t)`; success is a
/// rainbow-connected verdict.
pub fn estimate_with_key(
    params: GraphParams,
    base: &StreamKey,
    trials: u64,
    budget_bits: u128,
) -> Result<ProbabilityEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    check_budget(&params, budget_bits)?;
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = MultilayerGraph::generate_with_key(params, &base.child(t))?;
            Ok(u64::from(
                rainbow_verdict_with_budget(&g, budget_bits)?.is_none(),
            ))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ProbabilityEstimate::from_counts(
        successes,
        trials,
        base.seed(),
    ))
}

pub fn estimate_rainbow_probability(
    n: usize,
    r: f64,
    h: usize,
    trials: u64,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    estimate_with_key(
        GraphParams::new(n, r, h)?,
        &StreamKey::new(seed),
        trials,
        DEFAULT_DP_BUDGET_BITS,
    )
}

/// One estimate per radius, in ascending radius order. Grid point `i`
/// (after sorting) uses the substreams `(seed, i, trial)`.
pub fn probability_sweep(
    n: usize,
    radii: &[f64],
    h: usize,
    trials: u64,
    seed: u64,
    budget_bits: u128,
) -> Result<Vec<(f64, ProbabilityEstimate)>> {
    let mut grid = radii.to_vec();
    if grid.iter().any(|r| r.is_nan()) {
        return Err(Error::Domain("radius grid contains NaN".into()));
    }
    grid.sort_by(f64::total_cmp);
    let base = StreamKey::new(seed);
    grid.iter()
        .enumerate()
        .map(|(i, &r)| {
            let params = GraphParams::new(n, r, h)?;
            Ok((
                r,
                estimate_with_key(params, &base.child(i as u64), trials, budget_bits)?,
            ))
        })
        .collect()
}

/// Checks that estimates sorted by radius never drop by more than
/// `half_widths` times the larger Wilson half-width of two neighbors.
/// Returns the radii of the first offending pair.
pub fn trace_monotone_within(
    points: &[(f64, ProbabilityEstimate)],
    half_widths: f64,
) -> Result<(), (f64, f64)> {
    let mut sorted: Vec<_> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let slack = half_widths * lo.1.half_width().max(hi.1.half_width());
        if hi.1.p_hat < lo.1.p_hat - slack {
            return Err((lo.0, hi.0));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceRole {
    Midpoint,
    LowerCheck,
    UpperCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub r: f64,
    pub role: TraceRole,
    pub estimate: ProbabilityEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseFlag {
    pub r: f64,
    pub p_hat: f64,
    pub half_width: f64,
    pub role: TraceRole,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub r_hat: f64,
    pub bracket: (f64, f64),
    pub trials_per_point: u64,
    pub trace: Vec<TracePoint>,
    /// Set when every radius gives the same answer (fewer than two vertices).
    pub degenerate: bool,
    /// Bracket ends whose fresh re-estimates land on the wrong side of 1/2.
    pub noise: Vec<NoiseFlag>,
}

impl ThresholdEstimate {
    pub fn midpoints(&self) -> Vec<(f64, ProbabilityEstimate)> {
        self.trace
            .iter()
            .filter(|p| p.role == TraceRole::Midpoint)
            .map(|p| (p.r, p.estimate))
            .collect()
    }
}

pub fn estimate_threshold(
    n: usize,
    h: usize,
    trials_per_point: u64,
    r_tolerance: f64,
    seed: u64,
) -> Result<ThresholdEstimate> {
    estimate_threshold_with_budget(
        n,
        h,
        trials_per_point,
        r_tolerance,
        seed,
        DEFAULT_DP_BUDGET_BITS,
    )
}

/// Bisection over `[0, √2]` on the estimated probability crossing 1/2.
/// Iteration `i` draws its trials from `(seed, i, trial)`. After the loop
/// both bracket ends are re-estimated on fresh iterations and checked
/// against [`NOISE_HALF_WIDTHS`].
pub fn estimate_threshold_with_budget(
    n: usize,
    h: usize,
    trials_per_point: u64,
    r_tolerance: f64,
    seed: u64,
    budget_bits: u128,
) -> Result<ThresholdEstimate> {
    if trials_per_point < MIN_TRIALS_PER_POINT {
        return Err(Error::Config(format!(
            "trials per point must be at least {MIN_TRIALS_PER_POINT}, got {trials_per_point}"
        )));
    }
    if r_tolerance.is_nan() || r_tolerance <= 0.0 {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {r_tolerance}"
        )));
    }
    GraphParams::new(n, 0.0, h)?;
    if n <= 1 {
        return Ok(ThresholdEstimate {
            r_hat: 0.0,
            bracket: (0.0, 0.0),
            trials_per_point,
            trace: Vec::new(),
            degenerate: true,
            noise: Vec::new(),
        });
    }
    check_budget(&GraphParams { n, r: 0.0, h }, budget_bits)?;

    let base = StreamKey::new(seed);
    let estimate_at = |iteration: u64, r: f64| {
        estimate_with_key(
            GraphParams::new(n, r, h)?,
            &base.child(iteration),
            trials_per_point,
            budget_bits,
        )
    };
    let (mut lo, mut hi) = (0.0, SQRT_2);
    let mut trace = Vec::new();
    let mut iteration = 0;
    while hi - lo > r_tolerance {
        let mid = 0.5 * (lo + hi);
        let estimate = estimate_at(iteration, mid)?;
        trace.push(TracePoint {
            iteration,
            r: mid,
            role: TraceRole::Midpoint,
            estimate,
        });
        if estimate.p_hat >= 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
        iteration += 1;
    }

    let mut noise = Vec::new();
    for (r, role) in [(lo, TraceRole::LowerCheck), (hi, TraceRole::UpperCheck)] {
        // The initial endpoints are exact: edgeless below, complete above.
        if r == 0.0 || r == SQRT_2 {
            continue;
        }
        let estimate = estimate_at(iteration, r)?;
        iteration += 1;
        let hw = estimate.half_width();
        let wrong_side = match role {
            TraceRole::LowerCheck => estimate.p_hat > 0.5 + NOISE_HALF_WIDTHS * hw,
            _ => estimate.p_hat < 0.5 - NOISE_HALF_WIDTHS * hw,
        };
        if wrong_side {
            noise.push(NoiseFlag {
                r,
                p_hat: estimate.p_hat,
                half_width: hw,
                role,
            });
        }
        trace.push(TracePoint {
            iteration: iteration - 1,
            r,
            role,
            estimate,
        });
    }

    Ok(ThresholdEstimate {
        r_hat: 0.5 * (lo + hi),
        bracket: (lo, hi),
        trials_per_point,
        trace,
        degenerate: false,
        noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pair_adjacency_probability;

    #[test]
    fn trivial_radii() {
        let p = estimate_rainbow_probability(30, SQRT_2, 2, 20, 1).unwrap();
        assert_eq!((p.successes, p.p_hat), (20, 1.0));
        let p = estimate_rainbow_probability(30, 0.0, 2, 20, 1).unwrap();
        assert_eq!(p.successes, 0);
    }

    #[test]
    fn two_vertices_match_pair_probability() {
        let p = estimate_rainbow_probability(2, 0.5, 1, 100_000, 7).unwrap();
        let exact = pair_adjacency_probability(0.5).unwrap();
        assert!((p.p_hat - exact).abs() <= 0.01, "{} vs {exact}", p.p_hat);
        assert!(p.ci_low <= exact && exact <= p.ci_high);
    }

    #[test]
    fn budget_refused_before_work() {
        let params = GraphParams::new(1000, 0.1, 4).unwrap();
        let err = estimate_with_key(params, &StreamKey::new(0), 5, 1000).unwrap_err();
        assert_eq!(
            err,
            Error::Budget {
                needed: 16_000,
                budget: 1000
            }
        );
    }

    #[test]
    fn reproducible_across_pool_sizes() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_rainbow_probability(200, 0.2, 2, 40, 99).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn sweep_sorted_and_keyed_by_position() {
        let rows =
            probability_sweep(50, &[0.5, 0.1, 0.3], 2, 10, 3, DEFAULT_DP_BUDGET_BITS).unwrap();
        let radii: Vec<f64> = rows.iter().map(|r| r.0).collect();
        assert_eq!(radii, vec![0.1, 0.3, 0.5]);
        let again =
            probability_sweep(50, &[0.1, 0.5, 0.3], 2, 10, 3, DEFAULT_DP_BUDGET_BITS).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn monotone_sweep_at_1024() {
        let radii: Vec<f64> = (1..=8).map(|i| 0.05 * i as f64).collect();
        let rows = probability_sweep(1024, &radii, 2, 200, 11, DEFAULT_DP_BUDGET_BITS).unwrap();
        assert_eq!(trace_monotone_within(&rows, 2.0), Ok(()));
        assert_eq!(rows.first().unwrap().1.p_hat, 0.0);
        assert_eq!(rows.last().unwrap().1.p_hat, 1.0);
    }

    #[test]
    fn monotonicity_check_flags_drop() {
        let e = |s| ProbabilityEstimate::from_counts(s, 1000, 0);
        let rows = vec![(0.2, e(900)), (0.1, e(100)), (0.3, e(100))];
        assert_eq!(trace_monotone_within(&rows, 2.0), Err((0.2, 0.3)));
    }

    #[test]
    fn threshold_two_vertices() {
        let t = estimate_threshold(2, 1, 4000, 1e-3, 5).unwrap();
        assert!(t.bracket.1 - t.bracket.0 <= 1e-3);
        assert!(t.bracket.0 <= t.r_hat && t.r_hat <= t.bracket.1);
        // Root of the pair probability at 1/2 is 0.5120.
        assert!((t.r_hat - 0.512).abs() < 0.02, "{}", t.r_hat);
        assert!(t.trace.iter().any(|p| p.role == TraceRole::LowerCheck));
    }

    #[test]
    fn threshold_degenerate_and_preconditions() {
        let t = estimate_threshold(1, 2, 50, 0.01, 0).unwrap();
        assert!(t.degenerate && t.r_hat == 0.0 && t.trace.is_empty());
        assert!(matches!(
            estimate_threshold(10, 2, 49, 0.01, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            estimate_threshold(10, 2, 50, 0.0, 0),
            Err(Error::Config(_))
        ));
    }
}
