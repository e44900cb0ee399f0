//! Threshold formulas and seeded Monte Carlo experiments.
//!
//! Every experiment is a pure function of its inputs and master seed.
//! Trials draw from their own substreams and are reduced in trial order,
//! so results do not depend on the rayon worker count.

mod balls;
mod expansion;
mod formulas;
mod montecarlo;
mod occupancy;
mod stats;

pub use balls::{ball_statistics_experiment, BallStats, BallTrial};
pub use expansion::{
    expansion_bounds, expansion_experiment, BoundCheck, ExpansionReport, ExpansionSample,
    PermutationMode, REGIME_RATIO_RANGE,
};
pub use formulas::{
    corollary_layer_bounds, reference_formulas, theorem_constants, theorem_constants_general,
    threshold_radius, ConstantsSource, LayerBounds, LayerCount, ReferenceValues,
    ThresholdConstants,
};
pub use montecarlo::{
    estimate_rainbow_probability, estimate_threshold, estimate_threshold_with_budget,
    estimate_with_key, probability_sweep, trace_monotone_within, NoiseFlag, ThresholdEstimate,
    TracePoint, TraceRole, MIN_TRIALS_PER_POINT, NOISE_HALF_WIDTHS,
};
pub use occupancy::{
    default_deviations, expected_image_size, expected_image_size_exact, occupancy_experiment,
    occupancy_experiment_with, OccupancyStats, TailRow,
};
pub use stats::{wilson_interval, ProbabilityEstimate, WILSON_Z95};
