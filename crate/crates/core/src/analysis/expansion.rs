use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::formulas::threshold_radius;
use crate::error::{Error, Result};
use crate::graph::{GraphParams, MultilayerGraph};
use crate::rainbow::{sigma_neighborhoods, ColorPermutation};
use crate::rng::{StreamKey, SAMPLING_LABEL};

/// Runs with `r / threshold_radius(n, h)` outside this range are labeled
/// out of regime.
pub const REGIME_RATIO_RANGE: (f64, f64) = (0.25, 4.0);

/// `[(π/2)(nr²)^ℓ / 4^ℓ, (3π/2)^ℓ (nr²)^ℓ]`.
pub fn expansion_bounds(n: usize, r: f64, ell: usize) -> (f64, f64) {
    let density = n as f64 * r * r;
    let l = ell as i32;
    let grown = density.powi(l);
    (PI / 2.0 * grown / 4f64.powi(l), (1.5 * PI).powi(l) * grown)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationMode {
    /// Every source is paired with all `h!` permutations.
    All,
    /// Every source is paired with one uniformly random permutation.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub ell: usize,
    pub size: usize,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionSample {
    pub source: usize,
    pub sigma: Vec<usize>,
    pub sizes: Vec<usize>,
    pub checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub r: f64,
    pub h: usize,
    pub seed: u64,
    pub in_regime: bool,
    pub regime_notes: Vec<String>,
    pub samples: Vec<ExpansionSample>,
    /// `(ℓ, fraction of samples within both bounds)` for `ℓ = 1..h-1`.
    pub satisfaction: Vec<(usize, f64)>,
}

fn regime_notes(n: usize, r: f64, h: usize) -> Vec<String> {
    let mut notes = Vec::new();
    if h < 3 {
        notes.push(format!("h = {h} is below 3"));
    }
    if h >= 2 && n >= 2 {
        if let Ok(base) = threshold_radius(n as f64, h) {
            let ratio = r / base;
            let (lo, hi) = REGIME_RATIO_RANGE;
            if !(lo..=hi).contains(&ratio) {
                notes.push(format!("r is {ratio:.3} times the threshold scale"));
            }
        }
    }
    notes
}

/// Graph from `seed`; sources and permutations from the sampling stream
/// of `seed`. Sources are drawn uniformly with replacement.
pub fn expansion_experiment(
    n: usize,
    r: f64,
    h: usize,
    source_samples: usize,
    mode: PermutationMode,
    seed: u64,
) -> Result<ExpansionReport> {
    let params = GraphParams::new(n, r, h)?;
    if n == 0 {
        return Err(Error::Config("expansion needs at least one vertex".into()));
    }
    let key = StreamKey::new(seed);
    let g = MultilayerGraph::generate_with_key(params, &key)?;
    let mut rng = key.child(SAMPLING_LABEL).rng();
    let all = ColorPermutation::all(h);
    let mut queries = Vec::new();
    for _ in 0..source_samples {
        let u = rng.gen_range(0..n);
        match mode {
            PermutationMode::All => queries.extend(all.iter().map(|s| (u, s.clone()))),
            PermutationMode::Sampled => {
                let mut order: Vec<usize> = (0..h).collect();
                order.shuffle(&mut rng);
                queries.push((u, ColorPermutation::new(order)?));
            }
        }
    }

    let samples: Vec<ExpansionSample> = queries
        .par_iter()
        .map(|(u, sigma)| {
            let profile = sigma_neighborhoods(&g, *u, sigma)?;
            let checks = (1..h)
                .map(|ell| {
                    let (lower, upper) = expansion_bounds(n, r, ell);
                    let size = profile.sizes[ell];
                    let s = size as f64;
                    BoundCheck {
                        ell,
                        size,
                        lower,
                        upper,
                        within: lower <= s && s <= upper,
                    }
                })
                .collect();
            Ok(ExpansionSample {
                source: *u,
                sigma: sigma.as_slice().to_vec(),
                sizes: profile.sizes,
                checks,
            })
        })
        .collect::<Result<_>>()?;

    let satisfaction = (1..h)
        .map(|ell| {
            let ok = samples.iter().filter(|s| s.checks[ell - 1].within).count();
            let rate = if samples.is_empty() {
                0.0
            } else {
                ok as f64 / samples.len() as f64
            };
            (ell, rate)
        })
        .collect();
    let notes = regime_notes(n, r, h);
    Ok(ExpansionReport {
        n,
        r,
        h,
        seed,
        in_regime: notes.is_empty(),
        regime_notes: notes,
        samples,
        satisfaction,
    })
}
