use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::pair_adjacency_probability;
use crate::graph::{GraphParams, MultilayerGraph};
use crate::rng::StreamKey;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallTrial {
    pub trial: u64,
    pub mean_degree: f64,
    pub min_degree: u64,
    pub max_degree: u64,
}

/// Degree statistics of single-layer graphs `G(n, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallStats {
    pub n: usize,
    pub r: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    /// `π n r² / 4`.
    pub lower_bound: f64,
    /// `π n r²`.
    pub upper_bound: f64,
    /// `(n − 1) · P(two uniform points are within r)`.
    pub predicted_mean: f64,
    /// Fraction of vertices with `|Z_v − mean| > mean / 2`.
    pub violation_rate: f64,
    /// `2 e^{−mean/12}`.
    pub concentration_bound: f64,
    pub per_trial: Vec<BallTrial>,
}

/// Trial `t` draws its graph from `(seed, t)`.
pub fn ball_statistics_experiment(n: usize, r: f64, trials: u64, seed: u64) -> Result<BallStats> {
    let params = GraphParams::new(n, r, 1)?;
    if trials == 0 || n == 0 {
        return Err(Error::Config(
            "ball statistics need trials >= 1 and n >= 1".into(),
        ));
    }
    let base = StreamKey::new(seed);
    // Per-trial degree histograms, merged in trial order.
    let histograms: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = MultilayerGraph::generate_with_key(params, &base.child(t))?;
            let mut hist = vec![0u64; n];
            for v in 0..n {
                hist[g.layer(0).neighbors(v).len()] += 1;
            }
            Ok(hist)
        })
        .collect::<Result<_>>()?;

    let mut total = vec![0u64; n];
    let mut per_trial = Vec::with_capacity(histograms.len());
    for (t, hist) in histograms.iter().enumerate() {
        let sum: u64 = hist.iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
        let nonzero = || {
            hist.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(d, _)| d as u64)
        };
        per_trial.push(BallTrial {
            trial: t as u64,
            mean_degree: sum as f64 / n as f64,
            min_degree: nonzero().next().unwrap_or(0),
            max_degree: nonzero().next_back().unwrap_or(0),
        });
        for (acc, &c) in total.iter_mut().zip(hist) {
            *acc += c;
        }
    }
    let samples = (n as u64 * trials) as f64;
    let mean = total
        .iter()
        .enumerate()
        .map(|(d, &c)| d as f64 * c as f64)
        .sum::<f64>()
        / samples;
    let violations: u64 = total
        .iter()
        .enumerate()
        .filter(|(d, _)| (*d as f64 - mean).abs() > 0.5 * mean)
        .map(|(_, &c)| c)
        .sum();
    let area = PI * n as f64 * r * r;
    Ok(BallStats {
        n,
        r,
        trials,
        seed,
        mean,
        lower_bound: area / 4.0,
        upper_bound: area,
        predicted_mean: (n - 1) as f64 * pair_adjacency_probability(r)?,
        violation_rate: violations as f64 / samples,
        concentration_bound: 2.0 * (-mean / 12.0).exp(),
        per_trial,
    })
}
