//! Dispatch from a resolved config to the library, plus output files.

use serde_json::{json, Value};

use rgg_rainbow::analysis::{
    ball_statistics_experiment, corollary_layer_bounds, estimate_threshold_with_budget,
    expansion_experiment, occupancy_experiment, probability_sweep, reference_formulas,
    theorem_constants, theorem_constants_general, threshold_radius, trace_monotone_within,
    PermutationMode, ProbabilityEstimate, TraceRole,
};
use rgg_rainbow::rainbow::{rainbow_report_with_budget, RainbowEngine, DEFAULT_DP_BUDGET_BITS};
use rgg_rainbow::{document, fixture, GraphParams, MultilayerGraph};

use crate::config::{ExperimentConfig, Params, PermutationArg};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, ColumnKind, OutputDir, Schema};

pub const DEFAULT_TRIALS_SWEEP: u64 = 200;
pub const DEFAULT_TRIALS_BALLS: u64 = 50;
pub const DEFAULT_TRIALS_OCCUPANCY: u64 = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 0.01;
pub const DEFAULT_SAMPLES: usize = 50;

/// Allowed slack, in Wilson half-widths, when checking sweep monotonicity.
const MONOTONE_HALF_WIDTHS: f64 = 2.0;

/// What a successful command reports on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    /// Extra payload printed before the summary line.
    pub stdout: Option<String>,
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!(
        "missing parameter `{key}` (--{})",
        key.replace('_', "-")
    ))
}

fn require<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| missing(key))
}

fn count(value: Option<f64>, key: &str) -> CliResult<usize> {
    let v = require(value, key)?;
    if !(v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64) {
        return Err(CliError::Config(format!(
            "`{key}` must be a non-negative integer, got {v}"
        )));
    }
    Ok(v as usize)
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    params: Params,
    out: OutputDir,
}

impl Run<'_> {
    fn finish(
        mut self,
        outputs: Value,
        summary: String,
        stdout: Option<String>,
    ) -> CliResult<Outcome> {
        let mut params = self.params.clone();
        params.seed = None;
        params.out_dir = None;
        params.workers = None;
        let mut outputs = outputs;
        let name = format!("{}_summary.json", self.cfg.command);
        let mut files = self.out.written().to_vec();
        files.push(name.clone());
        outputs["files"] = json!(files);
        let doc = json!({
            "experiment": self.cfg.command,
            "params": params,
            "seed": self.cfg.seed,
            "outputs": outputs,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
        text.push('\n');
        self.out.write(&name, text.as_bytes())?;
        Ok(Outcome { summary, stdout })
    }

    fn budget(&self) -> u128 {
        self.params.budget_bits.unwrap_or(DEFAULT_DP_BUDGET_BITS)
    }

    fn graph_params(&self) -> CliResult<GraphParams> {
        let p = &self.params;
        let n = count(p.n, "n")?;
        Ok(GraphParams::new(n, require(p.r, "r")?, require(p.h, "h")?)?)
    }

    fn load_graph(&self) -> CliResult<MultilayerGraph> {
        let p = &self.params;
        let explicit = p.n.is_some() || p.r.is_some() || p.h.is_some();
        let fixture = p.fixture.unwrap_or(false);
        if (fixture || p.input.is_some()) && explicit {
            return Err(CliError::Config(
                "give either --input/--fixture or --n/--r/--h, not both".into(),
            ));
        }
        if fixture && p.input.is_some() {
            return Err(CliError::Config(
                "--input and --fixture are exclusive".into(),
            ));
        }
        if fixture {
            return Ok(fixture::two_layer_example());
        }
        if let Some(path) = &p.input {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            return document::deserialize(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())));
        }
        let params = self.graph_params()?;
        Ok(MultilayerGraph::generate_random(
            params,
            self.cfg.require_seed()?,
        )?)
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let mut params = cfg.params.clone();
    match cfg.command {
        "sweep" | "threshold" => {
            params.trials.get_or_insert(DEFAULT_TRIALS_SWEEP);
        }
        "balls" => {
            params.trials.get_or_insert(DEFAULT_TRIALS_BALLS);
        }
        "occupancy" => {
            params.trials.get_or_insert(DEFAULT_TRIALS_OCCUPANCY);
        }
        _ => {}
    }
    if cfg.command == "threshold" {
        params.tolerance.get_or_insert(DEFAULT_TOLERANCE);
    }
    if cfg.command == "expansion" {
        params.samples.get_or_insert(DEFAULT_SAMPLES);
        params.permutations.get_or_insert(PermutationArg::All);
    }
    let run = Run {
        cfg,
        params,
        out: OutputDir::create(&cfg.out_dir)?,
    };
    match cfg.command {
        "gen" => gen(run),
        "check" => check(run),
        "witness" => witness(run),
        "sweep" => sweep(run),
        "threshold" => threshold(run),
        "expansion" => expansion(run),
        "occupancy" => occupancy(run),
        "balls" => balls(run),
        "formulas" => formulas(run),
        "fixture" => fixture_cmd(run),
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}

fn gen(mut run: Run) -> CliResult<Outcome> {
    let params = run.graph_params()?;
    let seed = run.cfg.require_seed()?;
    let g = MultilayerGraph::generate_random(params, seed)?;
    run.out
        .write("graph.json", document::serialize(&g).as_bytes())?;
    let counts = g.layer_edge_counts();
    let rows: Vec<Vec<Cell>> = counts
        .iter()
        .enumerate()
        .map(|(k, &e)| vec![Cell::UInt(k as u64), Cell::UInt(e)])
        .collect();
    let schema = Schema::new(&[("layer", ColumnKind::UInt), ("edges", ColumnKind::UInt)]);
    run.out.write_csv("gen.csv", &schema, &rows)?;
    let summary = format!(
        "generated G(n={}, r={}, h={}) with layer edge counts {counts:?}",
        params.n, params.r, params.h
    );
    run.finish(json!({ "layer_edge_counts": counts }), summary, None)
}

fn check(mut run: Run) -> CliResult<Outcome> {
    let g = run.load_graph()?;
    let report = rainbow_report_with_budget(&g, run.budget())?;
    let rows: Vec<Vec<Cell>> = report
        .per_source_unconnected
        .iter()
        .enumerate()
        .map(|(u, &c)| vec![Cell::UInt(u as u64), Cell::UInt(c)])
        .collect();
    let schema = Schema::new(&[
        ("source", ColumnKind::UInt),
        ("unreachable", ColumnKind::UInt),
    ]);
    run.out.write_csv("check.csv", &schema, &rows)?;
    let summary = match report.first_failure {
        None => "rainbow connected".to_owned(),
        Some((i, j)) => format!("not rainbow connected; first failure ({i},{j})"),
    };
    let outputs = json!({
        "n": g.n(),
        "h": g.h(),
        "connected": report.connected,
        "unconnected_pairs": report.unconnected_pairs,
        "first_failure": report.first_failure,
    });
    run.finish(outputs, summary, None)
}

fn witness(mut run: Run) -> CliResult<Outcome> {
    let from = require(run.params.from, "from")?;
    let to = require(run.params.to, "to")?;
    let g = run.load_graph()?;
    let path = RainbowEngine::with_budget(&g, run.budget())?.witness(from, to)?;
    let rows: Vec<Vec<Cell>> = path
        .iter()
        .flat_map(|p| {
            p.colors.iter().enumerate().map(|(i, &c)| {
                vec![
                    Cell::UInt(i as u64),
                    Cell::UInt(p.vertices[i] as u64),
                    Cell::UInt(p.vertices[i + 1] as u64),
                    Cell::UInt(c as u64),
                ]
            })
        })
        .collect();
    let schema = Schema::new(&[
        ("step", ColumnKind::UInt),
        ("from", ColumnKind::UInt),
        ("to", ColumnKind::UInt),
        ("color", ColumnKind::UInt),
    ]);
    run.out.write_csv("witness.csv", &schema, &rows)?;
    let summary = match &path {
        Some(p) => format!(
            "rainbow path {from} -> {to}: vertices {:?}, colors {:?}",
            p.vertices, p.colors
        ),
        None => format!("no rainbow path from {from} to {to}"),
    };
    let outputs = json!({
        "found": path.is_some(),
        "vertices": path.as_ref().map(|p| &p.vertices),
        "colors": path.as_ref().map(|p| &p.colors),
    });
    run.finish(outputs, summary, None)
}

fn estimate_schema() -> Vec<(&'static str, ColumnKind)> {
    vec![
        ("r", ColumnKind::Float),
        ("p_hat", ColumnKind::Float),
        ("successes", ColumnKind::UInt),
        ("trials", ColumnKind::UInt),
        ("ci_low", ColumnKind::Float),
        ("ci_high", ColumnKind::Float),
    ]
}

fn estimate_cells(r: f64, e: &ProbabilityEstimate) -> Vec<Cell> {
    vec![
        Cell::Float(r),
        Cell::Float(e.p_hat),
        Cell::UInt(e.successes),
        Cell::UInt(e.trials),
        Cell::Float(e.ci_low),
        Cell::Float(e.ci_high),
    ]
}

/// Column layout of `sweep.csv`.
pub fn sweep_schema() -> Schema {
    Schema::new(&estimate_schema())
}

fn sweep(mut run: Run) -> CliResult<Outcome> {
    let p = &run.params;
    let n = count(p.n, "n")?;
    let h = require(p.h, "h")?;
    let radii = require(p.radii.clone(), "radii")?;
    if radii.is_empty() {
        return Err(CliError::Config("`radii` must not be empty".into()));
    }
    for &r in &radii {
        GraphParams::new(n, r, h)?;
    }
    let trials = require(p.trials, "trials")?;
    let seed = run.cfg.require_seed()?;
    let points = probability_sweep(n, &radii, h, trials, seed, run.budget())?;
    let rows: Vec<Vec<Cell>> = points.iter().map(|(r, e)| estimate_cells(*r, e)).collect();
    run.out.write_csv("sweep.csv", &sweep_schema(), &rows)?;
    let monotone = trace_monotone_within(&points, MONOTONE_HALF_WIDTHS).is_ok();
    let summary = format!(
        "sweep over {} radii: p_hat from {} to {}; monotone within {MONOTONE_HALF_WIDTHS} half-widths: {monotone}",
        points.len(),
        points.first().map_or(0.0, |x| x.1.p_hat),
        points.last().map_or(0.0, |x| x.1.p_hat),
    );
    run.finish(
        json!({ "points": points.len(), "monotone": monotone }),
        summary,
        None,
    )
}

/// Column layout of `threshold.csv`.
pub fn threshold_schema() -> Schema {
    let mut cols = vec![("iteration", ColumnKind::UInt), ("role", ColumnKind::Text)];
    cols.extend(estimate_schema());
    Schema::new(&cols)
}

fn role_name(role: TraceRole) -> &'static str {
    match role {
        TraceRole::Midpoint => "midpoint",
        TraceRole::LowerCheck => "lower_check",
        TraceRole::UpperCheck => "upper_check",
    }
}

fn threshold(mut run: Run) -> CliResult<Outcome> {
    let p = &run.params;
    let n = count(p.n, "n")?;
    let h = require(p.h, "h")?;
    let trials = require(p.trials, "trials")?;
    let tolerance = require(p.tolerance, "tolerance")?;
    let seed = run.cfg.require_seed()?;
    let est = estimate_threshold_with_budget(n, h, trials, tolerance, seed, run.budget())?;
    let rows: Vec<Vec<Cell>> = est
        .trace
        .iter()
        .map(|t| {
            let mut row = vec![
                Cell::UInt(t.iteration),
                Cell::Text(role_name(t.role).into()),
            ];
            row.extend(estimate_cells(t.r, &t.estimate));
            row
        })
        .collect();
    run.out
        .write_csv("threshold.csv", &threshold_schema(), &rows)?;
    let monotone = trace_monotone_within(&est.midpoints(), MONOTONE_HALF_WIDTHS).is_ok();
    let base = if h >= 2 && n >= 2 {
        threshold_radius(n as f64, h).ok()
    } else {
        None
    };
    let summary = format!(
        "r_hat = {} in [{}, {}]{}; noise flags: {}; monotone: {monotone}",
        est.r_hat,
        est.bracket.0,
        est.bracket.1,
        base.map_or(String::new(), |b| format!(
            " ({:.4} x base radius)",
            est.r_hat / b
        )),
        est.noise.len(),
    );
    let outputs = json!({
        "r_hat": est.r_hat,
        "bracket": est.bracket,
        "degenerate": est.degenerate,
        "noise": est.noise,
        "monotone": monotone,
        "base_radius": base,
        "ratio_to_base": base.map(|b| est.r_hat / b),
    });
    run.finish(outputs, summary, None)
}

fn expansion(mut run: Run) -> CliResult<Outcome> {
    let params = run.graph_params()?;
    let samples = require(run.params.samples, "samples")?;
    let mode = match require(run.params.permutations, "permutations")? {
        PermutationArg::All => PermutationMode::All,
        PermutationArg::Sampled => PermutationMode::Sampled,
    };
    let seed = run.cfg.require_seed()?;
    let rep = expansion_experiment(params.n, params.r, params.h, samples, mode, seed)?;
    let mut rows = Vec::new();
    for (i, s) in rep.samples.iter().enumerate() {
        let sigma = s
            .sigma
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("-");
        for c in &s.checks {
            rows.push(vec![
                Cell::UInt(i as u64),
                Cell::UInt(s.source as u64),
                Cell::Text(sigma.clone()),
                Cell::UInt(c.ell as u64),
                Cell::UInt(c.size as u64),
                Cell::Float(c.lower),
                Cell::Float(c.upper),
                Cell::Bool(c.within),
            ]);
        }
    }
    let schema = Schema::new(&[
        ("sample", ColumnKind::UInt),
        ("source", ColumnKind::UInt),
        ("sigma", ColumnKind::Text),
        ("ell", ColumnKind::UInt),
        ("size", ColumnKind::UInt),
        ("lower", ColumnKind::Float),
        ("upper", ColumnKind::Float),
        ("within", ColumnKind::Bool),
    ]);
    run.out.write_csv("expansion.csv", &schema, &rows)?;
    let rates: Vec<String> = rep
        .satisfaction
        .iter()
        .map(|(ell, rate)| format!("ell={ell} {:.1}%", 100.0 * rate))
        .collect();
    let summary = format!(
        "expansion over {} samples{}; within bounds: {}",
        rep.samples.len(),
        if rep.in_regime {
            ""
        } else {
            " (out of regime)"
        },
        if rates.is_empty() {
            "no levels to check".into()
        } else {
            rates.join(", ")
        },
    );
    let outputs = json!({
        "in_regime": rep.in_regime,
        "regime_notes": rep.regime_notes,
        "satisfaction": rep.satisfaction,
    });
    run.finish(outputs, summary, None)
}

fn occupancy(mut run: Run) -> CliResult<Outcome> {
    let m = require(run.params.m, "m")?;
    let k = require(run.params.k, "k")?;
    let trials = require(run.params.trials, "trials")?;
    let seed = run.cfg.require_seed()?;
    let stats = occupancy_experiment(m, k, trials, seed)?;
    let rows: Vec<Vec<Cell>> = stats
        .tails
        .iter()
        .map(|t| {
            vec![
                Cell::Float(t.a),
                Cell::Float(t.tail_frequency),
                Cell::Float(t.standard_error),
                Cell::Float(t.mcdiarmid_bound),
                Cell::Float(t.shifted_tail_frequency),
                Cell::Float(t.shifted_bound),
                Cell::Bool(t.shifted_applicable),
            ]
        })
        .collect();
    let schema = Schema::new(&[
        ("a", ColumnKind::Float),
        ("tail_frequency", ColumnKind::Float),
        ("standard_error", ColumnKind::Float),
        ("mcdiarmid_bound", ColumnKind::Float),
        ("shifted_tail_frequency", ColumnKind::Float),
        ("shifted_bound", ColumnKind::Float),
        ("shifted_applicable", ColumnKind::Bool),
    ]);
    run.out.write_csv("occupancy.csv", &schema, &rows)?;
    let trial_rows: Vec<Vec<Cell>> = stats
        .image_sizes
        .iter()
        .enumerate()
        .map(|(t, &y)| vec![Cell::UInt(t as u64), Cell::UInt(y)])
        .collect();
    let trial_schema = Schema::new(&[
        ("trial", ColumnKind::UInt),
        ("image_size", ColumnKind::UInt),
    ]);
    run.out
        .write_csv("occupancy_trials.csv", &trial_schema, &trial_rows)?;
    let summary = format!(
        "image size over {trials} maps: mean {} vs expected {}",
        stats.empirical_mean, stats.expected
    );
    let outputs = json!({
        "expected": stats.expected,
        "empirical_mean": stats.empirical_mean,
        "max_observed_deviation": stats.max_observed_deviation,
    });
    run.finish(outputs, summary, None)
}

fn balls(mut run: Run) -> CliResult<Outcome> {
    let n = count(run.params.n, "n")?;
    let r = require(run.params.r, "r")?;
    let trials = require(run.params.trials, "trials")?;
    let seed = run.cfg.require_seed()?;
    let stats = ball_statistics_experiment(n, r, trials, seed)?;
    let rows: Vec<Vec<Cell>> = stats
        .per_trial
        .iter()
        .map(|t| {
            vec![
                Cell::UInt(t.trial),
                Cell::Float(t.mean_degree),
                Cell::UInt(t.min_degree),
                Cell::UInt(t.max_degree),
            ]
        })
        .collect();
    let schema = Schema::new(&[
        ("trial", ColumnKind::UInt),
        ("mean_degree", ColumnKind::Float),
        ("min_degree", ColumnKind::UInt),
        ("max_degree", ColumnKind::UInt),
    ]);
    run.out.write_csv("balls.csv", &schema, &rows)?;
    let summary = format!(
        "mean ball size {} (predicted {}, bounds [{}, {}])",
        stats.mean, stats.predicted_mean, stats.lower_bound, stats.upper_bound
    );
    let outputs = json!({
        "mean": stats.mean,
        "predicted_mean": stats.predicted_mean,
        "lower_bound": stats.lower_bound,
        "upper_bound": stats.upper_bound,
        "violation_rate": stats.violation_rate,
        "concentration_bound": stats.concentration_bound,
    });
    run.finish(outputs, summary, None)
}

fn formulas(mut run: Run) -> CliResult<Outcome> {
    let n = require(run.params.n, "n")?;
    let h = require(run.params.h, "h")?;
    let base = threshold_radius(n, h)?;
    let constants = theorem_constants(h)?;
    let general = theorem_constants_general(h)?;
    let mut values = vec![
        ("threshold_radius", base),
        ("b_lower", constants.b_lower),
        ("c_upper", constants.c_upper),
        ("general_b_lower", general.b_lower),
        ("general_c_upper", general.c_upper),
    ];
    let mut outputs = json!({
        "threshold_radius": base,
        "constants": constants,
        "general_constants": general,
    });
    if let Some(r) = run.params.r {
        let reference = reference_formulas(n, r)?;
        values.push(("r_c", reference.r_c));
        values.push(("diameter_estimate", reference.diameter_estimate));
        outputs["reference"] = json!(reference);
        if r < 1.0 {
            outputs["layer_bounds"] = json!(corollary_layer_bounds(n, r)?);
        }
    }
    let rows: Vec<Vec<Cell>> = values
        .iter()
        .map(|(q, v)| vec![Cell::Text((*q).into()), Cell::Float(*v)])
        .collect();
    let schema = Schema::new(&[("quantity", ColumnKind::Text), ("value", ColumnKind::Float)]);
    run.out.write_csv("formulas.csv", &schema, &rows)?;
    let summary = json!({
        "threshold_radius": base,
        "b_lower": constants.b_lower,
        "c_upper": constants.c_upper,
    })
    .to_string();
    run.finish(outputs, summary, None)
}

fn fixture_cmd(mut run: Run) -> CliResult<Outcome> {
    let text = fixture::example_document();
    run.out.write("fixture.json", text.as_bytes())?;
    let summary = format!(
        "two-layer fixture: no rainbow path between {} and {}",
        fixture::EXAMPLE_SOURCE,
        fixture::EXAMPLE_TARGET
    );
    let outputs = json!({ "pair": [fixture::EXAMPLE_SOURCE, fixture::EXAMPLE_TARGET] });
    run.finish(outputs, summary, Some(text))
}
