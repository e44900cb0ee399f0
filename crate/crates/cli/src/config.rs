//! Command-line flags, the JSON config file, and their merge.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "rgg-rainbow",
    version,
    about = "Rainbow connectivity experiments on multilayered random geometric graphs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// JSON file with parameter values; flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for all output files [default: results]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Master seed; required by every command that samples
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationArg {
    All,
    Sampled,
}

#[derive(Debug, Args, Default)]
pub struct GraphArgs {
    /// Number of vertices
    #[arg(long)]
    pub n: Option<usize>,
    /// Connection radius
    #[arg(long)]
    pub r: Option<f64>,
    /// Number of layers
    #[arg(long)]
    pub h: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct GraphSourceArgs {
    /// Graph document to load instead of generating one
    #[arg(long, value_name = "FILE", conflicts_with = "fixture")]
    pub input: Option<PathBuf>,
    /// Use the bundled two-layer fixture
    #[arg(long)]
    pub fixture: bool,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Cap on the reachability table in bits
    #[arg(long)]
    pub budget_bits: Option<u128>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and write its document
    Gen(GraphArgs),
    /// Decide rainbow connectivity and count unconnected pairs per source
    Check(GraphSourceArgs),
    /// Find a shortest rainbow path between two vertices
    Witness {
        #[command(flatten)]
        source: GraphSourceArgs,
        /// Start vertex
        #[arg(long)]
        from: Option<usize>,
        /// End vertex
        #[arg(long)]
        to: Option<usize>,
    },
    /// Estimate the connectivity probability on a grid of radii
    Sweep {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        /// Comma-separated radii
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        radii: Option<Vec<f64>>,
        /// Graphs per radius [default: 200]
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        budget_bits: Option<u128>,
    },
    /// Locate the radius where the connectivity probability crosses 1/2
    Threshold {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        /// Graphs per bisection point [default: 200]
        #[arg(long)]
        trials: Option<u64>,
        /// Final bracket width [default: 0.01]
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        budget_bits: Option<u128>,
    },
    /// Measure ordered rainbow neighborhood sizes against their bounds
    Expansion {
        #[command(flatten)]
        graph: GraphArgs,
        /// Sampled source vertices [default: 50]
        #[arg(long)]
        samples: Option<usize>,
        /// Color orders per source [default: all]
        #[arg(long, value_enum)]
        permutations: Option<PermutationArg>,
    },
    /// Simulate the image size of random maps [m] -> [k]
    Occupancy {
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        /// Simulated maps [default: 10000]
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Degree statistics of single-layer graphs
    Balls {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<f64>,
        /// Graphs [default: 50]
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Evaluate the closed-form thresholds and constants
    Formulas {
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        h: Option<usize>,
        /// Radius for the layer-count and reference formulas
        #[arg(long)]
        r: Option<f64>,
    },
    /// Print and write the bundled two-layer fixture
    Fixture,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Check(_) => "check",
            Command::Witness { .. } => "witness",
            Command::Sweep { .. } => "sweep",
            Command::Threshold { .. } => "threshold",
            Command::Expansion { .. } => "expansion",
            Command::Occupancy { .. } => "occupancy",
            Command::Balls { .. } => "balls",
            Command::Formulas { .. } => "formulas",
            Command::Fixture => "fixture",
        }
    }

    /// Parameter keys the command reads.
    fn keys(&self) -> &'static [&'static str] {
        const SOURCE: &[&str] = &["input", "fixture", "n", "r", "h", "budget_bits"];
        match self {
            Command::Gen(_) => &["n", "r", "h"],
            Command::Check(_) => SOURCE,
            Command::Witness { .. } => &[
                "input",
                "fixture",
                "n",
                "r",
                "h",
                "budget_bits",
                "from",
                "to",
            ],
            Command::Sweep { .. } => &["n", "h", "radii", "trials", "budget_bits"],
            Command::Threshold { .. } => &["n", "h", "trials", "tolerance", "budget_bits"],
            Command::Expansion { .. } => &["n", "r", "h", "samples", "permutations"],
            Command::Occupancy { .. } => &["m", "k", "trials"],
            Command::Balls { .. } => &["n", "r", "trials"],
            Command::Formulas { .. } => &["n", "h", "r"],
            Command::Fixture => &[],
        }
    }

    fn flag_params(&self) -> Params {
        let mut p = Params::default();
        let graph = |p: &mut Params, g: &GraphArgs| {
            p.n = g.n.map(|v| v as f64);
            p.r = g.r;
            p.h = g.h;
        };
        let source = |p: &mut Params, s: &GraphSourceArgs| {
            p.input = s.input.clone();
            p.fixture = s.fixture.then_some(true);
            graph(p, &s.graph);
            p.budget_bits = s.budget_bits;
        };
        match self {
            Command::Gen(g) => graph(&mut p, g),
            Command::Check(s) => source(&mut p, s),
            Command::Witness {
                source: s,
                from,
                to,
            } => {
                source(&mut p, s);
                p.from = *from;
                p.to = *to;
            }
            Command::Sweep {
                n,
                h,
                radii,
                trials,
                budget_bits,
            } => {
                p.n = n.map(|v| v as f64);
                p.h = *h;
                p.radii = radii.clone();
                p.trials = *trials;
                p.budget_bits = *budget_bits;
            }
            Command::Threshold {
                n,
                h,
                trials,
                tolerance,
                budget_bits,
            } => {
                p.n = n.map(|v| v as f64);
                p.h = *h;
                p.trials = *trials;
                p.tolerance = *tolerance;
                p.budget_bits = *budget_bits;
            }
            Command::Expansion {
                graph: g,
                samples,
                permutations,
            } => {
                graph(&mut p, g);
                p.samples = *samples;
                p.permutations = *permutations;
            }
            Command::Occupancy { m, k, trials } => {
                p.m = *m;
                p.k = *k;
                p.trials = *trials;
            }
            Command::Balls { n, r, trials } => {
                p.n = n.map(|v| v as f64);
                p.r = *r;
                p.trials = *trials;
            }
            Command::Formulas { n, h, r } => {
                p.n = *n;
                p.h = *h;
                p.r = *r;
            }
            Command::Fixture => {}
        }
        p
    }
}

/// Every parameter any command accepts. The config file uses these keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<PermutationArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_bits: Option<u128>,
}

const GLOBAL_KEYS: &[&str] = &["seed", "out_dir", "workers"];

impl Params {
    fn set_keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(map)) => map.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Fills every unset field of `self` from `fallback`.
    fn or(self, fallback: Params) -> Params {
        Params {
            seed: self.seed.or(fallback.seed),
            out_dir: self.out_dir.or(fallback.out_dir),
            workers: self.workers.or(fallback.workers),
            n: self.n.or(fallback.n),
            r: self.r.or(fallback.r),
            h: self.h.or(fallback.h),
            radii: self.radii.or(fallback.radii),
            trials: self.trials.or(fallback.trials),
            samples: self.samples.or(fallback.samples),
            tolerance: self.tolerance.or(fallback.tolerance),
            permutations: self.permutations.or(fallback.permutations),
            m: self.m.or(fallback.m),
            k: self.k.or(fallback.k),
            input: self.input.or(fallback.input),
            fixture: self.fixture.or(fallback.fixture),
            from: self.from.or(fallback.from),
            to: self.to.or(fallback.to),
            budget_bits: self.budget_bits.or(fallback.budget_bits),
        }
    }
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: &'static str,
    /// Required by every command that draws random numbers.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
    pub params: Params,
}

pub const DEFAULT_OUT_DIR: &str = "results";

impl ExperimentConfig {
    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            CliError::Config(format!(
                "`{}` needs a seed: pass --seed or set `seed` in the config",
                self.command
            ))
        })
    }
}

pub fn load_config_file(path: &Path) -> CliResult<Params> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Merges the config file (if any) under the flags and checks that every
/// supplied key applies to the command.
pub fn resolve(cli: &Cli) -> CliResult<ExperimentConfig> {
    let file = match &cli.global.config {
        Some(path) => load_config_file(path)?,
        None => Params::default(),
    };
    let command = &cli.command;
    for key in file.set_keys() {
        if !GLOBAL_KEYS.contains(&key.as_str()) && !command.keys().contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "config key `{key}` does not apply to `{}`",
                command.name()
            )));
        }
    }
    let flags = Params {
        seed: cli.global.seed,
        out_dir: cli.global.out_dir.clone(),
        workers: cli.global.workers,
        ..command.flag_params()
    };
    let params = flags.or(file);
    if params.workers == Some(0) {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    Ok(ExperimentConfig {
        command: command.name(),
        seed: params.seed,
        out_dir: params
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        workers: params.workers,
        params,
    })
}
