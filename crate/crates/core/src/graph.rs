//! Multilayered geometric graphs: `h` geometric layers over a shared vertex
//! set, each layer colored by its index.

use std::sync::OnceLock;

use crate::bitset::BitMatrix;
use crate::error::{Error, Result};
use crate::geometry::{check_radius, sample_positions, GridIndex, Point};
use crate::rng::StreamKey;

/// Upper bound on the number of layers; color masks must fit in a `u32`
/// with room to spare, and the rainbow DP is exponential in `h`.
pub const MAX_LAYERS: usize = 16;

/// Dense adjacency rows are only built up to this many vertices.
pub const DENSE_ROW_MAX_N: usize = 1 << 16;

/// Total size cap (in bits, over all layers) for the dense adjacency rows.
pub const DENSE_ROW_BUDGET_BITS: u128 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub n: usize,
    pub r: f64,
    pub h: usize,
}

impl GraphParams {
    pub fn new(n: usize, r: f64, h: usize) -> Result<Self> {
        let params = Self { n, r, h };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_radius(self.r)?;
        check_layers(self.h)?;
        if self.n > u32::MAX as usize {
            return Err(Error::Config(format!(
                "n = {} exceeds u32 vertex ids",
                self.n
            )));
        }
        Ok(())
    }
}

fn check_layers(h: usize) -> Result<()> {
    if h == 0 || h > MAX_LAYERS {
        return Err(Error::Config(format!(
            "layer count h = {h} must lie in 1..={MAX_LAYERS}"
        )));
    }
    Ok(())
}

/// Per-vertex, per-layer positions, stored vertex-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionAssignment {
    n: usize,
    h: usize,
    points: Vec<Point>,
}

impl PositionAssignment {
    pub fn new(n: usize, h: usize, points: Vec<Point>) -> Result<Self> {
        if points.len() != n * h {
            return Err(Error::Shape(format!(
                "expected {n} x {h} = {} points, got {}",
                n * h,
                points.len()
            )));
        }
        Ok(Self { n, h, points })
    }

    /// `rows[i][k]` is the position of vertex `i` in layer `k`.
    pub fn from_nested(rows: Vec<Vec<Point>>) -> Result<Self> {
        let n = rows.len();
        let h = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != h) {
            return Err(Error::Shape(format!(
                "vertex {i} has {} layer positions, vertex 0 has {h}",
                row.len()
            )));
        }
        Self::new(n, h, rows.into_iter().flatten().collect())
    }

    /// Independent uniform positions; layer `k` draws from `key.child(k)`.
    pub fn random(n: usize, h: usize, key: &StreamKey) -> Self {
        let per_layer: Vec<Vec<Point>> = (0..h)
            .map(|k| sample_positions(n, &mut key.child(k as u64).rng()))
            .collect();
        let mut points = Vec::with_capacity(n * h);
        for i in 0..n {
            for layer in &per_layer {
                points.push(layer[i]);
            }
        }
        Self { n, h, points }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn get(&self, vertex: usize, layer: usize) -> Point {
        self.points[vertex * self.h + layer]
    }

    pub fn vertex(&self, vertex: usize) -> &[Point] {
        &self.points[vertex * self.h..(vertex + 1) * self.h]
    }

    pub fn layer_points(&self, layer: usize) -> Vec<Point> {
        (0..self.n).map(|i| self.get(i, layer)).collect()
    }
}

/// Sorted, symmetric, loop-free adjacency lists of one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerAdjacency {
    lists: Vec<Vec<u32>>,
}

impl LayerAdjacency {
    fn from_index(index: &GridIndex) -> Self {
        // Visiting v in ascending order and appending v to each neighbor's
        // list leaves every list sorted without a sort pass.
        let mut lists = vec![Vec::new(); index.len()];
        let mut scratch = Vec::new();
        for v in 0..index.len() {
            scratch.clear();
            index
                .neighbors_into(v, &mut scratch)
                .expect("indexed vertex");
            for &u in &scratch {
                lists[u].push(v as u32);
            }
        }
        Self { lists }
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.lists
    }

    pub fn edge_count(&self) -> u64 {
        self.lists.iter().map(|l| l.len() as u64).sum::<u64>() / 2
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        self.lists
            .get(u)
            .is_some_and(|l| l.binary_search(&(v as u32)).is_ok())
    }
}

/// How a graph's layers were obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// Layers induced by positions and a common radius.
    Geometric {
        positions: PositionAssignment,
        r: f64,
    },
    /// Layers given directly as edge lists (hand-drawn fixtures).
    Explicit,
}

#[derive(Debug)]
pub struct MultilayerGraph {
    n: usize,
    h: usize,
    embedding: Embedding,
    seed: Option<u64>,
    layers: Vec<LayerAdjacency>,
    rows: OnceLock<Option<Vec<BitMatrix>>>,
}

impl Clone for MultilayerGraph {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            h: self.h,
            embedding: self.embedding.clone(),
            seed: self.seed,
            layers: self.layers.clone(),
            rows: OnceLock::new(),
        }
    }
}

impl PartialEq for MultilayerGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.h == other.h
            && self.seed == other.seed
            && self.embedding == other.embedding
            && self.layers == other.layers
    }
}

impl MultilayerGraph {
    /// `G(n, r, h)` with positions drawn from the substreams of `seed`.
    pub fn generate_random(params: GraphParams, seed: u64) -> Result<Self> {
        let mut g = Self::generate_with_key(params, &StreamKey::new(seed))?;
        g.seed = Some(seed);
        Ok(g)
    }

    /// Like [`generate_random`](Self::generate_random) but drawing layer `k`
    /// from `key.child(k)`. Monte Carlo trials use `(seed, trial)` keys.
    pub fn generate_with_key(params: GraphParams, key: &StreamKey) -> Result<Self> {
        params.validate()?;
        let positions = PositionAssignment::random(params.n, params.h, key);
        Self::from_assignment(positions, params.r)
    }

    /// The deterministic graph `G(n, r, h, b)`.
    pub fn from_assignment(positions: PositionAssignment, r: f64) -> Result<Self> {
        check_radius(r)?;
        check_layers(positions.h())?;
        let layers = (0..positions.h())
            .map(|k| {
                GridIndex::new(positions.layer_points(k), r)
                    .map(|idx| LayerAdjacency::from_index(&idx))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: positions.n(),
            h: positions.h(),
            embedding: Embedding::Geometric { positions, r },
            seed: None,
            layers,
            rows: OnceLock::new(),
        })
    }

    /// A graph given by explicit per-layer edge lists.
    pub fn from_edge_lists(n: usize, layer_edges: &[Vec<(usize, usize)>]) -> Result<Self> {
        let h = layer_edges.len();
        check_layers(h)?;
        let layers = layer_edges
            .iter()
            .enumerate()
            .map(|(k, edges)| {
                let mut lists = vec![Vec::new(); n];
                for &(u, v) in edges {
                    if u >= n || v >= n {
                        return Err(Error::InvalidInput(format!(
                            "edge ({u}, {v}) in layer {k} references a vertex outside 0..{n}"
                        )));
                    }
                    if u == v {
                        return Err(Error::InvalidInput(format!(
                            "self-loop at {u} in layer {k}"
                        )));
                    }
                    lists[u].push(v as u32);
                    lists[v].push(u as u32);
                }
                for list in &mut lists {
                    list.sort_unstable();
                    list.dedup();
                }
                Ok(LayerAdjacency { lists })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            h,
            embedding: Embedding::Explicit,
            seed: None,
            layers,
            rows: OnceLock::new(),
        })
    }

    pub(crate) fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn radius(&self) -> Option<f64> {
        match &self.embedding {
            Embedding::Geometric { r, .. } => Some(*r),
            Embedding::Explicit => None,
        }
    }

    pub fn positions(&self) -> Option<&PositionAssignment> {
        match &self.embedding {
            Embedding::Geometric { positions, .. } => Some(positions),
            Embedding::Explicit => None,
        }
    }

    /// `(n, r, h)` for geometric graphs.
    pub fn params(&self) -> Option<GraphParams> {
        self.radius().map(|r| GraphParams {
            n: self.n,
            r,
            h: self.h,
        })
    }

    pub fn layers(&self) -> &[LayerAdjacency] {
        &self.layers
    }

    pub fn layer(&self, k: usize) -> &LayerAdjacency {
        &self.layers[k]
    }

    pub fn layer_edge_counts(&self) -> Vec<u64> {
        self.layers.iter().map(LayerAdjacency::edge_count).collect()
    }

    /// Total number of colored edges, counting each layer separately.
    pub fn colored_edge_count(&self) -> u64 {
        self.layer_edge_counts().iter().sum()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::InvalidInput(format!(
                "vertex {v} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn check_layer(&self, k: usize) -> Result<()> {
        if k >= self.h {
            return Err(Error::InvalidInput(format!(
                "layer {k} out of range for h = {}",
                self.h
            )));
        }
        Ok(())
    }

    /// The `v`-ball of layer `k`: neighbors of `v` in that layer, sorted.
    pub fn ball(&self, k: usize, v: usize) -> Result<&[u32]> {
        self.check_layer(k)?;
        self.check_vertex(v)?;
        Ok(self.layers[k].neighbors(v))
    }

    /// Dense per-layer rows, built on first use when the size caps allow.
    pub fn dense_rows(&self) -> Option<&[BitMatrix]> {
        self.rows
            .get_or_init(|| {
                let bits = self.h as u128 * (self.n as u128) * (self.n as u128);
                (self.n <= DENSE_ROW_MAX_N && bits <= DENSE_ROW_BUDGET_BITS).then(|| {
                    self.layers
                        .iter()
                        .map(|l| BitMatrix::from_lists(l.lists()))
                        .collect()
                })
            })
            .as_deref()
    }
}
