//! Rainbow reachability over color subsets.
//!
//! For a source `u`, `R(∅) = {u}` and `R(S) = ⋃_{c ∈ S} Γ_c(R(S \ {c}))`,
//! where `Γ_c` is the neighborhood union in layer `c`. `R(S)` holds the
//! endpoints of walks from `u` that use every color of `S` exactly once.
//! A color-distinct walk always contains a color-distinct simple path
//! between its endpoints (cutting out a cycle only drops edges), so the
//! union over all `S` is exactly the set of vertices joined to `u` by a
//! rainbow path.

use rayon::prelude::*;

use crate::bitset::{
    count_words, intersects, iter_words, or_into, set_bit, test_bit, words_for, BitMatrix, BitSet,
};
use crate::error::{Error, Result};
use crate::graph::{LayerAdjacency, MultilayerGraph};

/// A level is pulled rather than pushed once its source set holds at
/// least `n / PULL_FACTOR` vertices.
const PULL_FACTOR: usize = 8;

/// Default cap on the DP table, `n · 2^h` bits.
pub const DEFAULT_DP_BUDGET_BITS: u128 = 1 << 31;

/// Largest `n` accepted by [`brute_force_rainbow_reachable`].
pub const BRUTE_FORCE_MAX_N: usize = 12;

/// A subset of layer indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ColorSet(u32);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    pub fn full(h: usize) -> Self {
        Self(((1u64 << h) - 1) as u32)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, c: usize) -> bool {
        self.0 >> c & 1 == 1
    }

    pub fn with(self, c: usize) -> Self {
        Self(self.0 | 1 << c)
    }

    pub fn without(self, c: usize) -> Self {
        Self(self.0 & !(1 << c))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(c)
        })
    }
}

/// An ordering of the layers `0..h`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorPermutation(Vec<usize>);

impl ColorPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let h = order.len();
        let mut seen = vec![false; h];
        for &c in &order {
            if c >= h || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidInput(format!(
                    "{order:?} is not a permutation of 0..{h}"
                )));
            }
        }
        Ok(Self(order))
    }

    pub fn identity(h: usize) -> Self {
        Self((0..h).collect())
    }

    /// `reversed()[i] = self[h - 1 - i]`.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// All `h!` orderings in lexicographic order.
    pub fn all(h: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = Self::identity(h).0;
        loop {
            out.push(Self(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..h).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..h).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl std::fmt::Display for ColorPermutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

/// Outcome of a full rainbow-connectivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RainbowReport {
    pub connected: bool,
    /// Unordered pairs not joined by any rainbow path.
    pub unconnected_pairs: u64,
    /// For each vertex, how many other vertices it cannot reach.
    pub per_source_unconnected: Vec<u64>,
    /// Smallest source with a failure, paired with its smallest unreachable vertex.
    pub first_failure: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPath {
    pub vertices: Vec<usize>,
    /// `colors[i]` is the layer of the edge `vertices[i] -- vertices[i + 1]`.
    pub colors: Vec<usize>,
}

impl WitnessPath {
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Checks endpoints, distinct vertices, distinct colors and that every
    /// edge exists in its stated layer.
    pub fn validate(&self, g: &MultilayerGraph, u: usize, v: usize) -> Result<(), String> {
        if self.vertices.first() != Some(&u) || self.vertices.last() != Some(&v) {
            return Err(format!(
                "endpoints {:?} do not match ({u}, {v})",
                self.vertices
            ));
        }
        if self.colors.len() + 1 != self.vertices.len() {
            return Err("color count must be one less than vertex count".into());
        }
        if self.colors.len() > g.h() {
            return Err(format!(
                "path of length {} exceeds h = {}",
                self.colors.len(),
                g.h()
            ));
        }
        let mut seen = vec![false; g.n()];
        for &x in &self.vertices {
            if x >= g.n() || std::mem::replace(&mut seen[x], true) {
                return Err(format!("vertex {x} repeated or out of range"));
            }
        }
        let mut used = ColorSet::EMPTY;
        for (i, &c) in self.colors.iter().enumerate() {
            if c >= g.h() || used.contains(c) {
                return Err(format!("color {c} repeated or out of range"));
            }
            used = used.with(c);
            let (a, b) = (self.vertices[i], self.vertices[i + 1]);
            if !g.layer(c).contains_edge(a, b) {
                return Err(format!("no edge {a} -- {b} in layer {c}"));
            }
        }
        Ok(())
    }
}

/// Sizes of the `σ`-ordered rainbow frontiers around a source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionProfile {
    pub source: usize,
    pub sigma: ColorPermutation,
    /// `sizes[ℓ]` for `ℓ = 0..=h`; `sizes[0] = 1`.
    pub sizes: Vec<usize>,
}

enum Adjacency<'g> {
    Rows(&'g [BitMatrix]),
    Lists(&'g [LayerAdjacency]),
}

impl Adjacency<'_> {
    /// `dst ∪= Γ_c(src)`.
    fn push(&self, c: usize, src: &[u64], dst: &mut [u64]) {
        match self {
            Adjacency::Rows(rows) => {
                for w in iter_words(src) {
                    or_into(dst, rows[c].row(w));
                }
            }
            Adjacency::Lists(lists) => {
                for w in iter_words(src) {
                    for &x in lists[c].neighbors(w) {
                        set_bit(dst, x as usize);
                    }
                }
            }
        }
    }

    /// Whether `v` has a layer-`c` neighbor in `src`.
    #[inline]
    fn hits(&self, c: usize, v: usize, src: &[u64]) -> bool {
        match self {
            Adjacency::Rows(rows) => intersects(rows[c].row(v), src),
            Adjacency::Lists(lists) => lists[c]
                .neighbors(v)
                .iter()
                .any(|&x| test_bit(src, x as usize)),
        }
    }
}

/// Reusable scratch for the subset DP on one graph.
pub struct RainbowEngine<'g> {
    g: &'g MultilayerGraph,
    adjacency: Adjacency<'g>,
    words: usize,
    table: Vec<u64>,
    reach: Vec<u64>,
}

/// Source-level result of a DP run.
enum Coverage {
    /// Every vertex reached.
    Full,
    /// `v` is the smallest vertex not reached.
    Missing(usize),
}

impl<'g> RainbowEngine<'g> {
    pub fn new(g: &'g MultilayerGraph) -> Result<Self> {
        Self::with_budget(g, DEFAULT_DP_BUDGET_BITS)
    }

    pub fn with_budget(g: &'g MultilayerGraph, budget_bits: u128) -> Result<Self> {
        let needed = dp_table_bits(g.n(), g.h());
        if needed > budget_bits {
            return Err(Error::Budget {
                needed,
                budget: budget_bits,
            });
        }
        let words = words_for(g.n());
        let adjacency = match g.dense_rows() {
            Some(rows) => Adjacency::Rows(rows),
            None => Adjacency::Lists(g.layers()),
        };
        Ok(Self {
            g,
            adjacency,
            words,
            table: vec![0; (1usize << g.h()) * words],
            reach: vec![0; words],
        })
    }

    fn slot(&self, mask: usize) -> &[u64] {
        &self.table[mask * self.words..(mask + 1) * self.words]
    }

    /// Fills `R(S)` for every mask except the full one when `skip_full`.
    fn fill(&mut self, u: usize, skip_full: bool) {
        let w = self.words;
        let n = self.g.n();
        let full = (1usize << self.g.h()) - 1;
        self.table.fill(0);
        set_bit(&mut self.table[..w], u);
        self.reach.fill(0);
        set_bit(&mut self.reach, u);
        for mask in 1..=full {
            if skip_full && mask == full {
                break;
            }
            let (lo, hi) = self.table.split_at_mut(mask * w);
            let dst = &mut hi[..w];
            for c in ColorSet::from_mask(mask as u32).iter() {
                let prev = mask ^ (1 << c);
                let src = &lo[prev * w..(prev + 1) * w];
                let size = count_words(src);
                if size == 0 {
                    continue;
                }
                if size * PULL_FACTOR >= n {
                    for v in 0..n {
                        if !test_bit(dst, v) && self.adjacency.hits(c, v, src) {
                            set_bit(dst, v);
                        }
                    }
                } else {
                    self.adjacency.push(c, src, dst);
                }
            }
            or_into(&mut self.reach, dst);
        }
    }

    /// Adds the small-source part of `R(full)` to the reach by pushing and
    /// returns the colors left for per-vertex pulls.
    fn push_top_level(&mut self) -> ColorSet {
        let (h, n, w) = (self.g.h(), self.g.n(), self.words);
        let full = (1usize << h) - 1;
        let mut pending = ColorSet::EMPTY;
        let mut top = std::mem::take(&mut self.reach);
        for c in 0..h {
            let prev = full ^ (1 << c);
            let src = &self.table[prev * w..(prev + 1) * w];
            let size = count_words(src);
            if size == 0 {
                continue;
            }
            if size * PULL_FACTOR >= n {
                pending = pending.with(c);
            } else {
                self.adjacency.push(c, src, &mut top);
            }
        }
        self.reach = top;
        pending
    }

    /// Whether `v` has a `c`-neighbor in `R(full \ {c})` for some pending `c`.
    fn in_top_level(&self, v: usize, pending: ColorSet) -> bool {
        let full = (1usize << self.g.h()) - 1;
        pending
            .iter()
            .any(|c| self.adjacency.hits(c, v, self.slot(full ^ (1 << c))))
    }

    /// Counts vertices outside the rainbow reach of `u`; with `stop_early`
    /// returns as soon as one is found and only scans `v > u`, since pairs
    /// with smaller `v` were settled when `v` was the source.
    fn coverage(&mut self, u: usize, stop_early: bool) -> (Coverage, u64) {
        self.fill(u, true);
        let pending = self.push_top_level();
        let mut missing = 0u64;
        let mut first = None;
        let start = if stop_early { u + 1 } else { 0 };
        for v in start..self.g.n() {
            if test_bit(&self.reach, v) || self.in_top_level(v, pending) {
                continue;
            }
            missing += 1;
            first.get_or_insert(v);
            if stop_early {
                break;
            }
        }
        match first {
            None => (Coverage::Full, 0),
            Some(v) => (Coverage::Missing(v), missing),
        }
    }

    /// Vertices joined to `u` by a rainbow path, `u` included.
    pub fn reachable(&mut self, u: usize) -> Result<BitSet> {
        self.g.check_vertex(u)?;
        self.fill(u, false);
        Ok(BitSet::from_words(self.g.n(), &self.reach))
    }

    /// Shortest rainbow path from `u` to `v`, if any.
    pub fn witness(&mut self, u: usize, v: usize) -> Result<Option<WitnessPath>> {
        self.g.check_vertex(u)?;
        self.g.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidInput(format!(
                "witness endpoints must differ, got ({u}, {v})"
            )));
        }
        self.fill(u, false);
        let h = self.g.h();
        // Fewest colors first, then smallest mask value.
        let mut masks: Vec<usize> = (1..1usize << h).collect();
        masks.sort_by_key(|&m| (m.count_ones(), m));
        let Some(mut mask) = masks.into_iter().find(|&m| test_bit(self.slot(m), v)) else {
            return Ok(None);
        };
        let mut vertices = vec![v];
        let mut colors = Vec::new();
        let mut current = v;
        while mask != 0 {
            let (w, c) = ColorSet::from_mask(mask as u32)
                .iter()
                .filter_map(|c| {
                    let prev = self.slot(mask ^ (1 << c));
                    self.g
                        .layer(c)
                        .neighbors(current)
                        .iter()
                        .map(|&x| x as usize)
                        .find(|&x| test_bit(prev, x))
                        .map(|x| (x, c))
                })
                .min()
                .expect("DP table is consistent");
            vertices.push(w);
            colors.push(c);
            current = w;
            mask ^= 1 << c;
        }
        vertices.reverse();
        colors.reverse();
        Ok(Some(WitnessPath { vertices, colors }))
    }
}

/// Bits of subset-DP table for `n` vertices and `h` colors.
pub fn dp_table_bits(n: usize, h: usize) -> u128 {
    (n as u128) << h
}

/// Sorted vertices joined to `u` by a rainbow path (including `u`).
pub fn rainbow_reachable(g: &MultilayerGraph, u: usize) -> Result<Vec<usize>> {
    Ok(RainbowEngine::new(g)?.reachable(u)?.to_vec())
}

pub fn rainbow_witness(g: &MultilayerGraph, u: usize, v: usize) -> Result<Option<WitnessPath>> {
    RainbowEngine::new(g)?.witness(u, v)
}

/// First failing pair in ascending source order, or `None` when `g` is
/// rainbow connected. Stops at the first failure.
pub fn rainbow_verdict(g: &MultilayerGraph) -> Result<Option<(usize, usize)>> {
    rainbow_verdict_with_budget(g, DEFAULT_DP_BUDGET_BITS)
}

pub fn rainbow_verdict_with_budget(
    g: &MultilayerGraph,
    budget_bits: u128,
) -> Result<Option<(usize, usize)>> {
    if g.n() <= 1 {
        return Ok(None);
    }
    let mut engine = RainbowEngine::with_budget(g, budget_bits)?;
    for u in 0..g.n() {
        if let (Coverage::Missing(v), _) = engine.coverage(u, true) {
            return Ok(Some((u, v)));
        }
    }
    Ok(None)
}

pub fn is_rainbow_connected(g: &MultilayerGraph) -> Result<bool> {
    Ok(rainbow_verdict(g)?.is_none())
}

/// Full report over all sources, computed in parallel.
pub fn rainbow_report(g: &MultilayerGraph) -> Result<RainbowReport> {
    rainbow_report_with_budget(g, DEFAULT_DP_BUDGET_BITS)
}

pub fn rainbow_report_with_budget(g: &MultilayerGraph, budget_bits: u128) -> Result<RainbowReport> {
    RainbowEngine::with_budget(g, budget_bits)?;
    let per_source: Vec<(u64, Option<usize>)> = (0..g.n())
        .into_par_iter()
        .map_init(
            || RainbowEngine::with_budget(g, budget_bits).expect("budget checked above"),
            |engine, u| match engine.coverage(u, false) {
                (Coverage::Full, _) => (0, None),
                (Coverage::Missing(v), count) => (count, Some(v)),
            },
        )
        .collect();
    let unconnected_pairs = per_source.iter().map(|&(c, _)| c).sum::<u64>() / 2;
    let first_failure = per_source
        .iter()
        .enumerate()
        .find_map(|(u, &(_, v))| v.map(|v| (u, v)));
    Ok(RainbowReport {
        connected: unconnected_pairs == 0,
        unconnected_pairs,
        per_source_unconnected: per_source.into_iter().map(|(c, _)| c).collect(),
        first_failure,
    })
}

/// Layered BFS along `σ`: `F₀ = {u}`, `F_ℓ = Γ_{σ(ℓ)}(F_{ℓ-1})` minus all
/// earlier frontiers.
pub fn sigma_frontiers(
    g: &MultilayerGraph,
    u: usize,
    sigma: &ColorPermutation,
) -> Result<Vec<Vec<usize>>> {
    g.check_vertex(u)?;
    if sigma.len() != g.h() {
        return Err(Error::InvalidInput(format!(
            "permutation {sigma} has length {}, graph has h = {}",
            sigma.len(),
            g.h()
        )));
    }
    let mut seen = vec![false; g.n()];
    seen[u] = true;
    let mut frontiers = vec![vec![u]];
    for &c in sigma.as_slice() {
        let layer = g.layer(c);
        let mut next = Vec::new();
        for &w in frontiers.last().unwrap() {
            for &x in layer.neighbors(w) {
                let x = x as usize;
                if !seen[x] {
                    seen[x] = true;
                    next.push(x);
                }
            }
        }
        next.sort_unstable();
        frontiers.push(next);
    }
    Ok(frontiers)
}

pub fn sigma_neighborhoods(
    g: &MultilayerGraph,
    u: usize,
    sigma: &ColorPermutation,
) -> Result<ExpansionProfile> {
    let sizes = sigma_frontiers(g, u, sigma)?.iter().map(Vec::len).collect();
    Ok(ExpansionProfile {
        source: u,
        sigma: sigma.clone(),
        sizes,
    })
}

/// Exhaustive search over simple paths with distinct colors. Exponential;
/// refuses graphs with more than [`BRUTE_FORCE_MAX_N`] vertices.
pub fn brute_force_rainbow_reachable(g: &MultilayerGraph, u: usize) -> Result<Vec<usize>> {
    if g.n() > BRUTE_FORCE_MAX_N {
        return Err(Error::Budget {
            needed: g.n() as u128,
            budget: BRUTE_FORCE_MAX_N as u128,
        });
    }
    g.check_vertex(u)?;
    fn dfs(
        g: &MultilayerGraph,
        at: usize,
        on_path: &mut [bool],
        used: ColorSet,
        found: &mut [bool],
    ) {
        found[at] = true;
        for c in 0..g.h() {
            if used.contains(c) {
                continue;
            }
            for &x in g.layer(c).neighbors(at) {
                let x = x as usize;
                if !on_path[x] {
                    on_path[x] = true;
                    dfs(g, x, on_path, used.with(c), found);
                    on_path[x] = false;
                }
            }
        }
    }
    let mut on_path = vec![false; g.n()];
    let mut found = vec![false; g.n()];
    on_path[u] = true;
    dfs(g, u, &mut on_path, ColorSet::EMPTY, &mut found);
    Ok((0..g.n()).filter(|&v| found[v]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::{two_layer_example, EXAMPLE_SOURCE, EXAMPLE_TARGET};
    use crate::geometry::Point;
    use crate::graph::{GraphParams, PositionAssignment};

    fn single_layer(n: usize, edges: &[(usize, usize)]) -> MultilayerGraph {
        MultilayerGraph::from_edge_lists(n, &[edges.to_vec()]).unwrap()
    }

    #[test]
    fn single_vertex() {
        let g = single_layer(1, &[]);
        assert_eq!(rainbow_reachable(&g, 0).unwrap(), vec![0]);
        assert!(is_rainbow_connected(&g).unwrap());
        assert_eq!(brute_force_rainbow_reachable(&g, 0).unwrap(), vec![0]);
        let report = rainbow_report(&g).unwrap();
        assert!(report.connected && report.first_failure.is_none());
    }

    #[test]
    fn two_layer_example_reachability() {
        let g = two_layer_example();
        assert_eq!(
            rainbow_reachable(&g, EXAMPLE_SOURCE).unwrap(),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(
            rainbow_verdict(&g).unwrap(),
            Some((EXAMPLE_SOURCE, EXAMPLE_TARGET))
        );
        assert_eq!(
            rainbow_witness(&g, EXAMPLE_SOURCE, EXAMPLE_TARGET).unwrap(),
            None
        );
        assert_eq!(g.ball(0, EXAMPLE_SOURCE).unwrap(), &[1, 4]);
    }

    #[test]
    fn two_layer_example_report_counts() {
        let report = rainbow_report(&two_layer_example()).unwrap();
        assert!(!report.connected);
        assert_eq!(report.first_failure, Some((0, 5)));
        let total: u64 = report.per_source_unconnected.iter().sum();
        assert_eq!(total, 2 * report.unconnected_pairs);
        for u in 0..6 {
            let reach = brute_force_rainbow_reachable(&two_layer_example(), u).unwrap();
            assert_eq!(report.per_source_unconnected[u], (6 - reach.len()) as u64);
        }
    }

    #[test]
    fn two_layer_example_sigma_profiles() {
        let g = two_layer_example();
        let red_blue = ColorPermutation::new(vec![0, 1]).unwrap();
        let blue_red = red_blue.reversed();
        assert_eq!(
            sigma_neighborhoods(&g, 0, &red_blue).unwrap().sizes,
            vec![1, 2, 2]
        );
        assert_eq!(
            sigma_neighborhoods(&g, 0, &blue_red).unwrap().sizes,
            vec![1, 3, 1]
        );
    }

    #[test]
    fn one_layer_needs_completeness() {
        let triangle = single_layer(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(is_rainbow_connected(&triangle).unwrap());
        let path = single_layer(3, &[(0, 1), (1, 2)]);
        assert_eq!(rainbow_verdict(&path).unwrap(), Some((0, 2)));
    }

    #[test]
    fn witness_prefers_direct_edge() {
        let g = MultilayerGraph::from_edge_lists(
            3,
            &[vec![(1, 2)], vec![(0, 1), (0, 2)], vec![(0, 2)]],
        )
        .unwrap();
        let w = rainbow_witness(&g, 0, 2).unwrap().unwrap();
        assert_eq!(w.vertices, vec![0, 2]);
        assert_eq!(w.colors, vec![1]);
        w.validate(&g, 0, 2).unwrap();
        let w = rainbow_witness(&g, 1, 2).unwrap().unwrap();
        assert_eq!(w.colors, vec![0]);
        assert!(rainbow_witness(&g, 1, 1).is_err());
    }

    #[test]
    fn witness_two_hops() {
        let g = two_layer_example();
        let w = rainbow_witness(&g, 0, 3).unwrap().unwrap();
        assert_eq!(
            (w.vertices.clone(), w.colors.clone()),
            (vec![0, 3], vec![1])
        );
        let w = rainbow_witness(&g, 3, 4).unwrap().unwrap();
        w.validate(&g, 3, 4).unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn validator_catches_bad_paths() {
        let g = two_layer_example();
        let bad_color = WitnessPath {
            vertices: vec![0, 1, 2],
            colors: vec![0, 0],
        };
        assert!(bad_color.validate(&g, 0, 2).is_err());
        let missing_edge = WitnessPath {
            vertices: vec![0, 5],
            colors: vec![0],
        };
        assert!(missing_edge.validate(&g, 0, 5).is_err());
        let repeated = WitnessPath {
            vertices: vec![0, 1, 0],
            colors: vec![0, 1],
        };
        assert!(repeated.validate(&g, 0, 0).is_err());
    }

    #[test]
    fn permutations() {
        assert_eq!(ColorPermutation::all(3).len(), 6);
        assert_eq!(
            ColorPermutation::all(1),
            vec![ColorPermutation::identity(1)]
        );
        assert!(ColorPermutation::new(vec![0, 0]).is_err());
        assert!(ColorPermutation::new(vec![1, 2]).is_err());
        let s = ColorPermutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(s.reversed().as_slice(), &[1, 0, 2]);
        assert_eq!(s.reversed().reversed(), s);
        let g = two_layer_example();
        assert!(sigma_neighborhoods(&g, 0, &s).is_err());
    }

    #[test]
    fn one_layer_profile_is_ball() {
        let g =
            MultilayerGraph::generate_random(GraphParams::new(200, 0.1, 1).unwrap(), 1).unwrap();
        let p = sigma_neighborhoods(&g, 17, &ColorPermutation::identity(1)).unwrap();
        assert_eq!(p.sizes, vec![1, g.ball(0, 17).unwrap().len()]);
    }

    #[test]
    fn brute_force_refuses_large_graphs() {
        let g = single_layer(13, &[]);
        assert!(matches!(
            brute_force_rainbow_reachable(&g, 0),
            Err(Error::Budget { .. })
        ));
        let complete: Vec<(usize, usize)> = (0..5)
            .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
            .collect();
        let g = single_layer(5, &complete);
        assert_eq!(
            brute_force_rainbow_reachable(&g, 2).unwrap(),
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn budget_refusal() {
        let g =
            MultilayerGraph::generate_random(GraphParams::new(100, 0.1, 4).unwrap(), 1).unwrap();
        assert!(matches!(
            RainbowEngine::with_budget(&g, 100 * 16 - 1),
            Err(Error::Budget { .. })
        ));
        assert!(RainbowEngine::with_budget(&g, 100 * 16).is_ok());
    }

    #[test]
    fn list_and_row_paths_agree() {
        // n large enough that both push and pull branches run.
        let g =
            MultilayerGraph::generate_random(GraphParams::new(400, 0.08, 3).unwrap(), 12).unwrap();
        let mut engine = RainbowEngine::new(&g).unwrap();
        for u in [0, 57, 399] {
            let rows_reach = engine.reachable(u).unwrap();
            engine.adjacency = Adjacency::Lists(g.layers());
            let list_reach = engine.reachable(u).unwrap();
            engine.adjacency = Adjacency::Rows(g.dense_rows().unwrap());
            assert_eq!(rows_reach, list_reach);
        }
    }

    #[test]
    fn monotone_in_radius() {
        let pos = PositionAssignment::random(60, 2, &crate::rng::StreamKey::new(77));
        let small = MultilayerGraph::from_assignment(pos.clone(), 0.15).unwrap();
        let large = MultilayerGraph::from_assignment(pos, 0.22).unwrap();
        for u in 0..60 {
            let a = rainbow_reachable(&small, u).unwrap();
            let b = rainbow_reachable(&large, u).unwrap();
            assert!(a.iter().all(|v| b.contains(v)));
        }
    }

    #[test]
    fn isolated_vertex_reaches_itself() {
        let pos = PositionAssignment::from_nested(vec![
            vec![Point::new(0.0, 0.0).unwrap()],
            vec![Point::new(1.0, 1.0).unwrap()],
        ])
        .unwrap();
        let g = MultilayerGraph::from_assignment(pos, 0.5).unwrap();
        assert_eq!(rainbow_reachable(&g, 1).unwrap(), vec![1]);
        assert!(rainbow_reachable(&g, 2).is_err());
    }
}
