//! The two-layer hand-drawn instance that is not rainbow connected.
//!
//! Six vertices; vertex 0 is `i` and vertex 5 is `j`. Layer 0 (red) and
//! layer 1 (blue) are stored as edge lists: the drawing lives in its own
//! frame and is not a geometric instance of the unit square.

use crate::document::serialize_labeled;
use crate::graph::MultilayerGraph;

pub const EXAMPLE_SOURCE: usize = 0;
pub const EXAMPLE_TARGET: usize = 5;
pub const EXAMPLE_LABEL: &str = "two-layer-example";

const RED: [(usize, usize); 6] = [(0, 4), (0, 1), (1, 4), (4, 5), (1, 2), (2, 3)];
const BLUE: [(usize, usize); 7] = [(3, 5), (0, 2), (0, 1), (0, 3), (1, 4), (1, 2), (1, 3)];

pub fn two_layer_example() -> MultilayerGraph {
    MultilayerGraph::from_edge_lists(6, &[RED.to_vec(), BLUE.to_vec()])
        .expect("fixture edge lists are valid")
}

/// The fixture as an explicit-edge graph document.
pub fn example_document() -> String {
    serialize_labeled(&two_layer_example(), Some(EXAMPLE_LABEL))
}
