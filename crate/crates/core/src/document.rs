//! JSON graph documents.
//!
//! Geometric graphs store `(n, r, h)`, optional seed provenance and the
//! position assignment; adjacency is recomputed on load and checked
//! against the stored per-layer edge counts. Explicit graphs store edge
//! lists instead of positions and radius.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{Embedding, MultilayerGraph, PositionAssignment};

pub const DOCUMENT_VERSION: u32 = 1;

/// 17 significant digits; exact round trip for every finite `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_f64(x)).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    version: u32,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<Box<RawValue>>,
    h: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<Vec<[Box<RawValue>; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    layer_edges: Option<Vec<Vec<[usize; 2]>>>,
    layer_edge_counts: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentIn {
    version: u32,
    n: usize,
    r: Option<f64>,
    h: usize,
    seed: Option<u64>,
    #[allow(dead_code)]
    label: Option<String>,
    positions: Option<Vec<Vec<[f64; 2]>>>,
    layer_edges: Option<Vec<Vec<[usize; 2]>>>,
    layer_edge_counts: Vec<u64>,
}

pub fn serialize(g: &MultilayerGraph) -> String {
    serialize_labeled(g, None)
}

/// Serializes `g`, tagging the document with a free-form label.
pub fn serialize_labeled(g: &MultilayerGraph, label: Option<&str>) -> String {
    let (r, positions, layer_edges) = match g.embedding() {
        Embedding::Geometric { positions, r } => {
            let rows = (0..g.n())
                .map(|i| {
                    positions
                        .vertex(i)
                        .iter()
                        .map(|p| [raw(p.x), raw(p.y)])
                        .collect()
                })
                .collect();
            (Some(raw(*r)), Some(rows), None)
        }
        Embedding::Explicit => {
            let edges = g
                .layers()
                .iter()
                .map(|layer| {
                    layer
                        .lists()
                        .iter()
                        .enumerate()
                        .flat_map(|(u, list)| {
                            list.iter()
                                .filter(move |&&v| (v as usize) > u)
                                .map(move |&v| [u, v as usize])
                        })
                        .collect()
                })
                .collect();
            (None, None, Some(edges))
        }
    };
    let doc = DocumentOut {
        version: DOCUMENT_VERSION,
        n: g.n(),
        r,
        h: g.h(),
        seed: g.seed(),
        label,
        positions,
        layer_edges,
        layer_edge_counts: g.layer_edge_counts(),
    };
    serde_json::to_string_pretty(&doc).expect("document serialization is infallible")
}

pub fn deserialize(text: &str) -> Result<MultilayerGraph> {
    let doc: DocumentIn = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
    if doc.version != DOCUMENT_VERSION {
        return Err(Error::Document(format!(
            "unsupported version {} (expected {DOCUMENT_VERSION})",
            doc.version
        )));
    }
    if doc.layer_edge_counts.len() != doc.h {
        return Err(Error::Document(format!(
            "layer_edge_counts has {} entries for h = {}",
            doc.layer_edge_counts.len(),
            doc.h
        )));
    }
    let g = match (doc.r, doc.positions, doc.layer_edges) {
        (Some(r), Some(rows), None) => {
            if rows.len() != doc.n {
                return Err(Error::Document(format!(
                    "positions lists {} vertices, n = {}",
                    rows.len(),
                    doc.n
                )));
            }
            let mut points = Vec::with_capacity(doc.n * doc.h);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != doc.h {
                    return Err(Error::Document(format!(
                        "vertex {i} has {} positions, h = {}",
                        row.len(),
                        doc.h
                    )));
                }
                for &[x, y] in row {
                    points.push(Point::new(x, y).map_err(|e| Error::Document(e.to_string()))?);
                }
            }
            let positions = PositionAssignment::new(doc.n, doc.h, points)?;
            MultilayerGraph::from_assignment(positions, r)?
        }
        (None, None, Some(edges)) => {
            if edges.len() != doc.h {
                return Err(Error::Document(format!(
                    "layer_edges has {} layers, h = {}",
                    edges.len(),
                    doc.h
                )));
            }
            let edges: Vec<Vec<(usize, usize)>> = edges
                .into_iter()
                .map(|l| l.into_iter().map(|[u, v]| (u, v)).collect())
                .collect();
            MultilayerGraph::from_edge_lists(doc.n, &edges)?
        }
        _ => {
            return Err(Error::Document(
                "a document carries either r and positions, or layer_edges".into(),
            ))
        }
    };
    for (layer, (&stored, recomputed)) in doc
        .layer_edge_counts
        .iter()
        .zip(g.layer_edge_counts())
        .enumerate()
    {
        if stored != recomputed {
            return Err(Error::Checksum {
                layer,
                stored,
                recomputed,
            });
        }
    }
    Ok(g.with_seed(doc.seed))
}
