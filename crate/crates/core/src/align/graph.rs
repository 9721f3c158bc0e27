//! Match graph construction.
//!
//! Vertices are position pairs whose keys match within the vertex threshold.
//! With a zero threshold (the default) vertex generation goes through an
//! inverted index from key to positions, so cost is proportional to the
//! number of matches rather than to `|a| * |b|`. Edges are implicit: `(i, j)`
//! connects to `(i', j')` whenever both coordinates advance by at most
//! `max_gap + 1`, with weight equal to the skipped positions plus the target
//! vertex cost.

use super::{AlignParams, Document, MatchKey};
use crate::error::{Error, Result};
use crate::stem::CostTable;
use std::collections::HashMap;
use std::hash::Hash;

/// A matching position pair and its vertex cost (stem distance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub i: u32,
    pub j: u32,
    pub cost: f32,
}

/// Vertices sorted by `(i, j)`, with the document lengths retained.
#[derive(Clone, Debug)]
pub struct MatchGraph {
    pub vertices: Vec<Vertex>,
    pub len_a: usize,
    pub len_b: usize,
    pub max_gap: usize,
}

impl MatchGraph {
    /// Indices and weights of the edges leaving vertex `idx`. Linear in the
    /// window size; intended for inspection and small cases.
    pub fn edges_from(&self, idx: usize) -> Vec<(usize, f64)> {
        let v = self.vertices[idx];
        let g = self.max_gap as u32;
        let mut out = Vec::new();
        for (t_idx, t) in self.vertices.iter().enumerate().skip(idx + 1) {
            if t.i > v.i + g + 1 {
                break;
            }
            if t.i > v.i && t.j > v.j && t.j <= v.j + g + 1 {
                let gap = (t.i - v.i - 1) + (t.j - v.j - 1);
                out.push((t_idx, gap as f64 + t.cost as f64));
            }
        }
        out
    }
}

/// Build the match graph over the documents' normalized stems.
pub fn build_match_graph(a: &Document, b: &Document, p: &AlignParams) -> Result<MatchGraph> {
    build_match_graph_with(a, b, p, CostTable::shipped())
}

/// [`build_match_graph`] with an explicit cost table for the vertex
/// threshold.
pub fn build_match_graph_with(
    a: &Document,
    b: &Document,
    p: &AlignParams,
    costs: &CostTable,
) -> Result<MatchGraph> {
    p.validate()?;
    if a.is_empty() {
        return Err(Error::EmptyDocument(a.id.clone()));
    }
    if b.is_empty() {
        return Err(Error::EmptyDocument(b.id.clone()));
    }
    let vertices = if p.vertex_threshold == 0.0 {
        vertices_for_keys(&a.keys, &b.keys, p, None::<&fn(&MatchKey, &MatchKey) -> f64>)
    } else {
        let dist = super::stem_cost_fn(costs);
        vertices_for_keys(&a.keys, &b.keys, p, Some(&dist))
    };
    Ok(MatchGraph {
        vertices,
        len_a: a.len(),
        len_b: b.len(),
        max_gap: p.max_gap,
    })
}

/// Generate vertices for arbitrary key streams, sorted by `(i, j)`.
///
/// Without a distance function only exact key equality matches (vertex cost
/// zero). With one, distinct key pairs are compared once and every pair
/// within the threshold is expanded through the positional index.
pub(crate) fn vertices_for_keys<K: Hash + Eq, D: Fn(&K, &K) -> f64>(
    a: &[K],
    b: &[K],
    p: &AlignParams,
    dist: Option<&D>,
) -> Vec<Vertex> {
    match dist {
        None => {
            let mut index: HashMap<&K, Vec<u32>> = HashMap::new();
            for (j, k) in b.iter().enumerate() {
                index.entry(k).or_default().push(j as u32);
            }
            let mut vertices = Vec::new();
            for (i, k) in a.iter().enumerate() {
                if let Some(js) = index.get(k) {
                    vertices.extend(js.iter().map(|&j| Vertex {
                        i: i as u32,
                        j,
                        cost: 0.0,
                    }));
                }
            }
            vertices
        }
        Some(d) => {
            let mut index_a: HashMap<&K, Vec<u32>> = HashMap::new();
            for (i, k) in a.iter().enumerate() {
                index_a.entry(k).or_default().push(i as u32);
            }
            let mut index_b: HashMap<&K, Vec<u32>> = HashMap::new();
            for (j, k) in b.iter().enumerate() {
                index_b.entry(k).or_default().push(j as u32);
            }
            let mut vertices = Vec::new();
            for (ka, is) in &index_a {
                for (kb, js) in &index_b {
                    let c = d(ka, kb);
                    if c <= p.vertex_threshold + super::FEAS_EPS {
                        for &i in is {
                            for &j in js {
                                vertices.push(Vertex {
                                    i,
                                    j,
                                    cost: c as f32,
                                });
                            }
                        }
                    }
                }
            }
            vertices.sort_unstable_by_key(|v| (v.i, v.j));
            vertices
        }
    }
}
