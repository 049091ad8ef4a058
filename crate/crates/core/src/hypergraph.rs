//! Uniform hypergraphs, colorings, and the degree / simplicity measures.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::HypergraphError;

/// An `n`-uniform hypergraph on vertices `0..vertex_count`.
///
/// Every edge is stored as an ascending sequence of distinct vertex ids, and
/// no two edges are equal. Edge order is preserved as given; edge indices are
/// the identifiers used by traces and witness trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    vertex_count: usize,
    uniformity: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawHypergraph {
    vertex_count: usize,
    uniformity: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = HypergraphError;

    fn try_from(raw: RawHypergraph) -> Result<Self, Self::Error> {
        Hypergraph::new(raw.vertex_count, raw.uniformity, raw.edges)
    }
}

impl Hypergraph {
    /// Builds a hypergraph from edges already in canonical (ascending) form.
    pub fn new(
        vertex_count: usize,
        uniformity: usize,
        edges: Vec<Vec<usize>>,
    ) -> Result<Self, HypergraphError> {
        validate(vertex_count, uniformity, &edges)?;
        Ok(Self {
            vertex_count,
            uniformity,
            edges,
        })
    }

    /// Like [`Hypergraph::new`] but sorts every edge first.
    pub fn from_edges(
        vertex_count: usize,
        uniformity: usize,
        mut edges: Vec<Vec<usize>>,
    ) -> Result<Self, HypergraphError> {
        for e in &mut edges {
            e.sort_unstable();
        }
        Self::new(vertex_count, uniformity, edges)
    }

    pub fn empty(vertex_count: usize, uniformity: usize) -> Self {
        Self {
            vertex_count,
            uniformity: uniformity.max(1),
            edges: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn uniformity(&self) -> usize {
        self.uniformity
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &[usize] {
        &self.edges[index]
    }

    /// For every vertex, the ascending list of edge indices containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v].push(i);
            }
        }
        inc
    }

    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn max_vertex_degree(&self) -> usize {
        self.vertex_degrees().into_iter().max().unwrap_or(0)
    }

    /// Maximum over edges `A` of the number of other edges meeting `A`.
    pub fn max_edge_degree(&self) -> usize {
        let inc = self.incidence();
        let mut stamp = vec![usize::MAX; self.edges.len()];
        let mut best = 0;
        for (a, e) in self.edges.iter().enumerate() {
            let mut count = 0;
            stamp[a] = a;
            for &v in e {
                for &b in &inc[v] {
                    if stamp[b] != a {
                        stamp[b] = a;
                        count += 1;
                    }
                }
            }
            best = best.max(count);
        }
        best
    }

    /// Largest intersection between two distinct edges, via the vertex → edge
    /// index. The witness is the lexicographically first pair achieving it.
    pub fn simplicity(&self) -> SimplicityProfile {
        let m = self.edges.len();
        if m < 2 {
            return SimplicityProfile {
                max_pair_intersection: 0,
                witness_pair: None,
            };
        }
        let inc = self.incidence();
        let mut counts = vec![0usize; m];
        let mut touched = Vec::new();
        let mut best = 0;
        let mut witness = (0, 1);
        for (a, e) in self.edges.iter().enumerate() {
            for &v in e {
                for &b in inc[v].iter().filter(|&&b| b > a) {
                    if counts[b] == 0 {
                        touched.push(b);
                    }
                    counts[b] += 1;
                }
            }
            touched.sort_unstable();
            for &b in &touched {
                if counts[b] > best {
                    best = counts[b];
                    witness = (a, b);
                }
                counts[b] = 0;
            }
            touched.clear();
        }
        SimplicityProfile {
            max_pair_intersection: best,
            witness_pair: Some(witness),
        }
    }

    /// Lowest-index edge that is monochromatic under `colors`, if any.
    pub fn first_monochromatic(&self, colors: &[u32]) -> Option<usize> {
        self.edges.iter().position(|e| is_mono(e, colors))
    }

    pub fn is_monochromatic(&self, edge: usize, colors: &[u32]) -> bool {
        is_mono(&self.edges[edge], colors)
    }

    pub fn is_proper(&self, coloring: &Coloring) -> Result<Properness, HypergraphError> {
        if coloring.len() != self.vertex_count {
            return Err(HypergraphError::ColoringLength {
                expected: self.vertex_count,
                found: coloring.len(),
            });
        }
        Ok(match self.first_monochromatic(coloring.colors()) {
            None => Properness::Proper,
            Some(e) => Properness::Monochromatic(e),
        })
    }

    /// Removes from every edge one vertex of maximum degree (smallest id on
    /// ties). Degrees are taken in `self`; edge order is preserved.
    pub fn trim(&self) -> Result<Hypergraph, HypergraphError> {
        if self.uniformity < 2 {
            return Err(HypergraphError::TrimTooDeep {
                uniformity: self.uniformity,
                rounds: 1,
            });
        }
        let deg = self.vertex_degrees();
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::with_capacity(self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            // max_by_key keeps the last maximum, so scan in reverse to favour small ids
            let drop = *e.iter().rev().max_by_key(|&&v| deg[v]).expect("non-empty edge");
            let trimmed: Vec<usize> = e.iter().copied().filter(|&v| v != drop).collect();
            if let Some(&first) = seen.get(&trimmed) {
                return Err(HypergraphError::TrimCollision { first, second: i });
            }
            seen.insert(trimmed.clone(), i);
            edges.push(trimmed);
        }
        Ok(Hypergraph {
            vertex_count: self.vertex_count,
            uniformity: self.uniformity - 1,
            edges,
        })
    }

    /// Applies [`Hypergraph::trim`] `rounds` times, recomputing degrees each round.
    pub fn trim_k(&self, rounds: usize) -> Result<Hypergraph, HypergraphError> {
        if rounds >= self.uniformity && rounds > 0 {
            return Err(HypergraphError::TrimTooDeep {
                uniformity: self.uniformity,
                rounds,
            });
        }
        let mut h = self.clone();
        for _ in 0..rounds {
            h = h.trim()?;
        }
        Ok(h)
    }
}

fn is_mono(edge: &[usize], colors: &[u32]) -> bool {
    match edge.split_first() {
        Some((&first, rest)) => rest.iter().all(|&v| colors[v] == colors[first]),
        None => false,
    }
}

/// Checks the hypergraph invariants, reporting the first violation found.
pub fn validate(
    vertex_count: usize,
    uniformity: usize,
    edges: &[Vec<usize>],
) -> Result<(), HypergraphError> {
    if uniformity == 0 {
        return Err(HypergraphError::ZeroUniformity);
    }
    let mut seen: HashMap<&[usize], usize> = HashMap::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        if e.len() != uniformity {
            return Err(HypergraphError::WrongEdgeSize {
                edge: i,
                expected: uniformity,
                found: e.len(),
            });
        }
        for w in e.windows(2) {
            if w[0] == w[1] {
                return Err(HypergraphError::DuplicateVertexInEdge {
                    edge: i,
                    vertex: w[0],
                });
            }
        }
        if e.windows(2).any(|w| w[0] > w[1]) {
            let mut sorted = e.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::DuplicateVertexInEdge {
                    edge: i,
                    vertex: w[0],
                });
            }
            return Err(HypergraphError::UnsortedEdge { edge: i });
        }
        if let Some(&v) = e.iter().find(|&&v| v >= vertex_count) {
            return Err(HypergraphError::VertexOutOfRange {
                edge: i,
                vertex: v,
                vertex_count,
            });
        }
        if let Some(&first) = seen.get(e.as_slice()) {
            return Err(HypergraphError::DuplicateEdge { first, second: i });
        }
        seen.insert(e, i);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityProfile {
    pub max_pair_intersection: usize,
    pub witness_pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Properness {
    Proper,
    /// Lowest-index monochromatic edge.
    Monochromatic(usize),
}

impl Properness {
    pub fn is_proper(self) -> bool {
        matches!(self, Properness::Proper)
    }
}

/// A total assignment of colors `0..color_count` to vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<u32>,
    color_count: u32,
}

impl Coloring {
    pub fn new(colors: Vec<u32>, color_count: u32) -> Result<Self, HypergraphError> {
        if let Some((vertex, &color)) = colors.iter().enumerate().find(|(_, &c)| c >= color_count) {
            return Err(HypergraphError::ColorOutOfRange {
                vertex,
                color,
                color_count,
            });
        }
        Ok(Self {
            colors,
            color_count,
        })
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_count(&self) -> u32 {
        self.color_count
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn into_colors(self) -> Vec<u32> {
        self.colors
    }
}

/// Size of the intersection of two ascending sequences.
pub fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
