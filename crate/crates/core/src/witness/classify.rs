use serde::{Deserialize, Serialize};

use super::HTree;
use crate::error::WitnessError;
use crate::hypergraph::{intersection_size, Hypergraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadReason {
    /// All bad nodes lie on one straight path, but some path node meets the
    /// deeper path labels in more than `b` vertices.
    PathCondition,
    TwoIncomparableBadNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BDisjoint,
    NotBDisjoint(BadReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub bad_nodes: Vec<usize>,
    /// `C_m, …, C_0`: from the deepest bad node up to the root. Just the
    /// root when there are no bad nodes; absent when no straight path
    /// contains every bad node.
    pub straight_path: Option<Vec<usize>>,
    pub path_condition_ok: bool,
    pub verdict: Verdict,
}

impl DisjointnessReport {
    pub fn is_b_disjoint(&self) -> bool {
        self.verdict == Verdict::BDisjoint
    }
}

/// Finds the bad nodes of a proper tree and decides `b`-disjointness.
///
/// Node `C` is bad when its label shares at least `b + 1` vertices with the
/// union of labels outside `N(C)`.
pub fn classify(tree: &HTree, h: &Hypergraph, b: usize) -> Result<DisjointnessReport, WitnessError> {
    if !tree.has_distinct_labels() {
        return Err(WitnessError::Precondition("tree has repeated labels".into()));
    }
    let t = tree.len();
    let mut total = vec![0u32; h.vertex_count()];
    for node in tree.nodes() {
        for &v in h.edge(node.label) {
            total[v] += 1;
        }
    }
    let mut inside = vec![0u32; h.vertex_count()];
    let mut bad_nodes = Vec::new();
    for c in 0..t {
        let sub = tree.descendants(c);
        for &d in &sub {
            for &v in h.edge(tree.label(d)) {
                inside[v] += 1;
            }
        }
        let shared = h
            .edge(tree.label(c))
            .iter()
            .filter(|&&v| total[v] > inside[v])
            .count();
        if shared > b {
            bad_nodes.push(c);
        }
        for &d in &sub {
            for &v in h.edge(tree.label(d)) {
                inside[v] -= 1;
            }
        }
    }

    if bad_nodes.is_empty() {
        return Ok(DisjointnessReport {
            bad_nodes,
            straight_path: Some(vec![0]),
            path_condition_ok: true,
            verdict: Verdict::BDisjoint,
        });
    }
    let depth = tree.depths();
    let deepest = *bad_nodes
        .iter()
        .max_by_key(|&&c| (depth[c], std::cmp::Reverse(c)))
        .expect("non-empty");
    if !bad_nodes.iter().all(|&c| tree.is_ancestor(c, deepest)) {
        return Ok(DisjointnessReport {
            bad_nodes,
            straight_path: None,
            path_condition_ok: false,
            verdict: Verdict::NotBDisjoint(BadReason::TwoIncomparableBadNodes),
        });
    }
    let path = tree.path_to_root(deepest);
    let path_condition_ok = path_condition(tree, h, b, &path);
    Ok(DisjointnessReport {
        bad_nodes,
        straight_path: Some(path),
        path_condition_ok,
        verdict: if path_condition_ok {
            Verdict::BDisjoint
        } else {
            Verdict::NotBDisjoint(BadReason::PathCondition)
        },
    })
}

/// `|φ(C_j) ∩ ⋃_{i>j} φ(C_i)| <= b` for every `j < m`, with `path = [C_m, …, C_0]`.
fn path_condition(tree: &HTree, h: &Hypergraph, b: usize, path: &[usize]) -> bool {
    let mut deeper: Vec<usize> = Vec::new();
    for &node in path {
        let label = h.edge(tree.label(node));
        if !deeper.is_empty() && intersection_size(label, &deeper) > b {
            return false;
        }
        deeper.extend_from_slice(label);
        deeper.sort_unstable();
        deeper.dedup();
    }
    true
}
