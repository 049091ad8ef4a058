use serde::{Deserialize, Serialize};

use super::{
    build_rsets, check_htree, check_reconstruction, check_vertex_count, classify, extract_all, remove_coinciding,
    smallest_non_bdisjoint_subtree, EdgeOrder, HTree,
};
use crate::error::WitnessError;
use crate::hypergraph::Hypergraph;
use crate::recolor::Trace;

/// What was checked on one witness tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeAudit {
    pub root_edge: usize,
    /// `|T|`.
    pub size: usize,
    /// `|O(T)|`.
    pub proper_size: usize,
    /// Some label of `O(T)` has at least `K` recolored vertices.
    pub degenerate: bool,
    pub b_disjoint: bool,
    /// Size of the smallest `N(X)` with `O(N(X))` not `b`-disjoint.
    pub smallest_violating_subtree: Option<usize>,
    /// The vertex-count and R-set checks ran (tree `b`-disjoint, no degenerate label).
    pub rsets_checked: bool,
}

/// Extracts every witness tree of a failed trace and runs all structural
/// checks on it: h-tree invariants, color reconstruction on `O(T)`, and for
/// `b`-disjoint non-degenerate trees the vertex count and the R-sets.
pub fn audit_failure(
    trace: &Trace,
    h: &Hypergraph,
    b: usize,
    threshold: usize,
    order: &EdgeOrder,
) -> Result<Vec<TreeAudit>, WitnessError> {
    let recolored = trace.recolored();
    extract_all(trace, h)?
        .into_iter()
        .map(|tree| audit_tree(&tree, trace, h, b, threshold, order, &recolored))
        .collect()
}

fn audit_tree(
    tree: &HTree,
    trace: &Trace,
    h: &Hypergraph,
    b: usize,
    threshold: usize,
    order: &EdgeOrder,
    recolored: &[bool],
) -> Result<TreeAudit, WitnessError> {
    check_htree(tree, trace, h)?;
    let proper = remove_coinciding(tree, order);
    if !proper.has_distinct_labels() || proper.len() > tree.len() {
        return Err(WitnessError::violation("remove-coinciding", "O(T) kept a repeated label"));
    }
    if remove_coinciding(&proper, order) != proper {
        return Err(WitnessError::violation("remove-coinciding", "O(T) is not idempotent"));
    }
    check_reconstruction(&proper, trace, h, order)?;
    let degenerate = proper
        .labels()
        .any(|e| h.edge(e).iter().filter(|&&v| recolored[v]).count() >= threshold);
    let report = classify(&proper, h, b)?;
    let smallest = smallest_non_bdisjoint_subtree(tree, h, b, order)?;
    if report.is_b_disjoint() != smallest.is_none() {
        return Err(WitnessError::violation("subtree-search", "disagrees with classify on O(T)"));
    }
    let rsets_checked = report.is_b_disjoint() && !degenerate;
    if rsets_checked {
        check_vertex_count(&proper, h, b)?;
        build_rsets(&proper, trace, h, b, threshold)?;
    }
    Ok(TreeAudit {
        root_edge: tree.root().label,
        size: tree.len(),
        proper_size: proper.len(),
        degenerate,
        b_disjoint: report.is_b_disjoint(),
        smallest_violating_subtree: smallest.map(|s| s.subtree.len()),
        rsets_checked,
    })
}
