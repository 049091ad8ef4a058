//! Color reconstruction and the disjoint `R_i` sets of a proper tree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{classify, zeta_order, EdgeOrder, HTree};
use crate::error::WitnessError;
use crate::hypergraph::Hypergraph;
use crate::recolor::{weight_cmp, Trace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    /// Initial color of every vertex in the union of labels.
    pub colors: BTreeMap<usize, u32>,
    /// Blaming vertex of every non-root node, recovered from labels alone.
    pub blamers: Vec<Option<usize>>,
    /// The recovered recolored set.
    pub recolored: BTreeSet<usize>,
}

/// Recovers the initial colors on `⋃φ(T₁)` from the labels of a proper tree
/// and the root's dominating color.
///
/// Nodes are visited in `ζ`. At node `C` with dominating color `β`, the
/// blaming vertices of `C`'s children are peeled off one at a time: some
/// child always meets the not-yet-explained part of `φ(C)` in exactly one
/// vertex, and that vertex is its blamer, of initial color `β - 1`. Vertices
/// of `φ(C)` already in the recolored set keep their color and everything
/// else gets `β`.
///
/// The root edge may itself have been blamed earlier in the run (it was
/// monochromatic in color `α - 1`, then finished in `α`). Its copy below the
/// root is then removed by `O(T)`, so its blamer is seeded into the
/// recolored set up front with color `α - 1`.
pub fn reconstruct_colors(
    tree: &HTree,
    trace: &Trace,
    h: &Hypergraph,
    order: &EdgeOrder,
) -> Result<Reconstruction, WitnessError> {
    if !tree.has_distinct_labels() {
        return Err(WitnessError::Precondition("tree has repeated labels".into()));
    }
    let r = trace.r;
    let root_label = tree.root().label;
    let alpha = trace.final_colors[h.edge(root_label)[0]];
    let depth = tree.depths();
    let dom = |id: usize| ((alpha as u64 + (r as u64) * depth[id] as u64 - depth[id] as u64) % r as u64) as u32;

    let mut colors: BTreeMap<usize, u32> = BTreeMap::new();
    let mut recolored: BTreeSet<usize> = BTreeSet::new();
    let mut blamers = vec![None; tree.len()];
    if let Some(w) = trace.blamers(h.edge_count())[root_label] {
        recolored.insert(w);
        colors.insert(w, (alpha + r - 1) % r);
    }

    let conflict = |v: usize, old: u32, new: u32| {
        WitnessError::violation(
            "color-reconstruction",
            format!("vertex {v} assigned both {old} and {new}"),
        )
    };

    for c in zeta_order(tree, order) {
        let beta = dom(c);
        let below = (beta + r - 1) % r;
        let label = h.edge(tree.label(c));
        let mut open: Vec<usize> = label.iter().copied().filter(|v| !recolored.contains(v)).collect();
        let mut pending: Vec<usize> = tree.node(c).children.clone();
        while !pending.is_empty() {
            let hit = pending.iter().enumerate().find_map(|(slot, &child)| {
                let mut common = h.edge(tree.label(child)).iter().filter(|v| open.contains(v));
                match (common.next(), common.next()) {
                    (Some(&v), None) => Some((slot, child, v)),
                    _ => None,
                }
            });
            let Some((slot, child, v)) = hit else {
                return Err(WitnessError::violation(
                    "blaming-bijection",
                    format!("cannot recover blaming vertices below node {c}"),
                ));
            };
            pending.swap_remove(slot);
            open.retain(|&u| u != v);
            blamers[child] = Some(v);
            recolored.insert(v);
            if let Some(old) = colors.insert(v, below) {
                if old != below {
                    return Err(conflict(v, old, below));
                }
            }
        }
        for &v in label {
            if recolored.contains(&v) {
                continue;
            }
            if let Some(old) = colors.insert(v, beta) {
                if old != beta {
                    return Err(conflict(v, old, beta));
                }
            }
        }
    }
    Ok(Reconstruction {
        colors,
        blamers,
        recolored,
    })
}

/// Runs [`reconstruct_colors`] and compares with the trace: colors must
/// equal `f` on the label union and recovered blamers must equal the stored
/// ones.
pub fn check_reconstruction(
    tree: &HTree,
    trace: &Trace,
    h: &Hypergraph,
    order: &EdgeOrder,
) -> Result<Reconstruction, WitnessError> {
    let rec = reconstruct_colors(tree, trace, h, order)?;
    let union = tree.vertex_union(h);
    if rec.colors.len() != union.len() {
        return Err(WitnessError::violation(
            "color-reconstruction",
            format!("recovered {} of {} vertices", rec.colors.len(), union.len()),
        ));
    }
    for (&v, &c) in &rec.colors {
        if trace.initial[v] != c {
            return Err(WitnessError::violation(
                "color-reconstruction",
                format!("vertex {v}: recovered {c}, initial {}", trace.initial[v]),
            ));
        }
    }
    for (id, node) in tree.nodes().iter().enumerate().skip(1) {
        if rec.blamers[id] != node.blaming_vertex {
            return Err(WitnessError::violation(
                "blaming-bijection",
                format!("node {id}: recovered blamer {:?}, stored {:?}", rec.blamers[id], node.blaming_vertex),
            ));
        }
    }
    Ok(rec)
}

/// For a `b`-disjoint proper tree: `|⋃φ(T₁)| >= n + (n - b)(t - 1)`.
pub fn check_vertex_count(tree: &HTree, h: &Hypergraph, b: usize) -> Result<(), WitnessError> {
    let n = h.uniformity() as i64;
    let need = n + (n - b as i64) * (tree.len() as i64 - 1);
    let have = tree.vertex_union(h).len() as i64;
    if have < need {
        return Err(WitnessError::violation(
            "vertex-count",
            format!("label union has {have} vertices, bound is {need}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RSets {
    /// `R_i` for every node, ascending vertex ids; indexed like the tree.
    pub sets: Vec<Vec<usize>>,
    /// Vertices recolored during the run that lie in some label.
    pub recolored: Vec<usize>,
}

/// Builds `R_i` for each node of a `b`-disjoint proper tree without
/// degenerate labels and checks their properties.
///
/// With `C_m, …, C_0` the straight path through all bad nodes, a path node
/// gets `{v(C_i)} ∪ φ(C_i) ∖ (𝓡 ∪ ⋃_{j>i} φ(C_j))` and any other node gets
/// `{v(A)} ∪ φ(A) ∖ (𝓡 ∪ ⋃_{F ∉ N(A)} φ(F))`, where `𝓡` is the recolored
/// part of the label union. Checked: `|R_i| >= n - K - b`; pairwise
/// disjointness; every vertex of `R_i` has the node's dominating color under
/// `f`; the blaming vertex is in `R_i` and is its lightest vertex; no vertex
/// of `R_0` is free.
pub fn build_rsets(
    tree: &HTree,
    trace: &Trace,
    h: &Hypergraph,
    b: usize,
    threshold: usize,
) -> Result<RSets, WitnessError> {
    let report = classify(tree, h, b)?;
    let path = match (&report.straight_path, report.is_b_disjoint()) {
        (Some(p), true) => p.clone(),
        _ => return Err(WitnessError::Precondition("tree is not b-disjoint".into())),
    };
    let was_recolored = trace.recolored();
    for node in tree.nodes() {
        let count = h.edge(node.label).iter().filter(|&&v| was_recolored[v]).count();
        if count >= threshold {
            return Err(WitnessError::Precondition(format!("label {} is degenerate", node.label)));
        }
    }
    let union = tree.vertex_union(h);
    let recolored: BTreeSet<usize> = union.iter().copied().filter(|&v| was_recolored[v]).collect();

    let t = tree.len();
    let mut on_path = vec![None; t];
    for (i, &node) in path.iter().enumerate() {
        on_path[node] = Some(i);
    }
    let mut sets = Vec::with_capacity(t);
    for (a, pos) in on_path.iter().enumerate() {
        let mut excluded: BTreeSet<usize> = recolored.clone();
        match *pos {
            Some(i) => {
                for &deeper in &path[..i] {
                    excluded.extend(h.edge(tree.label(deeper)).iter().copied());
                }
            }
            None => {
                let inside = tree.descendants(a);
                for f in 0..t {
                    if inside.binary_search(&f).is_err() {
                        excluded.extend(h.edge(tree.label(f)).iter().copied());
                    }
                }
            }
        }
        let mut set: Vec<usize> = h
            .edge(tree.label(a))
            .iter()
            .copied()
            .filter(|v| !excluded.contains(v))
            .collect();
        if let Some(v) = tree.node(a).blaming_vertex.filter(|_| a != 0) {
            set.push(v);
        }
        set.sort_unstable();
        set.dedup();
        sets.push(set);
    }

    let n = h.uniformity() as i64;
    let min_size = n - threshold as i64 - b as i64;
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (a, set) in sets.iter().enumerate() {
        if (set.len() as i64) < min_size {
            return Err(WitnessError::violation(
                "rset-size",
                format!("|R_{a}| = {} below {min_size}", set.len()),
            ));
        }
        for &v in set {
            if let Some(other) = owner.insert(v, a) {
                return Err(WitnessError::violation(
                    "rset-disjoint",
                    format!("vertex {v} in R_{other} and R_{a}"),
                ));
            }
        }
        let node = tree.node(a);
        if let Some(&v) = set.iter().find(|&&v| trace.initial[v] != node.dominating_color) {
            return Err(WitnessError::violation(
                "rset-color",
                format!("vertex {v} of R_{a} has initial color {}", trace.initial[v]),
            ));
        }
        if a == 0 {
            if let Some(&v) = set.iter().find(|&&v| trace.is_free(v)) {
                return Err(WitnessError::violation("rset-root-nonfree", format!("vertex {v} of R_0 is free")));
            }
        } else {
            let v = node.blaming_vertex.ok_or_else(|| WitnessError::violation("rset-first", format!("node {a} has no blamer")))?;
            let first = set.iter().copied().min_by(|&x, &y| weight_cmp(&trace.sigma, x, y));
            if first != Some(v) {
                return Err(WitnessError::violation(
                    "rset-first",
                    format!("blamer {v} is not the lightest vertex of R_{a}"),
                ));
            }
        }
    }
    Ok(RSets {
        sets,
        recolored: recolored.into_iter().collect(),
    })
}
