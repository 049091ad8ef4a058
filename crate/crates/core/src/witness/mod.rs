//! Failure witnesses: h-trees extracted from failed traces.
//!
//! An h-tree is rooted at an edge that is monochromatic in the final
//! coloring. A node labelled by edge `e` with dominating color `β` has one
//! child per vertex `v ∈ e` whose initial color is `β - 1`: the child is the
//! edge `v` blamed, with dominating color `β - 1`. Leaves are edges that were
//! monochromatic in the initial coloring.

mod audit;
mod classify;
mod reconstruct;
mod subtree;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::WitnessError;
use crate::hypergraph::Hypergraph;
use crate::recolor::Trace;

pub use audit::{audit_failure, TreeAudit};
pub use classify::{classify, BadReason, DisjointnessReport, Verdict};
pub use reconstruct::{
    build_rsets, check_reconstruction, check_vertex_count, reconstruct_colors, RSets,
    Reconstruction,
};
pub use subtree::{smallest_non_bdisjoint_subtree, subtree_size_cap, SubtreeWitness};

/// Upper bound on nodes in one extracted tree; guards against pathological traces.
pub const MAX_TREE_NODES: usize = 1 << 20;

/// `ceil(20 e ln n)`, the recolored-vertex count that makes a label degenerate.
pub fn default_degenerate_threshold(n: usize) -> usize {
    (20.0 * std::f64::consts::E * (n as f64).ln()).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTreeNode {
    /// Edge index labelling this node.
    pub label: usize,
    pub parent: Option<usize>,
    #[serde(skip)]
    pub children: Vec<usize>,
    pub dominating_color: u32,
    /// The vertex that blamed `label`; absent for the root.
    pub blaming_vertex: Option<usize>,
}

/// A rooted, labelled tree. Node 0 is the root and every parent precedes its
/// children in `nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HTree {
    nodes: Vec<HTreeNode>,
}

impl<'de> Deserialize<'de> for HTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            nodes: Vec<HTreeNode>,
        }
        let Repr { nodes } = Repr::deserialize(d)?;
        HTree::from_nodes(nodes).map_err(serde::de::Error::custom)
    }
}

impl HTree {
    /// Builds a tree from nodes whose `parent` links are set; children lists
    /// are rebuilt in node order.
    pub fn from_nodes(mut nodes: Vec<HTreeNode>) -> Result<Self, WitnessError> {
        if nodes.is_empty() {
            return Err(WitnessError::Precondition("tree has no nodes".into()));
        }
        for node in &mut nodes {
            node.children.clear();
        }
        for i in 0..nodes.len() {
            match nodes[i].parent {
                None if i == 0 => {}
                Some(p) if p < i => nodes[p].children.push(i),
                _ => {
                    return Err(WitnessError::Precondition(format!(
                        "node {i} has an invalid parent link"
                    )))
                }
            }
        }
        Ok(HTree { nodes })
    }

    pub fn single(label: usize, dominating_color: u32) -> Self {
        HTree {
            nodes: vec![HTreeNode {
                label,
                parent: None,
                children: Vec::new(),
                dominating_color,
                blaming_vertex: None,
            }],
        }
    }

    pub fn nodes(&self) -> &[HTreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &HTreeNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> &HTreeNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn label(&self, id: usize) -> usize {
        self.nodes[id].label
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().map(|n| n.label)
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for i in 1..self.nodes.len() {
            d[i] = d[self.nodes[i].parent.expect("non-root has a parent")] + 1;
        }
        d
    }

    /// `N(C)`: `id` together with all its descendants, in node order.
    pub fn descendants(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.nodes[out[i]].children.iter().copied());
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Whether `anc` lies on the straight path from `node` to the root
    /// (a node is its own ancestor).
    pub fn is_ancestor(&self, anc: usize, mut node: usize) -> bool {
        loop {
            if node == anc {
                return true;
            }
            match self.nodes[node].parent {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    /// Straight path from `node` up to the root, `node` first.
    pub fn path_to_root(&self, mut node: usize) -> Vec<usize> {
        let mut path = vec![node];
        while let Some(p) = self.nodes[node].parent {
            path.push(p);
            node = p;
        }
        path
    }

    pub fn has_distinct_labels(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.nodes.len());
        self.nodes.iter().all(|n| seen.insert(n.label))
    }

    /// Union of the vertex sets of all labels, ascending.
    pub fn vertex_union(&self, h: &Hypergraph) -> Vec<usize> {
        let mut all: Vec<usize> = self.nodes.iter().flat_map(|n| h.edge(n.label).iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// The subtree `N(id)` as a tree of its own, node order preserved.
    pub fn subtree(&self, id: usize) -> HTree {
        self.restrict(&self.descendants(id))
    }

    /// Keeps the listed nodes (which must be closed under taking parents,
    /// except for the first, which becomes the root) in the given order.
    fn restrict(&self, keep: &[usize]) -> HTree {
        let mut map = HashMap::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            map.insert(old, new);
        }
        let nodes = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                let n = &self.nodes[old];
                HTreeNode {
                    label: n.label,
                    parent: if new == 0 { None } else { n.parent.map(|p| map[&p]) },
                    children: Vec::new(),
                    dominating_color: n.dominating_color,
                    blaming_vertex: n.blaming_vertex,
                }
            })
            .collect();
        HTree::from_nodes(nodes).expect("restriction keeps parents before children")
    }
}

/// A total order on edges, used to break ties between nodes at equal depth.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeOrder {
    rank: Option<Vec<usize>>,
}

impl EdgeOrder {
    /// Edge-index order.
    pub fn by_index() -> Self {
        Self { rank: None }
    }

    /// `sequence` lists edge indices from first to last.
    pub fn from_sequence(sequence: &[usize]) -> Self {
        let len = sequence.iter().copied().max().map_or(0, |m| m + 1);
        let mut rank = vec![usize::MAX; len];
        for (pos, &e) in sequence.iter().enumerate() {
            rank[e] = pos;
        }
        Self { rank: Some(rank) }
    }

    pub fn rank(&self, edge: usize) -> usize {
        match &self.rank {
            None => edge,
            Some(r) => r.get(edge).copied().unwrap_or(usize::MAX),
        }
    }
}

/// Node order `ζ`: by depth, then by edge order of the label, then by the
/// position of the parent in `ζ`.
pub fn zeta_order(tree: &HTree, order: &EdgeOrder) -> Vec<usize> {
    let mut out = vec![0];
    let mut level = vec![0];
    while !level.is_empty() {
        // (label rank, parent position in ζ, child slot)
        let mut next: Vec<(usize, usize, usize, usize)> = Vec::new();
        let base = out.len() - level.len();
        for (pos, &node) in level.iter().enumerate() {
            for (slot, &c) in tree.nodes[node].children.iter().enumerate() {
                next.push((order.rank(tree.nodes[c].label), base + pos, slot, c));
            }
        }
        next.sort_unstable();
        level = next.into_iter().map(|t| t.3).collect();
        out.extend(level.iter().copied());
    }
    out
}

/// Builds the h-tree rooted at `root_edge` of a failed trace.
pub fn extract(trace: &Trace, h: &Hypergraph, root_edge: usize) -> Result<HTree, WitnessError> {
    if trace.is_success() {
        return Err(WitnessError::NoWitness);
    }
    if root_edge >= h.edge_count() {
        return Err(WitnessError::EdgeOutOfRange(root_edge));
    }
    if !h.is_monochromatic(root_edge, &trace.final_colors) {
        return Err(WitnessError::NotMonochromatic(root_edge));
    }
    let r = trace.r;
    let blamed = trace.blamed_edges();
    let mut when = vec![usize::MAX; h.vertex_count()];
    for ev in &trace.events {
        when[ev.vertex] = ev.step;
    }
    let root_color = trace.final_colors[h.edge(root_edge)[0]];
    let mut nodes = vec![HTreeNode {
        label: root_edge,
        parent: None,
        children: Vec::new(),
        dominating_color: root_color,
        blaming_vertex: None,
    }];
    // blame time of each node's label; the root is "after everything"
    let mut time = vec![usize::MAX];
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let beta = nodes[id].dominating_color;
        let below = (beta + r - 1) % r;
        let label = nodes[id].label;
        for &v in h.edge(label) {
            if trace.initial[v] != below {
                continue;
            }
            let Some(child_edge) = blamed[v] else {
                return Err(WitnessError::violation(
                    "h-tree",
                    format!("vertex {v} of edge {label} has color {below} but was never recolored"),
                ));
            };
            if when[v] >= time[id] {
                return Err(WitnessError::violation(
                    "h-tree",
                    format!("blame by {v} does not precede its parent's"),
                ));
            }
            if nodes.len() >= MAX_TREE_NODES {
                return Err(WitnessError::Precondition("h-tree exceeds node limit".into()));
            }
            let child = nodes.len();
            nodes.push(HTreeNode {
                label: child_edge,
                parent: Some(id),
                children: Vec::new(),
                dominating_color: below,
                blaming_vertex: Some(v),
            });
            time.push(when[v]);
            nodes[id].children.push(child);
            queue.push_back(child);
        }
    }
    Ok(HTree { nodes })
}

/// One tree per edge that is monochromatic in the final coloring.
pub fn extract_all(trace: &Trace, h: &Hypergraph) -> Result<Vec<HTree>, WitnessError> {
    match &trace.outcome {
        crate::recolor::Outcome::Success => Err(WitnessError::NoWitness),
        crate::recolor::Outcome::Failure(edges) => edges.iter().map(|&e| extract(trace, h, e)).collect(),
    }
}

/// Checks the h-tree invariants against the trace it came from: the root is
/// monochromatic at the end, leaves are monochromatic in `f`, dominating
/// colors step down by one, blaming vertices lie in both labels, and within
/// each child list distinct labels have distinct blaming vertices.
pub fn check_htree(tree: &HTree, trace: &Trace, h: &Hypergraph) -> Result<(), WitnessError> {
    let r = trace.r;
    let root = tree.root();
    if !h.is_monochromatic(root.label, &trace.final_colors) {
        return Err(WitnessError::violation("root-mono", format!("edge {} not monochromatic at the end", root.label)));
    }
    let blamers = trace.blamers(h.edge_count());
    for (id, node) in tree.nodes().iter().enumerate() {
        if node.children.is_empty() {
            let e = h.edge(node.label);
            if !e.iter().all(|&v| trace.initial[v] == node.dominating_color) {
                return Err(WitnessError::violation(
                    "leaf-mono",
                    format!("leaf {id} (edge {}) is not monochromatic in color {} under f", node.label, node.dominating_color),
                ));
            }
        }
        if let Some(p) = node.parent {
            let parent = tree.node(p);
            if node.dominating_color != (parent.dominating_color + r - 1) % r {
                return Err(WitnessError::violation("dominating-color", format!("node {id}")));
            }
            let v = node.blaming_vertex.ok_or_else(|| {
                WitnessError::violation("blaming-vertex", format!("node {id} has no blaming vertex"))
            })?;
            if !h.edge(node.label).contains(&v) || !h.edge(parent.label).contains(&v) {
                return Err(WitnessError::violation("blaming-vertex", format!("vertex {v} not in both labels at node {id}")));
            }
            if blamers[node.label] != Some(v) {
                return Err(WitnessError::violation("blaming-vertex", format!("vertex {v} did not blame edge {}", node.label)));
            }
        }
        let mut by_label: HashMap<usize, usize> = HashMap::new();
        let mut by_vertex: HashMap<usize, usize> = HashMap::new();
        for &c in &node.children {
            let child = tree.node(c);
            let v = child.blaming_vertex.unwrap_or(usize::MAX);
            if let Some(&other) = by_label.get(&child.label) {
                if other != v {
                    return Err(WitnessError::violation("blaming-bijection", format!("edge {} has two blamers under node {id}", child.label)));
                }
            }
            if let Some(&other) = by_vertex.get(&v) {
                if other != child.label {
                    return Err(WitnessError::violation("blaming-bijection", format!("vertex {v} blames two edges under node {id}")));
                }
            }
            by_label.insert(child.label, v);
            by_vertex.insert(v, child.label);
        }
    }
    Ok(())
}

/// Edges with at least `threshold` of their vertices recolored during the run.
pub fn degenerate_labels(trace: &Trace, h: &Hypergraph, threshold: usize) -> Vec<usize> {
    let recolored = trace.recolored();
    (0..h.edge_count())
        .filter(|&e| h.edge(e).iter().filter(|&&v| recolored[v]).count() >= threshold)
        .collect()
}

/// The operation `O(T)`: scan nodes in `ζ` and, whenever another live node
/// carries the current node's label, delete that copy with all its
/// descendants. The result has pairwise distinct labels; its nodes are
/// listed in `ζ` order.
pub fn remove_coinciding(tree: &HTree, order: &EdgeOrder) -> HTree {
    let zeta = zeta_order(tree, order);
    let mut alive = vec![true; tree.len()];
    let mut by_label: HashMap<usize, Vec<usize>> = HashMap::new();
    for (id, node) in tree.nodes().iter().enumerate() {
        by_label.entry(node.label).or_default().push(id);
    }
    for &c in &zeta {
        if !alive[c] {
            continue;
        }
        for &d in &by_label[&tree.label(c)] {
            if d != c && alive[d] {
                for x in tree.descendants(d) {
                    alive[x] = false;
                }
            }
        }
    }
    let keep: Vec<usize> = zeta.into_iter().filter(|&id| alive[id]).collect();
    tree.restrict(&keep)
}

#[cfg(test)]
mod tests;
