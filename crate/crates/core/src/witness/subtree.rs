use serde::{Deserialize, Serialize};

use super::{classify, remove_coinciding, EdgeOrder, HTree};
use crate::error::WitnessError;
use crate::hypergraph::Hypergraph;

/// `30 e (ln n)^2`, the size cap on a smallest non-`b`-disjoint subtree
/// after coinciding labels are removed.
pub fn subtree_size_cap(n: usize) -> f64 {
    let l = (n as f64).ln();
    30.0 * std::f64::consts::E * l * l
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtreeWitness {
    /// Node of the original tree at which `Y` is rooted.
    pub root_node: usize,
    /// `Y = N(root_node)`.
    pub subtree: HTree,
    /// `O(Y)`.
    pub reduced: HTree,
    /// `|O(Y)| <= 30 e (ln n)^2`. Only meaningful when the tree has no
    /// degenerate labels.
    pub within_size_cap: bool,
}

/// Smallest subtree `Y = N(X)` of `tree` for which `O(Y)` is not
/// `b`-disjoint; `None` when `O(tree)` itself is `b`-disjoint. Ties on size
/// go to the smaller node id.
pub fn smallest_non_bdisjoint_subtree(
    tree: &HTree,
    h: &Hypergraph,
    b: usize,
    order: &EdgeOrder,
) -> Result<Option<SubtreeWitness>, WitnessError> {
    if classify(&remove_coinciding(tree, order), h, b)?.is_b_disjoint() {
        return Ok(None);
    }
    let mut sizes: Vec<(usize, usize)> = (0..tree.len()).map(|x| (tree.descendants(x).len(), x)).collect();
    sizes.sort_unstable();
    for (_, x) in sizes {
        let subtree = tree.subtree(x);
        let reduced = remove_coinciding(&subtree, order);
        if !classify(&reduced, h, b)?.is_b_disjoint() {
            let within_size_cap = reduced.len() as f64 <= subtree_size_cap(h.uniformity());
            return Ok(Some(SubtreeWitness {
                root_node: x,
                subtree,
                reduced,
                within_size_cap,
            }));
        }
    }
    unreachable!("the whole tree is not b-disjoint")
}
