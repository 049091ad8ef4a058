use super::*;
use crate::recolor::{Outcome, RecolorEvent};

fn node(label: usize, parent: Option<usize>, dom: u32, blamer: Option<usize>) -> HTreeNode {
    HTreeNode {
        label,
        parent,
        children: Vec::new(),
        dominating_color: dom,
        blaming_vertex: blamer,
    }
}

/// A = {0,1,2} ends monochromatic in color 1 after vertex 2 (initially 0)
/// blamed B = {2,3,4}, which was monochromatic 0 at the start.
fn two_edge_fixture() -> (Hypergraph, Trace) {
    let h = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
    let trace = Trace {
        r: 2,
        p: 0.3,
        seed: 0,
        initial: vec![1, 1, 0, 0, 0],
        sigma: vec![0.8, 0.9, 0.1, 0.5, 0.6],
        events: vec![RecolorEvent {
            step: 0,
            vertex: 2,
            blamed_edge: 1,
            old_color: 0,
            new_color: 1,
        }],
        final_colors: vec![1, 1, 1, 0, 0],
        outcome: Outcome::Failure(vec![0]),
    };
    trace.verify(&h).unwrap();
    (h, trace)
}

#[test]
fn extract_two_edge_fixture() {
    let (h, trace) = two_edge_fixture();
    let tree = extract(&trace, &h, 0).unwrap();
    assert_eq!(tree.len(), 2);
    assert_eq!(tree.root().label, 0);
    assert_eq!(tree.root().dominating_color, 1);
    assert_eq!(tree.node(1).label, 1);
    assert_eq!(tree.node(1).parent, Some(0));
    assert_eq!(tree.node(1).blaming_vertex, Some(2));
    assert_eq!(tree.node(1).dominating_color, 0);
    check_htree(&tree, &trace, &h).unwrap();

    let rec = check_reconstruction(&tree, &trace, &h, &EdgeOrder::by_index()).unwrap();
    assert_eq!(rec.colors.len(), 5);
    assert_eq!(rec.blamers, vec![None, Some(2)]);

    let report = classify(&tree, &h, 1).unwrap();
    assert!(report.is_b_disjoint());
    let rsets = build_rsets(&tree, &trace, &h, 1, default_degenerate_threshold(3)).unwrap();
    assert_eq!(rsets.sets[0], vec![0, 1]);
    // vertex 2 is the lightest vertex of R_1
    assert_eq!(rsets.sets[1], vec![2, 3, 4]);
    assert_eq!(rsets.recolored, vec![2]);
}

#[test]
fn extract_errors() {
    let (h, mut trace) = two_edge_fixture();
    assert_eq!(extract(&trace, &h, 1), Err(WitnessError::NotMonochromatic(1)));
    assert_eq!(extract(&trace, &h, 7), Err(WitnessError::EdgeOutOfRange(7)));
    trace.outcome = Outcome::Success;
    assert_eq!(extract(&trace, &h, 0), Err(WitnessError::NoWitness));
}

#[test]
fn zero_event_failure_gives_single_node() {
    let h = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
    let trace = Trace {
        r: 3,
        p: 0.1,
        seed: 0,
        initial: vec![2, 2, 2],
        sigma: vec![0.5, 0.6, 0.7],
        events: vec![],
        final_colors: vec![2, 2, 2],
        outcome: Outcome::Failure(vec![0]),
    };
    trace.verify(&h).unwrap();
    let tree = extract(&trace, &h, 0).unwrap();
    assert_eq!(tree.len(), 1);
    check_htree(&tree, &trace, &h).unwrap();
    let rec = check_reconstruction(&tree, &trace, &h, &EdgeOrder::by_index()).unwrap();
    assert!(rec.colors.values().all(|&c| c == 2));
    let report = classify(&tree, &h, 1).unwrap();
    assert_eq!(report.straight_path, Some(vec![0]));
    assert!(report.bad_nodes.is_empty());
    let rsets = build_rsets(&tree, &trace, &h, 1, 5).unwrap();
    assert_eq!(rsets.sets, vec![vec![0, 1, 2]]);
    assert!(smallest_non_bdisjoint_subtree(&tree, &h, 1, &EdgeOrder::by_index()).unwrap().is_none());
    assert_eq!(degenerate_labels(&trace, &h, 1), Vec::<usize>::new());
}

#[test]
fn degenerate_label_fixture() {
    // vertices 0, 1, 2 of edge 0 are recolored; edge 1 holds only vertex 2
    let h = Hypergraph::new(8, 4, vec![vec![0, 1, 2, 3], vec![2, 5, 6, 7], vec![0, 4, 5, 6]]).unwrap();
    let trace = Trace {
        r: 2,
        p: 1.0,
        seed: 0,
        initial: vec![0; 8],
        sigma: vec![0.0; 8],
        events: [0, 1, 2]
            .iter()
            .enumerate()
            .map(|(i, &v)| RecolorEvent {
                step: i,
                vertex: v,
                blamed_edge: i,
                old_color: 0,
                new_color: 1,
            })
            .collect(),
        final_colors: vec![1, 1, 1, 0, 0, 0, 0, 0],
        outcome: Outcome::Success,
    };
    assert_eq!(degenerate_labels(&trace, &h, 3), vec![0]);
    assert_eq!(degenerate_labels(&trace, &h, 1), vec![0, 1, 2]);
    assert_eq!(degenerate_labels(&trace, &h, 2), vec![0]);
}

#[test]
fn remove_coinciding_keeps_first_copy() {
    // root(0) -> 1, 2; 1 -> 3 -> 4; 2 -> 3 -> 5
    let tree = HTree::from_nodes(vec![
        node(0, None, 0, None),
        node(1, Some(0), 1, Some(10)),
        node(2, Some(0), 1, Some(11)),
        node(3, Some(1), 0, Some(12)),
        node(3, Some(2), 0, Some(12)),
        node(4, Some(3), 1, Some(13)),
        node(5, Some(4), 1, Some(14)),
    ])
    .unwrap();
    let proper = remove_coinciding(&tree, &EdgeOrder::by_index());
    let labels: Vec<usize> = proper.labels().collect();
    assert_eq!(labels, vec![0, 1, 2, 3, 4]);
    assert_eq!(proper.node(3).parent, Some(1));
    assert_eq!(proper.node(4).parent, Some(3));
    assert!(proper.has_distinct_labels());
    assert_eq!(remove_coinciding(&proper, &EdgeOrder::by_index()), proper);

    // reversing the edge order makes edge 2 come first at depth 1, so its copy of 3 wins
    let rev = EdgeOrder::from_sequence(&[5, 4, 3, 2, 1, 0]);
    let other = remove_coinciding(&tree, &rev);
    let kept = other.nodes().iter().position(|n| n.label == 3).unwrap();
    assert_eq!(other.label(other.node(kept).parent.unwrap()), 2);
    assert!(other.labels().any(|l| l == 5));
    assert!(!other.labels().any(|l| l == 4));
}

#[test]
fn remove_coinciding_trivial_cases() {
    let single = HTree::single(3, 1);
    assert_eq!(remove_coinciding(&single, &EdgeOrder::by_index()), single);
    let distinct = HTree::from_nodes(vec![node(0, None, 0, None), node(2, Some(0), 1, Some(1)), node(1, Some(0), 1, Some(2))]).unwrap();
    let out = remove_coinciding(&distinct, &EdgeOrder::by_index());
    assert_eq!(out.len(), 3);
    // output is in ζ order: label 1 before label 2 at depth 1
    assert_eq!(out.labels().collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn root_copy_below_root_is_removed() {
    let tree = HTree::from_nodes(vec![node(0, None, 1, None), node(0, Some(0), 0, Some(3)), node(1, Some(0), 0, Some(4))]).unwrap();
    let proper = remove_coinciding(&tree, &EdgeOrder::by_index());
    assert_eq!(proper.labels().collect::<Vec<_>>(), vec![0, 1]);
}

/// R = {0,1,2}, X = {2,3,4}, Y = {0,4,5}: pairwise intersections of size 1.
fn triangle_of_edges() -> Hypergraph {
    Hypergraph::new(9, 3, vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 4, 5], vec![1, 6, 7]]).unwrap()
}

#[test]
fn classify_two_incomparable_bad_nodes() {
    let h = triangle_of_edges();
    let tree = HTree::from_nodes(vec![node(0, None, 0, None), node(1, Some(0), 1, Some(2)), node(2, Some(0), 1, Some(0))]).unwrap();
    let report = classify(&tree, &h, 1).unwrap();
    assert_eq!(report.bad_nodes, vec![1, 2]);
    assert_eq!(report.verdict, Verdict::NotBDisjoint(BadReason::TwoIncomparableBadNodes));
    assert_eq!(report.straight_path, None);
    // with b = 2 nothing is bad
    assert!(classify(&tree, &h, 2).unwrap().is_b_disjoint());
}

#[test]
fn classify_path_condition_failure() {
    let h = triangle_of_edges();
    let tree = HTree::from_nodes(vec![node(0, None, 0, None), node(1, Some(0), 1, Some(2)), node(2, Some(1), 0, Some(4))]).unwrap();
    let report = classify(&tree, &h, 1).unwrap();
    assert_eq!(report.bad_nodes, vec![2]);
    assert_eq!(report.straight_path, Some(vec![2, 1, 0]));
    assert!(!report.path_condition_ok);
    assert_eq!(report.verdict, Verdict::NotBDisjoint(BadReason::PathCondition));
}

#[test]
fn classify_path_is_b_disjoint() {
    let h = triangle_of_edges();
    let tree = HTree::from_nodes(vec![node(0, None, 0, None), node(1, Some(0), 1, Some(2))]).unwrap();
    let report = classify(&tree, &h, 1).unwrap();
    assert!(report.bad_nodes.is_empty());
    assert!(report.is_b_disjoint());
    check_vertex_count(&tree, &h, 1).unwrap();
    let repeated = HTree::from_nodes(vec![node(0, None, 0, None), node(0, Some(0), 1, Some(2))]).unwrap();
    assert!(matches!(classify(&repeated, &h, 1), Err(WitnessError::Precondition(_))));
}

#[test]
fn smallest_violating_subtree_is_minimal() {
    let h = triangle_of_edges();
    // Z = edge 3 on top, W = edge 0 below it with the bad siblings X, Y
    let tree = HTree::from_nodes(vec![
        node(3, None, 0, None),
        node(0, Some(0), 1, Some(1)),
        node(1, Some(1), 0, Some(2)),
        node(2, Some(1), 0, Some(0)),
    ])
    .unwrap();
    let order = EdgeOrder::by_index();
    let found = smallest_non_bdisjoint_subtree(&tree, &h, 1, &order).unwrap().unwrap();
    assert_eq!(found.root_node, 1);
    assert_eq!(found.subtree.len(), 3);
    assert!(found.within_size_cap);
    // exhaustive scan over every N(X)
    let violating: Vec<(usize, usize)> = (0..tree.len())
        .filter(|&x| !classify(&remove_coinciding(&tree.subtree(x), &order), &h, 1).unwrap().is_b_disjoint())
        .map(|x| (tree.descendants(x).len(), x))
        .collect();
    assert_eq!(violating.iter().min().map(|&(_, x)| x), Some(found.root_node));
}

#[test]
fn htree_json_roundtrip() {
    let (h, trace) = two_edge_fixture();
    let tree = extract(&trace, &h, 0).unwrap();
    let s = serde_json::to_string(&tree).unwrap();
    assert!(s.contains("\"blaming_vertex\":2"));
    let back: HTree = serde_json::from_str(&s).unwrap();
    assert_eq!(back, tree);
}

#[test]
fn zeta_orders_by_depth_label_then_parent() {
    let tree = HTree::from_nodes(vec![
        node(9, None, 0, None),
        node(5, Some(0), 0, Some(0)),
        node(2, Some(0), 0, Some(1)),
        node(7, Some(1), 0, Some(2)),
        node(1, Some(2), 0, Some(3)),
    ])
    .unwrap();
    assert_eq!(zeta_order(&tree, &EdgeOrder::by_index()), vec![0, 2, 1, 4, 3]);
}

#[test]
fn degenerate_threshold_default() {
    assert_eq!(default_degenerate_threshold(10), (20.0 * std::f64::consts::E * 10f64.ln()).ceil() as usize);
    assert_eq!(default_degenerate_threshold(10), 126);
}
