use std::collections::HashSet;

use proptest::prelude::*;
use recolor_core::certify::{
    certify, exact_b1_tail, w1_bound, w2_bound, w3_bound, w4_bound, CertificateParams, Delta,
};
use recolor_core::format::{from_json, from_text, to_json, to_text};
use recolor_core::gen::{gen_bsimple, GenSpec};
use recolor_core::hypergraph::intersection_size;
use recolor_core::oracle::{chromatic_number, is_r_colorable, OracleConfig};
use recolor_core::recolor::{run, run_with_restarts};
use recolor_core::witness::{
    audit_failure, default_degenerate_threshold, remove_coinciding, EdgeOrder, HTree, HTreeNode,
};
use recolor_core::{Coloring, GenError, HypergraphError, Hypergraph, Trace};

fn arb_hypergraph(max_n: usize, max_nv: usize, max_m: usize) -> impl Strategy<Value = Hypergraph> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), n..=max_nv.max(n)))
        .prop_flat_map(move |(n, nv)| {
            prop::collection::vec(prop::sample::subsequence((0..nv).collect::<Vec<_>>(), n), 0..=max_m).prop_map(
                move |mut edges| {
                    edges.sort();
                    edges.dedup();
                    Hypergraph::new(nv, n, edges).unwrap()
                },
            )
        })
}

fn arb_colored(max_n: usize, max_nv: usize, max_m: usize) -> impl Strategy<Value = (Hypergraph, Coloring)> {
    (arb_hypergraph(max_n, max_nv, max_m), 1..=4u32).prop_flat_map(|(h, r)| {
        let nv = h.vertex_count();
        (Just(h), prop::collection::vec(0..r, nv).prop_map(move |c| Coloring::new(c, r).unwrap()))
    })
}

/// Random rooted tree with labels from a small range, so labels repeat.
fn arb_tree() -> impl Strategy<Value = HTree> {
    (1..25usize).prop_flat_map(|t| {
        (
            prop::collection::vec(any::<prop::sample::Index>(), t),
            prop::collection::vec(0..6usize, t),
        )
            .prop_map(move |(parents, labels)| {
                let nodes = (0..t)
                    .map(|i| HTreeNode {
                        label: labels[i],
                        parent: if i == 0 { None } else { Some(parents[i].index(i)) },
                        children: Vec::new(),
                        dominating_color: 0,
                        blaming_vertex: if i == 0 { None } else { Some(i) },
                    })
                    .collect();
                HTree::from_nodes(nodes).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn simplicity_and_degrees_match_pairwise(h in arb_hypergraph(5, 12, 15)) {
        let m = h.edge_count();
        let mut best = 0;
        let mut edge_deg = vec![0; m];
        for i in 0..m {
            for j in i + 1..m {
                let k = intersection_size(h.edge(i), h.edge(j));
                best = best.max(k);
                if k > 0 {
                    edge_deg[i] += 1;
                    edge_deg[j] += 1;
                }
            }
        }
        let s = h.simplicity();
        prop_assert_eq!(s.max_pair_intersection, best);
        if let Some((a, b)) = s.witness_pair {
            prop_assert!(a < b);
            prop_assert_eq!(intersection_size(h.edge(a), h.edge(b)), best);
        } else {
            prop_assert!(m <= 1);
        }
        prop_assert_eq!(h.max_edge_degree(), edge_deg.iter().copied().max().unwrap_or(0));
        let vdeg = (0..h.vertex_count()).map(|v| h.edges().iter().filter(|e| e.contains(&v)).count()).max().unwrap_or(0);
        prop_assert_eq!(h.max_vertex_degree(), vdeg);
    }
}

proptest! {
    #[test]
    fn is_proper_iff_no_monochromatic_edge((h, c) in arb_colored(4, 10, 12)) {
        let mono = h.edges().iter().position(|e| e.iter().all(|&v| c.colors()[v] == c.colors()[e[0]]));
        let res = h.is_proper(&c).unwrap();
        prop_assert_eq!(res.is_proper(), mono.is_none());
        if let recolor_core::Properness::Monochromatic(e) = res {
            prop_assert_eq!(Some(e), mono);
        }
    }

    #[test]
    fn trim_removes_exactly_one_vertex(h in arb_hypergraph(5, 10, 12)) {
        prop_assume!(h.uniformity() >= 2);
        match h.trim() {
            Ok(t) => {
                prop_assert_eq!(t.uniformity(), h.uniformity() - 1);
                prop_assert_eq!(t.edge_count(), h.edge_count());
                prop_assert_eq!(t.vertex_count(), h.vertex_count());
                for (a, b) in h.edges().iter().zip(t.edges()) {
                    prop_assert!(b.iter().all(|v| a.contains(v)));
                    prop_assert_eq!(b.len() + 1, a.len());
                }
            }
            Err(HypergraphError::TrimCollision { first, second }) => prop_assert!(first < second),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn text_and_json_round_trip(h in arb_hypergraph(5, 12, 10)) {
        prop_assert_eq!(&from_text(&to_text(&h)).unwrap(), &h);
        prop_assert_eq!(&from_json(&to_json(&h)).unwrap(), &h);
    }

    #[test]
    fn generator_output_is_b_simple(n in 2..6usize, extra in 0..14usize, m in 0..15usize, b in 0..5usize, seed in any::<u64>()) {
        prop_assume!(b < n);
        let mut spec = GenSpec::new(n, n + extra, m, b, seed);
        spec.max_rejections = 5_000;
        match gen_bsimple(&spec) {
            Ok(h) => {
                prop_assert_eq!(h.edge_count(), m);
                prop_assert!(h.simplicity().max_pair_intersection <= b);
                prop_assert_eq!(&gen_bsimple(&spec).unwrap(), &h);
            }
            Err(GenError::TooDense { accepted, .. }) => prop_assert!(accepted < m),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn traces_satisfy_invariants(h in arb_hypergraph(5, 12, 14), r in 2..4u32, p in 0.0..=1.0f64, seed in any::<u64>()) {
        let t = run(&h, r, p, seed);
        t.verify(&h).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for ev in &t.events {
            prop_assert!(t.sigma[ev.vertex] <= p);
        }
        let json = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(&serde_json::to_string(&run(&h, r, p, seed)).unwrap(), &json);
        let back: Trace = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &t);
        if t.is_success() {
            prop_assert!(h.is_proper(&t.final_coloring()).unwrap().is_proper());
        } else {
            let b = h.simplicity().max_pair_intersection.max(1);
            audit_failure(&t, &h, b, default_degenerate_threshold(h.uniformity()), &EdgeOrder::by_index())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
        }
    }

    #[test]
    fn remove_coinciding_is_idempotent(tree in arb_tree()) {
        let order = EdgeOrder::by_index();
        let once = remove_coinciding(&tree, &order);
        prop_assert!(once.len() <= tree.len());
        prop_assert!(once.has_distinct_labels());
        prop_assert_eq!(once.root().label, tree.root().label);
        let labels: HashSet<usize> = tree.labels().collect();
        prop_assert!(once.labels().all(|l| labels.contains(&l)));
        prop_assert_eq!(&remove_coinciding(&once, &order), &once);
    }

    #[test]
    fn b1_tail_binomial_identity(n in 1..5000u64, r in 2..6u64, p in 0.0..=1.0f64) {
        let got = exact_b1_tail(n, r, p, 0).log_value;
        let want = (1.0 - n as f64) * (r as f64).ln() + n as f64 * (2.0 * p).ln_1p();
        prop_assert!(((got - want) / want).abs() < 1e-12 || (got - want).abs() < 1e-12);
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b || (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bounds_monotone_in_delta_and_r(
        ln_n in 2.3..18.0f64,
        r in 2..5u64,
        b in 1..4u64,
        frac in -0.2..1.05f64,
        step in 0.01..5.0f64,
    ) {
        let n = ln_n.exp() as u64;
        prop_assume!(n > b);
        let base = CertificateParams::at_threshold(n, r, b).unwrap();
        // Δ spans from tiny up to a bit past the threshold, in log scale
        let ln_delta = base.delta.ln * frac;
        let lo = CertificateParams { delta: Delta::from_ln(ln_delta), ..base };
        let hi = CertificateParams { delta: Delta::from_ln(ln_delta + step), ..base };
        let zero = CertificateParams { delta: Delta::from_count(0), ..base };
        let more_r = CertificateParams { r: r + 1, ..lo };
        let bounds: [fn(&CertificateParams) -> f64; 4] = [w1_bound, w2_bound, w3_bound, w4_bound];
        for (i, w) in bounds.iter().enumerate() {
            prop_assert!(le(w(&lo), w(&hi)), "w{} not monotone in delta", i + 1);
            prop_assert!(le(w(&zero), w(&lo)), "w{} at delta 0", i + 1);
            prop_assert!(le(w(&more_r), w(&lo)), "w{} not antitone in r", i + 1);
        }
        prop_assert!(le(exact_b1_tail(n, r + 1, lo.p, lo.k).log_value, exact_b1_tail(n, r, lo.p, lo.k).log_value));
        if certify(&hi).unwrap().verdict {
            prop_assert!(certify(&lo).unwrap().verdict);
            prop_assert!(certify(&zero).unwrap().verdict);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oracle_symmetry_breaking_and_restarts(h in arb_hypergraph(4, 9, 14), r in 2..4u32, seed in any::<u64>()) {
        let on = OracleConfig::default();
        let off = OracleConfig { symmetry_breaking: false, ..on };
        let a = is_r_colorable(&h, r, &on).unwrap();
        let b = is_r_colorable(&h, r, &off).unwrap();
        prop_assert_eq!(a.colorable, b.colorable);
        for res in [&a, &b] {
            if let Some(w) = &res.witness {
                prop_assert!(h.is_proper(w).unwrap().is_proper());
            }
        }
        let rr = run_with_restarts(&h, r, 0.5, seed, 5);
        if rr.success {
            prop_assert!(a.colorable);
        }
    }
}

#[test]
fn chromatic_number_never_drops_under_trim() {
    let mut checked = 0;
    let mut seed = 0;
    while checked < 50 {
        seed += 1;
        let nv = 5 + (seed % 6) as usize;
        let m = 3 + (seed % 10) as usize;
        let mut spec = GenSpec::new(4, nv, m, 3, seed);
        spec.max_rejections = 2_000;
        let Ok(h) = gen_bsimple(&spec) else { continue };
        let Ok(t) = h.trim() else { continue };
        let cfg = OracleConfig::default();
        assert!(chromatic_number(&t, &cfg).unwrap() >= chromatic_number(&h, &cfg).unwrap());
        checked += 1;
    }
}

#[test]
fn generator_seeds_give_distinct_instances() {
    let mut seen = HashSet::new();
    for seed in 0..100 {
        let h = gen_bsimple(&GenSpec::new(4, 30, 10, 1, seed)).unwrap();
        let mut edges = h.edges().to_vec();
        edges.sort();
        assert!(seen.insert(edges), "seed {seed} repeats an instance");
    }
}
