//! Randomized soundness checks: generate `b`-simple instances, run the
//! procedure, and push every trace through the invariant and witness-tree
//! checks.

use rand::Rng;
use serde::Serialize;

use crate::error::GenError;
use crate::gen::{gen_bsimple, GenSpec};
use crate::recolor::{default_p, run};
use crate::rng::{derive_seed, stream};
use crate::witness::{audit_failure, default_degenerate_threshold, EdgeOrder};

const TAG_DRAW: u64 = 0xf022;
const TAG_INSTANCE: u64 = 0x1257;
const TAG_RUN: u64 = 0x2a4e;

/// Where instances are drawn from. Each run picks `n`, `b`, `r ∈ {2, 3}`,
/// `N ∈ [n+1, nv_factor·n]`, `m ∈ [N/2, 4N]` and `p` uniformly.
#[derive(Debug, Clone, Copy)]
pub struct FuzzDomain {
    pub n: (usize, usize),
    /// `b` range; `None` means `n - 1`, so any distinct edges.
    pub b: Option<(usize, usize)>,
    pub nv_factor: usize,
    /// Candidate `p` values; a negative entry stands for `default_p(n)`.
    pub p: &'static [f64],
}

/// `n ∈ 5..=10`, `b ∈ {1, 2}`, a spread of `p` from tiny to the default.
pub const STANDARD_DOMAIN: FuzzDomain = FuzzDomain {
    n: (5, 10),
    b: Some((1, 2)),
    nv_factor: 4,
    p: &[-1.0, 0.02, 0.05, 0.1, 0.3],
};

/// Dense small instances with large `p`: deep trees, repeated labels and
/// non-b-disjoint reductions.
pub const STRESS_DOMAIN: FuzzDomain = FuzzDomain {
    n: (3, 6),
    b: None,
    nv_factor: 2,
    p: &[0.3, 0.5, 0.7, 1.0],
};

#[derive(Debug, Clone, Default, Serialize)]
pub struct Tally {
    pub runs: usize,
    pub failures: usize,
    pub trees: usize,
    pub rsets_checked: usize,
    pub not_b_disjoint: usize,
    pub violations: Vec<String>,
}

/// Performs `runs` checked runs. Instances the generator cannot fill are
/// regenerated with the edge count it reached, or skipped.
pub fn fuzz(domain: &FuzzDomain, runs: usize, seed: u64) -> Tally {
    let mut tally = Tally::default();
    let mut rng = stream(derive_seed(seed, TAG_DRAW, 0));
    let mut i = 0u64;
    while tally.runs < runs {
        i += 1;
        let n = rng.gen_range(domain.n.0..=domain.n.1);
        let b = match domain.b {
            Some((lo, hi)) => rng.gen_range(lo..=hi),
            None => n - 1,
        };
        let r = rng.gen_range(2..=3u32);
        let nv = rng.gen_range(n + 1..=domain.nv_factor * n);
        let m = rng.gen_range(nv / 2..=4 * nv);
        let mut spec = GenSpec::new(n, nv, m, b, derive_seed(seed, TAG_INSTANCE, i));
        spec.max_rejections = 500;
        let h = match gen_bsimple(&spec) {
            Ok(h) => h,
            Err(GenError::TooDense { accepted, .. }) if accepted > 0 => {
                spec.edge_count = accepted;
                match gen_bsimple(&spec) {
                    Ok(h) => h,
                    Err(_) => continue,
                }
            }
            Err(_) => continue,
        };
        let p = domain.p[rng.gen_range(0..domain.p.len())];
        let p = if p < 0.0 { default_p(n) } else { p };
        let trace = run(&h, r, p, derive_seed(seed, TAG_RUN, i));
        tally.runs += 1;
        if let Err(e) = trace.verify(&h) {
            tally.violations.push(format!("run {i}: {e}"));
            continue;
        }
        if trace.is_success() {
            if !h.is_proper(&trace.final_coloring()).is_ok_and(|x| x.is_proper()) {
                tally.violations.push(format!("run {i}: success but improper"));
            }
            continue;
        }
        tally.failures += 1;
        match audit_failure(&trace, &h, b, default_degenerate_threshold(n), &EdgeOrder::by_index()) {
            Ok(trees) => {
                if trees.is_empty() {
                    tally.violations.push(format!("run {i}: failure without a witness tree"));
                }
                tally.trees += trees.len();
                tally.rsets_checked += trees.iter().filter(|t| t.rsets_checked).count();
                tally.not_b_disjoint += trees.iter().filter(|t| !t.b_disjoint).count();
            }
            Err(e) => tally.violations.push(format!("run {i} (n={n} b={b} r={r} p={p}): {e}")),
        }
    }
    tally
}
