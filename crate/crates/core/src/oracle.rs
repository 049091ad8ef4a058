//! Exact `r`-colorability and chromatic number by backtracking.

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::hypergraph::{Coloring, Hypergraph};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Maximum number of color assignments tried.
    pub budget: u64,
    /// Fix vertex 0 to color 0.
    pub symmetry_breaking: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            symmetry_breaking: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub colorable: bool,
    pub witness: Option<Coloring>,
    pub nodes_explored: u64,
}

/// Decides whether `h` has a proper `r`-coloring, exhaustively.
///
/// Vertices are tried in order of descending degree; a branch dies as soon
/// as some edge is fully colored in a single color.
pub fn is_r_colorable(h: &Hypergraph, r: u32, config: &OracleConfig) -> Result<OracleResult, OracleError> {
    let nv = h.vertex_count();
    if r == 0 {
        if nv == 0 {
            return Ok(OracleResult {
                colorable: true,
                witness: Some(Coloring::new(Vec::new(), 0).expect("empty")),
                nodes_explored: 0,
            });
        }
        return Err(OracleError::NoColors);
    }
    let n = h.uniformity();
    let m = h.edge_count();
    let ru = r as usize;
    if m > 0 && (n == 1 || r == 1) {
        return Ok(OracleResult {
            colorable: false,
            witness: None,
            nodes_explored: 0,
        });
    }

    let incidence = h.incidence();
    let mut order: Vec<usize> = (0..nv).filter(|&v| !incidence[v].is_empty()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(incidence[v].len()), v));

    let mut colors = vec![0u32; nv];
    let mut count = vec![0usize; m * ru];
    // next color to try at each depth
    let mut next = vec![0u32; order.len() + 1];
    let mut nodes = 0u64;
    let mut depth = 0usize;

    let limit = |v: usize| if config.symmetry_breaking && v == 0 { 1 } else { r };
    loop {
        if depth == order.len() {
            let witness = Coloring::new(colors, r).expect("colors below r");
            debug_assert!(h.is_proper(&witness).expect("valid").is_proper());
            return Ok(OracleResult {
                colorable: true,
                witness: Some(witness),
                nodes_explored: nodes,
            });
        }
        let v = order[depth];
        let c = next[depth];
        if c >= limit(v) {
            // exhausted: undo the parent's assignment and move on
            next[depth] = 0;
            if depth == 0 {
                return Ok(OracleResult {
                    colorable: false,
                    witness: None,
                    nodes_explored: nodes,
                });
            }
            depth -= 1;
            let u = order[depth];
            for &e in &incidence[u] {
                count[e * ru + colors[u] as usize] -= 1;
            }
            continue;
        }
        next[depth] = c + 1;
        nodes += 1;
        if nodes > config.budget {
            return Err(OracleError::BudgetExceeded(config.budget));
        }
        let ci = c as usize;
        if incidence[v].iter().any(|&e| count[e * ru + ci] + 1 == n) {
            continue;
        }
        colors[v] = c;
        for &e in &incidence[v] {
            count[e * ru + ci] += 1;
        }
        depth += 1;
    }
}

/// Least `r` with a proper `r`-coloring; 1 for a hypergraph without edges.
pub fn chromatic_number(h: &Hypergraph, config: &OracleConfig) -> Result<u32, OracleError> {
    if h.edge_count() == 0 {
        return Ok(1);
    }
    if h.uniformity() == 1 {
        return Err(OracleError::Uncolorable(0));
    }
    let mut r = 2;
    loop {
        if is_r_colorable(h, r, config)?.colorable {
            return Ok(r);
        }
        r += 1;
    }
}
