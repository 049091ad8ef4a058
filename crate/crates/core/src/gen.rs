//! Seeded instance generators.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::GenError;
use crate::hypergraph::Hypergraph;
use crate::rng;

pub const DEFAULT_MAX_REJECTIONS: u64 = 100_000;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 10;

/// Parameters for [`gen_bsimple`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Uniformity.
    pub n: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Largest allowed intersection between two edges.
    pub b: usize,
    pub seed: u64,
    /// Consecutive rejections after which an attempt is abandoned.
    pub max_rejections: u64,
    /// Independent packing attempts before giving up.
    pub max_attempts: u32,
}

impl GenSpec {
    pub fn new(n: usize, vertex_count: usize, edge_count: usize, b: usize, seed: u64) -> Self {
        Self {
            n,
            vertex_count,
            edge_count,
            b,
            seed,
            max_rejections: DEFAULT_MAX_REJECTIONS,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    fn check(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::InvalidSpec("uniformity must be positive".into()));
        }
        if self.n > self.vertex_count {
            return Err(GenError::InvalidSpec(format!(
                "uniformity {} exceeds vertex count {}",
                self.n, self.vertex_count
            )));
        }
        if self.b >= self.n {
            return Err(GenError::InvalidSpec(format!(
                "b = {} must be below uniformity {}",
                self.b, self.n
            )));
        }
        if self.max_rejections == 0 || self.max_attempts == 0 {
            return Err(GenError::InvalidSpec("max_rejections and max_attempts must be positive".into()));
        }
        Ok(())
    }
}

/// Rejection sampler for `b`-simple hypergraphs: propose a uniform `n`-subset
/// and keep it iff it meets every accepted edge in at most `b` vertices.
/// A packing that stalls for `max_rejections` proposals is discarded and
/// rebuilt from a fresh stream, up to `max_attempts` times.
pub fn gen_bsimple(spec: &GenSpec) -> Result<Hypergraph, GenError> {
    spec.check()?;
    let mut best = 0;
    for attempt in 0..spec.max_attempts {
        match pack(spec, attempt as u64) {
            Ok(edges) => return Ok(Hypergraph::new(spec.vertex_count, spec.n, edges).expect("generator emits valid edges")),
            Err(accepted) => best = best.max(accepted),
        }
    }
    Err(GenError::TooDense {
        rejections: spec.max_rejections,
        attempts: spec.max_attempts,
        accepted: best,
        target: spec.edge_count,
    })
}

/// One packing attempt; on a stall returns the number of edges placed.
fn pack(spec: &GenSpec, attempt: u64) -> Result<Vec<Vec<usize>>, usize> {
    let mut rng = rng::stream(rng::derive_seed(spec.seed, rng::tag::GEN, attempt));
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); spec.vertex_count];
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(spec.edge_count);
    let mut counts: Vec<usize> = Vec::new();
    let mut rejections = 0u64;
    while edges.len() < spec.edge_count {
        let mut cand = sample(&mut rng, spec.vertex_count, spec.n).into_vec();
        cand.sort_unstable();
        counts.clear();
        counts.resize(edges.len(), 0);
        let ok = cand.iter().all(|&v| {
            incidence[v].iter().all(|&e| {
                counts[e] += 1;
                counts[e] <= spec.b
            })
        });
        if ok {
            rejections = 0;
            let idx = edges.len();
            for &v in &cand {
                incidence[v].push(idx);
            }
            edges.push(cand);
        } else {
            rejections += 1;
            if rejections >= spec.max_rejections {
                return Err(edges.len());
            }
        }
    }
    Ok(edges)
}

/// All `n`-subsets of `0..vertex_count`, in lexicographic order.
pub fn complete(n: usize, vertex_count: usize) -> Result<Hypergraph, GenError> {
    if n == 0 || n > vertex_count {
        return Err(GenError::InvalidSpec(format!(
            "need 0 < n <= N, got n = {n}, N = {vertex_count}"
        )));
    }
    let count = binomial_u128(vertex_count as u128, n as u128);
    if count > 1_000_000 {
        return Err(GenError::TooLarge(count));
    }
    let mut edges = Vec::with_capacity(count as usize);
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        edges.push(cur.clone());
        // advance to the next combination
        let mut i = n;
        while i > 0 && cur[i - 1] == vertex_count - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        cur[i - 1] += 1;
        for j in i..n {
            cur[j] = cur[j - 1] + 1;
        }
    }
    Ok(Hypergraph::new(vertex_count, n, edges).expect("combinations are valid edges"))
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// The Fano plane: 7 points, 7 lines, every two lines meet in one point.
pub fn fano() -> Hypergraph {
    let lines = vec![
        vec![0, 1, 2],
        vec![0, 3, 4],
        vec![0, 5, 6],
        vec![1, 3, 5],
        vec![1, 4, 6],
        vec![2, 3, 6],
        vec![2, 4, 5],
    ];
    Hypergraph::new(7, 3, lines).expect("fano plane is valid")
}
