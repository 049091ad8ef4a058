//! The randomized recoloring procedure and its replayable trace.
//!
//! A run draws an initial coloring `f` uniformly from `{0..r-1}^N` and an
//! i.i.d. uniform weight `σ(v)` per vertex. A vertex is *free* when
//! `σ(v) <= p`. While some monochromatic edge has a free least-weight
//! non-recolored vertex, that vertex is recolored to `f(v) + 1 mod r`; the
//! vertex is said to blame the edge. Each vertex is recolored at most once,
//! so a run performs at most `N` recolorings.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::WitnessError;
use crate::format::{de_f64_17, ser_f64_17, ser_vec_f64_17};
use crate::hypergraph::{Coloring, Hypergraph};
use crate::rng;

/// `min(1, 5 ln n / n)`.
pub fn default_p(n: usize) -> f64 {
    let n = n as f64;
    (5.0 * n.ln() / n).min(1.0)
}

/// Which qualifying monochromatic edge is handled first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    #[default]
    LowestEdgeIndex,
    /// The edge whose trigger vertex has the smallest weight.
    LeastTriggerWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecolorEvent {
    pub step: usize,
    pub vertex: usize,
    pub blamed_edge: usize,
    pub old_color: u32,
    pub new_color: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    /// Edges monochromatic in the final coloring, ascending.
    Failure(Vec<usize>),
}

/// One complete run. The hypergraph is not stored; callers pair a trace with
/// the instance it was produced on.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub r: u32,
    pub p: f64,
    pub seed: u64,
    pub initial: Vec<u32>,
    pub sigma: Vec<f64>,
    pub events: Vec<RecolorEvent>,
    pub final_colors: Vec<u32>,
    pub outcome: Outcome,
}

/// Weight order with ties broken by vertex id.
pub fn weight_cmp(sigma: &[f64], a: usize, b: usize) -> Ordering {
    sigma[a].total_cmp(&sigma[b]).then(a.cmp(&b))
}

impl Trace {
    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.sigma[v] <= self.p
    }

    pub fn initial_coloring(&self) -> Coloring {
        Coloring::new(self.initial.clone(), self.r).expect("colors below r")
    }

    pub fn final_coloring(&self) -> Coloring {
        Coloring::new(self.final_colors.clone(), self.r).expect("colors below r")
    }

    /// `blamer[e]` is the vertex that blamed edge `e`, if any.
    pub fn blamers(&self, edge_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; edge_count];
        for ev in &self.events {
            out[ev.blamed_edge] = Some(ev.vertex);
        }
        out
    }

    /// `blamed[v]` is the edge blamed by vertex `v`, if it was recolored.
    pub fn blamed_edges(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.initial.len()];
        for ev in &self.events {
            out[ev.vertex] = Some(ev.blamed_edge);
        }
        out
    }

    pub fn recolored(&self) -> Vec<bool> {
        let mut out = vec![false; self.initial.len()];
        for ev in &self.events {
            out[ev.vertex] = true;
        }
        out
    }

    /// Replays the events from `initial` on `h` and checks every trace
    /// invariant, including that the run stopped only when no candidate
    /// was left.
    pub fn verify(&self, h: &Hypergraph) -> Result<(), WitnessError> {
        let bad = |what: &'static str, detail: String| Err(WitnessError::violation(what, detail));
        let nv = h.vertex_count();
        if self.initial.len() != nv || self.sigma.len() != nv || self.final_colors.len() != nv {
            return bad("trace-shape", "vector lengths differ from vertex count".into());
        }
        let mut colors = self.initial.clone();
        let mut recolored = vec![false; nv];
        let mut blamed = vec![false; h.edge_count()];
        for (i, ev) in self.events.iter().enumerate() {
            if ev.step != i {
                return bad("event-order", format!("event {i} has step {}", ev.step));
            }
            if ev.vertex >= nv || ev.blamed_edge >= h.edge_count() {
                return bad("event-range", format!("event {i} out of range"));
            }
            if recolored[ev.vertex] {
                return bad("recolor-once", format!("vertex {} recolored twice", ev.vertex));
            }
            if blamed[ev.blamed_edge] {
                return bad("blame-once", format!("edge {} blamed twice", ev.blamed_edge));
            }
            if !self.is_free(ev.vertex) {
                return bad("free", format!("vertex {} is not free", ev.vertex));
            }
            if ev.old_color != colors[ev.vertex] || ev.new_color != (ev.old_color + 1) % self.r {
                return bad("color-step", format!("event {i} colors inconsistent"));
            }
            if !h.is_monochromatic(ev.blamed_edge, &colors) {
                return bad("blame-mono", format!("edge {} not monochromatic at step {i}", ev.blamed_edge));
            }
            let first = h
                .edge(ev.blamed_edge)
                .iter()
                .copied()
                .filter(|&u| !recolored[u])
                .min_by(|&a, &b| weight_cmp(&self.sigma, a, b));
            if first != Some(ev.vertex) {
                return bad("blame-first", format!("vertex {} is not the first non-recolored vertex of edge {}", ev.vertex, ev.blamed_edge));
            }
            colors[ev.vertex] = ev.new_color;
            recolored[ev.vertex] = true;
            blamed[ev.blamed_edge] = true;
        }
        if colors != self.final_colors {
            return bad("replay", "replaying events does not give the final coloring".into());
        }
        let mono: Vec<usize> = (0..h.edge_count()).filter(|&e| h.is_monochromatic(e, &colors)).collect();
        for &e in &mono {
            let first = h
                .edge(e)
                .iter()
                .copied()
                .filter(|&u| !recolored[u])
                .min_by(|&a, &b| weight_cmp(&self.sigma, a, b));
            if let Some(v) = first {
                if self.is_free(v) {
                    return bad("stopped-early", format!("edge {e} still has free trigger {v}"));
                }
            }
        }
        let expected = if mono.is_empty() { Outcome::Success } else { Outcome::Failure(mono) };
        if expected != self.outcome {
            return bad("outcome", format!("outcome {:?} but final coloring gives {:?}", self.outcome, expected));
        }
        Ok(())
    }
}

/// Runs the procedure with the default selection rule.
pub fn run(h: &Hypergraph, r: u32, p: f64, seed: u64) -> Trace {
    run_with(h, r, p, seed, SelectionRule::LowestEdgeIndex)
}

pub fn run_with(h: &Hypergraph, r: u32, p: f64, seed: u64, rule: SelectionRule) -> Trace {
    assert!(r >= 2, "need at least two colors");
    let p = if p.is_nan() { 0.0 } else { p.clamp(0.0, 1.0) };
    let nv = h.vertex_count();
    let mut rng = rng::stream(rng::derive_seed(seed, rng::tag::RUN, 0));
    let initial: Vec<u32> = (0..nv).map(|_| rng.gen_range(0..r)).collect();
    let sigma: Vec<f64> = (0..nv).map(|_| rng.gen::<f64>()).collect();

    let inc = h.incidence();
    // each edge's vertices in weight order; `cursor` skips recolored ones
    let by_weight: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .map(|e| {
            let mut o = e.clone();
            o.sort_by(|&a, &b| weight_cmp(&sigma, a, b));
            o
        })
        .collect();
    let mut cursor = vec![0usize; h.edge_count()];
    let mut colors = initial.clone();
    let mut recolored = vec![false; nv];
    let mut mono: BTreeSet<usize> = (0..h.edge_count())
        .filter(|&e| h.is_monochromatic(e, &colors))
        .collect();
    let mut events = Vec::new();

    loop {
        let mut pick: Option<(usize, usize)> = None;
        for &e in &mono {
            let order = &by_weight[e];
            while cursor[e] < order.len() && recolored[order[cursor[e]]] {
                cursor[e] += 1;
            }
            let Some(&v) = order.get(cursor[e]) else { continue };
            if sigma[v] > p {
                continue;
            }
            match rule {
                SelectionRule::LowestEdgeIndex => {
                    pick = Some((e, v));
                    break;
                }
                SelectionRule::LeastTriggerWeight => {
                    if pick.is_none_or(|(_, w)| weight_cmp(&sigma, v, w).is_lt()) {
                        pick = Some((e, v));
                    }
                }
            }
        }
        let Some((edge, v)) = pick else { break };
        let old = colors[v];
        let new = (old + 1) % r;
        events.push(RecolorEvent {
            step: events.len(),
            vertex: v,
            blamed_edge: edge,
            old_color: old,
            new_color: new,
        });
        colors[v] = new;
        recolored[v] = true;
        for &e in &inc[v] {
            if h.is_monochromatic(e, &colors) {
                mono.insert(e);
            } else {
                mono.remove(&e);
            }
        }
    }

    let outcome = if mono.is_empty() {
        Outcome::Success
    } else {
        Outcome::Failure(mono.into_iter().collect())
    };
    Trace {
        r,
        p,
        seed,
        initial,
        sigma,
        events,
        final_colors: colors,
        outcome,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartResult {
    /// First successful trace, or the last attempt when none succeeded.
    pub trace: Trace,
    pub success: bool,
    /// Number of runs performed.
    pub attempts: u32,
}

/// Seed used for attempt `i` of [`run_with_restarts`]; attempt 0 uses `seed` itself.
pub fn restart_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        seed
    } else {
        rng::derive_seed(seed, rng::tag::RESTART, attempt as u64)
    }
}

pub fn run_with_restarts(h: &Hypergraph, r: u32, p: f64, seed: u64, max_restarts: u32) -> RestartResult {
    let max_restarts = max_restarts.max(1);
    let mut attempt = 0;
    loop {
        let trace = run(h, r, p, restart_seed(seed, attempt));
        attempt += 1;
        if trace.is_success() || attempt == max_restarts {
            return RestartResult {
                success: trace.is_success(),
                trace,
                attempts: attempt,
            };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub total_events: u64,
}

impl MonteCarloSummary {
    pub fn mean_events(&self) -> f64 {
        self.total_events as f64 / self.trials as f64
    }

    pub fn failure_fraction(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }
}

/// Runs `trials` independent runs (in parallel) with seeds derived from `seed`.
pub fn monte_carlo(h: &Hypergraph, r: u32, p: f64, trials: u64, seed: u64) -> MonteCarloSummary {
    let (successes, total_events) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let t = run(h, r, p, rng::derive_seed(seed, rng::tag::TRIAL, i));
            (t.is_success() as u64, t.events.len() as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    MonteCarloSummary {
        trials,
        successes,
        failures: trials - successes,
        total_events,
    }
}

#[derive(Serialize, Deserialize)]
struct TraceRepr {
    r: u32,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    p: f64,
    seed: u64,
    f: Vec<u32>,
    #[serde(serialize_with = "ser_vec_f64_17")]
    sigma: Vec<f64>,
    events: Vec<(usize, usize, usize, u32, u32)>,
    #[serde(rename = "final")]
    final_colors: Vec<u32>,
    outcome: Outcome,
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TraceRepr {
            r: self.r,
            p: self.p,
            seed: self.seed,
            f: self.initial.clone(),
            sigma: self.sigma.clone(),
            events: self
                .events
                .iter()
                .map(|e| (e.step, e.vertex, e.blamed_edge, e.old_color, e.new_color))
                .collect(),
            final_colors: self.final_colors.clone(),
            outcome: self.outcome.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Trace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = TraceRepr::deserialize(d)?;
        Ok(Trace {
            r: t.r,
            p: t.p,
            seed: t.seed,
            initial: t.f,
            sigma: t.sigma,
            events: t
                .events
                .into_iter()
                .map(|(step, vertex, blamed_edge, old_color, new_color)| RecolorEvent {
                    step,
                    vertex,
                    blamed_edge,
                    old_color,
                    new_color,
                })
                .collect(),
            final_colors: t.final_colors,
            outcome: t.outcome,
        })
    }
}
