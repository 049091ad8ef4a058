use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use recolor_core::format::{fmt17, ser_f64_17};
use recolor_core::recolor::{default_p, run, run_with_restarts};
use recolor_core::rng;
use recolor_core::witness::{
    audit_failure, classify, default_degenerate_threshold, extract_all, remove_coinciding, DisjointnessReport,
    EdgeOrder, HTree, TreeAudit,
};
use recolor_core::{Hypergraph, Outcome, Trace, WitnessError};
use serde::Serialize;

use crate::io::{join, read_instance, read_string};
use crate::{Format, Status};

#[derive(Args)]
pub struct ColorArgs {
    /// Instance file (`-` for stdin), text or JSON.
    #[arg(long, short)]
    input: String,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Free-vertex probability; defaults to min(1, 5 ln n / n).
    #[arg(long)]
    p: Option<f64>,
    /// Runs per trial before giving up.
    #[arg(long, default_value_t = 1)]
    restarts: u32,
    /// Independent trials; more than one switches to an aggregate report.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extract and check the witness trees of every failed run.
    #[arg(long)]
    checks: bool,
    /// Intersection bound used by the checks; defaults to the instance's own.
    #[arg(long)]
    b: Option<usize>,
    /// Embed the full trace of the reported run.
    #[arg(long)]
    full_trace: bool,
    /// `json` or `text`.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
pub struct HtreeArgs {
    /// Instance file (`-` for stdin), text or JSON.
    #[arg(long, short)]
    input: String,
    /// Trace JSON produced by `color --full-trace`; otherwise one run is made.
    #[arg(long)]
    trace: Option<String>,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    b: Option<usize>,
    /// `json` or `text`.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// Witness checks on one failed trace.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Checked {
    pub trees: Vec<TreeAudit>,
    /// First structural violation or extraction error, if any.
    pub violation: Option<String>,
}

pub fn check_failure(trace: &Trace, h: &Hypergraph, b: usize) -> Checked {
    match audit_failure(trace, h, b, default_degenerate_threshold(h.uniformity()), &EdgeOrder::by_index()) {
        Ok(trees) => Checked { trees, violation: None },
        Err(e) => Checked {
            trees: Vec::new(),
            violation: Some(e.to_string()),
        },
    }
}

/// The `b` used for structural checks: the requested one, or the instance's
/// largest pairwise intersection (at least 1).
pub fn check_b(h: &Hypergraph, requested: Option<usize>) -> Result<usize> {
    let bhat = h.simplicity().max_pair_intersection;
    match requested {
        Some(b) if b < bhat => bail!("instance has pairwise intersection {bhat} > b = {b}"),
        Some(b) => Ok(b.max(1)),
        None => Ok(bhat.max(1)),
    }
}

pub fn resolve_p(h: &Hypergraph, p: Option<f64>) -> Result<f64> {
    let p = p.unwrap_or_else(|| default_p(h.uniformity()));
    if !(0.0..=1.0).contains(&p) {
        bail!("p = {p} must lie in [0, 1]");
    }
    Ok(p)
}

fn check_r(r: u32) -> Result<()> {
    if r < 2 {
        bail!("r = {r} must be at least 2");
    }
    Ok(())
}

#[derive(Serialize)]
struct RunReport {
    success: bool,
    r: u32,
    #[serde(serialize_with = "ser_f64_17")]
    p: f64,
    seed: u64,
    attempts: u32,
    events: usize,
    coloring: Option<Vec<u32>>,
    monochromatic: Vec<usize>,
    checks: Option<Checked>,
    trace: Option<Trace>,
}

#[derive(Serialize)]
struct AggregateReport {
    r: u32,
    #[serde(serialize_with = "ser_f64_17")]
    p: f64,
    seed: u64,
    trials: u64,
    successes: u64,
    failures: u64,
    total_events: u64,
    total_attempts: u64,
    witness_trees: u64,
    structural_violations: u64,
}

pub fn cmd_color(a: ColorArgs) -> Result<Status> {
    check_r(a.r)?;
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if a.restarts == 0 {
        bail!("--restarts must be at least 1");
    }
    let h = read_instance(&a.input)?;
    let p = resolve_p(&h, a.p)?;
    let b = check_b(&h, a.b)?;
    if a.trials == 1 {
        single(&a, &h, p, b)
    } else {
        aggregate(&a, &h, p, b)
    }
}

fn single(a: &ColorArgs, h: &Hypergraph, p: f64, b: usize) -> Result<Status> {
    let res = run_with_restarts(h, a.r, p, a.seed, a.restarts);
    let trace = &res.trace;
    let mut coloring = None;
    if res.success {
        let c = trace.final_coloring();
        if !h.is_proper(&c)?.is_proper() {
            bail!("run reported success but the coloring is not proper");
        }
        coloring = Some(c.into_colors());
    }
    let checks = (!res.success && a.checks).then(|| check_failure(trace, h, b));
    let violation = checks.as_ref().and_then(|c| c.violation.clone());
    let report = RunReport {
        success: res.success,
        r: a.r,
        p,
        seed: trace.seed,
        attempts: res.attempts,
        events: trace.events.len(),
        coloring,
        monochromatic: match &trace.outcome {
            Outcome::Success => Vec::new(),
            Outcome::Failure(e) => e.clone(),
        },
        checks,
        trace: a.full_trace.then(|| trace.clone()),
    };
    match a.format {
        Format::Text => {
            println!("success: {}", report.success);
            println!("attempts: {}", report.attempts);
            println!("events: {}", report.events);
            if let Some(c) = &report.coloring {
                println!("coloring: {}", join(c));
            } else {
                println!("monochromatic: {}", join(&report.monochromatic));
            }
            if let Some(c) = &report.checks {
                println!("witness_trees: {}", c.trees.len());
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if let Some(v) = violation {
        bail!("structural violation: {v}");
    }
    Ok(Status::from_bool(report.success))
}

fn aggregate(a: &ColorArgs, h: &Hypergraph, p: f64, b: usize) -> Result<Status> {
    let per_trial: Vec<(bool, u64, u32, Option<Checked>)> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let res = run_with_restarts(h, a.r, p, rng::derive_seed(a.seed, rng::tag::TRIAL, i), a.restarts);
            let proper = res.success && h.is_proper(&res.trace.final_coloring()).is_ok_and(|x| x.is_proper());
            let checks = (!res.success && a.checks).then(|| check_failure(&res.trace, h, b));
            (proper, res.trace.events.len() as u64, res.attempts, checks)
        })
        .collect();
    let mut report = AggregateReport {
        r: a.r,
        p,
        seed: a.seed,
        trials: a.trials,
        successes: 0,
        failures: 0,
        total_events: 0,
        total_attempts: 0,
        witness_trees: 0,
        structural_violations: 0,
    };
    for (ok, events, attempts, checks) in &per_trial {
        if *ok {
            report.successes += 1;
        } else {
            report.failures += 1;
        }
        report.total_events += events;
        report.total_attempts += *attempts as u64;
        if let Some(c) = checks {
            report.witness_trees += c.trees.len() as u64;
            report.structural_violations += c.violation.is_some() as u64;
        }
    }
    match a.format {
        Format::Text => {
            println!("trials: {}", report.trials);
            println!("successes: {}", report.successes);
            println!("failures: {}", report.failures);
            println!("mean_events: {}", fmt17(report.total_events as f64 / report.trials as f64));
            println!("witness_trees: {}", report.witness_trees);
            println!("structural_violations: {}", report.structural_violations);
        }
        _ => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if report.structural_violations > 0 {
        bail!("{} structural violations", report.structural_violations);
    }
    Ok(Status::from_bool(report.failures == 0))
}

#[derive(Serialize)]
struct HtreeEntry {
    root_edge: usize,
    tree: HTree,
    proper: HTree,
    classification: DisjointnessReport,
    audit: TreeAudit,
}

#[derive(Serialize)]
struct HtreeReport {
    seed: u64,
    monochromatic: Vec<usize>,
    trees: Vec<HtreeEntry>,
}

pub fn cmd_htree(a: HtreeArgs) -> Result<Status> {
    let h = read_instance(&a.input)?;
    let b = check_b(&h, a.b)?;
    let trace: Trace = match &a.trace {
        Some(path) => {
            let text = read_string(path)?;
            let value: serde_json::Value = serde_json::from_str(&text).context("parsing trace")?;
            // accept a bare trace or a `color` report embedding one
            let inner = value.get("trace").cloned().unwrap_or(value);
            let t: Trace = serde_json::from_value(inner).context("parsing trace")?;
            t.verify(&h).context("trace does not match the instance")?;
            t
        }
        None => {
            check_r(a.r)?;
            run(&h, a.r, resolve_p(&h, a.p)?, a.seed)
        }
    };
    let trees = match extract_all(&trace, &h) {
        Err(WitnessError::NoWitness) => {
            eprintln!("run succeeded, there is no witness tree");
            return Ok(Status::Negative);
        }
        other => other?,
    };
    let audits = audit_failure(&trace, &h, b, default_degenerate_threshold(h.uniformity()), &EdgeOrder::by_index())
        .context("structural violation")?;
    let mut entries = Vec::with_capacity(trees.len());
    for (tree, audit) in trees.into_iter().zip(audits) {
        let proper = remove_coinciding(&tree, &EdgeOrder::by_index());
        let classification = classify(&proper, &h, b)?;
        entries.push(HtreeEntry {
            root_edge: tree.root().label,
            tree,
            proper,
            classification,
            audit,
        });
    }
    let report = HtreeReport {
        seed: trace.seed,
        monochromatic: entries.iter().map(|e| e.root_edge).collect(),
        trees: entries,
    };
    match a.format {
        Format::Text => {
            for e in &report.trees {
                println!(
                    "tree root={} size={} proper_size={} b_disjoint={} degenerate={}",
                    e.root_edge, e.audit.size, e.audit.proper_size, e.audit.b_disjoint, e.audit.degenerate
                );
                for (id, node) in e.proper.nodes().iter().enumerate() {
                    let parent = node.parent.map_or("-".to_string(), |x| x.to_string());
                    let blamer = node.blaming_vertex.map_or("-".to_string(), |x| x.to_string());
                    println!(
                        "  node {id} parent={parent} label={} color={} blamer={blamer}",
                        node.label, node.dominating_color
                    );
                }
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(Status::Positive)
}
