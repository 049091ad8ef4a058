//! Batch experiments. Rows are computed in parallel and emitted in
//! `(instance, trial)` order.
//!
//! Seeds: instance `i` is generated with `derive_seed(seed, INSTANCE, i)`;
//! trial `j` on it runs with `derive_seed(derive_seed(seed, COLOR, i), TRIAL, j)`.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use rayon::prelude::*;
use recolor_core::certify::{certify, CertificateParams, Delta};
use recolor_core::format::{fmt17, ser_f64_17};
use recolor_core::gen::{gen_bsimple, GenSpec};
use recolor_core::recolor::run_with_restarts;
use recolor_core::rng::{derive_seed, tag};
use recolor_core::Hypergraph;
use serde::Serialize;

use crate::color::{check_b, check_failure, resolve_p};
use crate::io::{read_instance, write_output};
use crate::{Format, Status};

/// CSV column order.
pub const COLUMNS: [&str; 16] = [
    "instance",
    "trial",
    "seed",
    "n",
    "vertex_count",
    "edge_count",
    "delta",
    "bhat",
    "r",
    "p",
    "success",
    "events",
    "restarts",
    "structural_violations",
    "certified",
    "log_w_total",
];

#[derive(Args)]
pub struct ExperimentArgs {
    /// Use one instance file instead of generated instances.
    #[arg(long, short, conflicts_with_all = ["instances", "n", "vertex_count", "m", "b"])]
    input: Option<String>,
    /// Number of generated instances.
    #[arg(long, default_value_t = 100)]
    instances: u64,
    /// Uniformity of generated instances.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Vertex count of generated instances.
    #[arg(long = "N", default_value_t = 40)]
    vertex_count: usize,
    /// Edge count of generated instances.
    #[arg(long, default_value_t = 24)]
    m: usize,
    /// Intersection bound of generated instances.
    #[arg(long, default_value_t = 1)]
    b: usize,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Free-vertex probability; defaults to min(1, 5 ln n / n).
    #[arg(long)]
    p: Option<f64>,
    /// Trials per instance.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Runs per trial before giving up.
    #[arg(long, default_value_t = 1)]
    restarts: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the witness trees of every failed run.
    #[arg(long)]
    checks: bool,
    /// `csv`, `json` or `text`.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct Row {
    instance: u64,
    trial: u64,
    seed: u64,
    n: usize,
    vertex_count: usize,
    edge_count: usize,
    delta: usize,
    bhat: usize,
    r: u32,
    #[serde(serialize_with = "ser_f64_17")]
    p: f64,
    success: bool,
    events: usize,
    restarts: u32,
    structural_violations: u32,
    certified: bool,
    #[serde(serialize_with = "ser_opt_f64_17")]
    log_w_total: Option<f64>,
}

fn ser_opt_f64_17<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_f64_17(v, s),
        None => s.serialize_none(),
    }
}

impl Row {
    fn fields(&self) -> Vec<String> {
        vec![
            self.instance.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.n.to_string(),
            self.vertex_count.to_string(),
            self.edge_count.to_string(),
            self.delta.to_string(),
            self.bhat.to_string(),
            self.r.to_string(),
            fmt17(self.p),
            self.success.to_string(),
            self.events.to_string(),
            self.restarts.to_string(),
            self.structural_violations.to_string(),
            self.certified.to_string(),
            self.log_w_total.map(fmt17).unwrap_or_default(),
        ]
    }
}

struct Instance {
    index: u64,
    h: Hypergraph,
    delta: usize,
    bhat: usize,
    certified: bool,
    log_w_total: Option<f64>,
}

impl Instance {
    fn new(index: u64, h: Hypergraph, r: u32) -> Self {
        let delta = h.max_edge_degree();
        let bhat = h.simplicity().max_pair_intersection;
        let report = CertificateParams::new(h.uniformity() as u64, r as u64, bhat.max(1) as u64, Delta::from_count(delta as u64))
            .and_then(|params| certify(&params))
            .ok();
        Self {
            index,
            delta,
            bhat,
            certified: report.as_ref().is_some_and(|rep| rep.verdict),
            log_w_total: report.map(|rep| rep.log_w_total),
            h,
        }
    }
}

pub fn cmd_experiment(a: ExperimentArgs) -> Result<Status> {
    if a.r < 2 {
        bail!("r = {} must be at least 2", a.r);
    }
    if a.trials == 0 || a.restarts == 0 {
        bail!("--trials and --restarts must be at least 1");
    }
    let a = &a;
    let instances: Vec<Instance> = match &a.input {
        Some(path) => vec![Instance::new(0, read_instance(path)?, a.r)],
        None => (0..a.instances)
            .into_par_iter()
            .map(|i| {
                let spec = GenSpec::new(a.n, a.vertex_count, a.m, a.b, derive_seed(a.seed, tag::INSTANCE, i));
                let h = gen_bsimple(&spec).with_context(|| format!("generating instance {i}"))?;
                Ok(Instance::new(i, h, a.r))
            })
            .collect::<Result<_>>()?,
    };
    let jobs: Vec<(&Instance, u64)> = instances.iter().flat_map(|inst| (0..a.trials).map(move |j| (inst, j))).collect();
    let rows: Vec<Row> = jobs
        .into_par_iter()
        .map(|(inst, j)| trial(a, inst, j))
        .collect::<Result<_>>()?;
    let body = match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for row in &rows {
                w.write_record(row.fields())?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Text => rows
            .iter()
            .map(|row| {
                COLUMNS
                    .iter()
                    .zip(row.fields())
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
                    + "\n"
            })
            .collect(),
    };
    write_output(a.out.as_deref(), &body)?;
    let violations: u32 = rows.iter().map(|r| r.structural_violations).sum();
    if violations > 0 {
        eprintln!("{violations} structural violations");
    }
    Ok(Status::from_bool(violations == 0))
}

fn trial(a: &ExperimentArgs, inst: &Instance, j: u64) -> Result<Row> {
    let h = &inst.h;
    let p = resolve_p(h, a.p)?;
    let seed = derive_seed(derive_seed(a.seed, tag::COLOR, inst.index), tag::TRIAL, j);
    let res = run_with_restarts(h, a.r, p, seed, a.restarts);
    let success = res.success && h.is_proper(&res.trace.final_coloring())?.is_proper();
    let mut violations = 0;
    if !res.success && a.checks {
        let checked = check_failure(&res.trace, h, check_b(h, None)?);
        if let Some(v) = checked.violation {
            eprintln!("instance {} trial {j}: {v}", inst.index);
            violations = 1;
        }
    }
    Ok(Row {
        instance: inst.index,
        trial: j,
        seed,
        n: h.uniformity(),
        vertex_count: h.vertex_count(),
        edge_count: h.edge_count(),
        delta: inst.delta,
        bhat: inst.bhat,
        r: a.r,
        p,
        success,
        events: res.trace.events.len(),
        restarts: res.attempts,
        structural_violations: violations,
        certified: inst.certified,
        log_w_total: inst.log_w_total,
    })
}
