//! `recolor`: generate instances, run the recoloring procedure, evaluate the
//! certificate, query the exact oracle and run batch experiments.
//!
//! Exit codes: 0 success (colorable, verdict true), 1 negative result,
//! 2 input, configuration or budget error.

mod color;
mod experiment;
mod io;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use recolor_core::certify::{self, CertificateParams, CertificateReport, Delta};
use recolor_core::format::fmt17;
use recolor_core::gen::{self, GenSpec};
use recolor_core::oracle::{self, OracleConfig, DEFAULT_BUDGET};
use recolor_core::OracleError;
use serde::Serialize;

/// Outcome of a successful command invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Positive,
    Negative,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Positive
        } else {
            Status::Negative
        }
    }
}

#[derive(Parser)]
#[command(name = "recolor", version, about = "Randomized recoloring of b-simple uniform hypergraphs")]
struct Cli {
    /// Worker threads; RAYON_NUM_THREADS is honored when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Run the recoloring procedure on an instance.
    Color(color::ColorArgs),
    /// Evaluate the coloring certificate.
    Certify(CertifyArgs),
    /// Decide r-colorability (or the chromatic number) exactly.
    Oracle(OracleArgs),
    /// Batch runs over generated instances, one CSV row per (instance, trial).
    Experiment(experiment::ExperimentArgs),
    /// Extract and check the witness trees of a failed run.
    Htree(color::HtreeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Rejection-sampled b-simple hypergraph.
    Bsimple,
    /// All n-subsets of N vertices.
    Complete,
    /// The Fano plane.
    Fano,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "bsimple")]
    family: Family,
    /// Uniformity.
    #[arg(long)]
    n: Option<usize>,
    /// Vertex count.
    #[arg(long = "N")]
    vertex_count: Option<usize>,
    /// Edge count.
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Largest pairwise intersection.
    #[arg(long, default_value_t = 1)]
    b: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Consecutive rejections before an attempt is abandoned.
    #[arg(long, default_value_t = gen::DEFAULT_MAX_REJECTIONS)]
    max_rejections: u64,
    /// Packing attempts before giving up.
    #[arg(long, default_value_t = gen::DEFAULT_MAX_ATTEMPTS)]
    max_attempts: u32,
    /// `text` or `json`.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, short)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Uniformity.
    #[arg(long, required_unless_present = "find_min_n")]
    n: Option<u64>,
    #[arg(long, default_value_t = 2)]
    r: u64,
    #[arg(long, default_value_t = 1)]
    b: u64,
    /// Edge-degree bound.
    #[arg(long, group = "degree")]
    delta: Option<u64>,
    /// Natural log of a real-valued edge-degree bound.
    #[arg(long, group = "degree", allow_hyphen_values = true)]
    log_delta: Option<f64>,
    /// Use the theorem threshold n r^(n-b) / (2e)^4 as the degree bound.
    #[arg(long, group = "degree")]
    at_threshold: bool,
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<u64>,
    /// Search for the least n certified at the threshold.
    #[arg(long, conflicts_with_all = ["n", "delta", "log_delta", "at_threshold", "tau0", "p", "k"])]
    find_min_n: bool,
    /// `json` or `text`.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file (`-` for stdin), text or JSON.
    #[arg(long, short)]
    input: String,
    /// Number of colors; omit to compute the chromatic number.
    #[arg(long)]
    r: Option<u32>,
    /// Search-node budget.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// `json` or `text`.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dispatch = move || match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Color(a) => color::cmd_color(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Experiment(a) => experiment::cmd_experiment(a),
        Command::Htree(a) => color::cmd_htree(a),
    };
    let result = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .context("building thread pool")
            .and_then(|pool| pool.install(dispatch)),
        None => dispatch(),
    };
    match result {
        Ok(Status::Positive) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<Status> {
    let h = match a.family {
        Family::Fano => gen::fano(),
        Family::Complete => {
            let (Some(n), Some(nv)) = (a.n, a.vertex_count) else {
                bail!("--family complete needs --n and --N");
            };
            gen::complete(n, nv)?
        }
        Family::Bsimple => {
            let (Some(n), Some(nv)) = (a.n, a.vertex_count) else {
                bail!("--family bsimple needs --n and --N");
            };
            let mut spec = GenSpec::new(n, nv, a.m, a.b, a.seed);
            spec.max_rejections = a.max_rejections;
            spec.max_attempts = a.max_attempts;
            gen::gen_bsimple(&spec)?
        }
    };
    let body = match a.format {
        Format::Text => recolor_core::format::to_text(&h),
        Format::Json => recolor_core::format::to_json(&h) + "\n",
        Format::Csv => bail!("gen writes text or json"),
    };
    io::write_output(a.out.as_deref(), &body)?;
    Ok(Status::Positive)
}

fn certify_params(a: &CertifyArgs, n: u64) -> Result<CertificateParams> {
    let delta = if a.at_threshold {
        Delta::from_ln(certify::theorem_threshold(n, a.r, a.b)?.ln)
    } else if let Some(d) = a.delta {
        Delta::from_count(d)
    } else if let Some(l) = a.log_delta {
        Delta::from_ln(l)
    } else {
        bail!("one of --delta, --log-delta, --at-threshold is required");
    };
    let mut params = CertificateParams::new(n, a.r, a.b, delta)?;
    if let Some(t) = a.tau0 {
        params.tau0 = t;
    }
    if let Some(p) = a.p {
        params.p = p;
    }
    if let Some(k) = a.k {
        params.k = k;
    }
    params.validate()?;
    Ok(params)
}

fn cmd_certify(a: CertifyArgs) -> Result<Status> {
    if a.find_min_n {
        let found = certify::find_min_n(a.r, a.b)?;
        match a.format {
            Format::Text => {
                println!("r: {}", found.r);
                println!("b: {}", found.b);
                println!("n_star: {}", found.n_star);
                println!("probes: {}", found.probes.len());
            }
            _ => println!("{}", serde_json::to_string_pretty(&found)?),
        }
        return Ok(Status::Positive);
    }
    let n = a.n.context("--n is required")?;
    let report = certify::certify(&certify_params(&a, n)?)?;
    match a.format {
        Format::Text => print!("{}", certify_text(&report)),
        _ => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(Status::from_bool(report.verdict))
}

fn certify_text(r: &CertificateReport) -> String {
    let p = &r.params;
    let s = &r.side_conditions;
    let mut out = format!("n: {}\nr: {}\nb: {}\n", p.n, p.r, p.b);
    out += &format!("log_delta: {}\ntau0: {}\np: {}\nk: {}\n", fmt17(p.delta.ln), fmt17(p.tau0), fmt17(p.p), p.k);
    for (i, w) in r.log_bounds().iter().enumerate() {
        out += &format!("log_w{}: {}  ok={}\n", i + 1, fmt17(*w), r.per_bound_ok[i]);
    }
    out += &format!("log_w_total: {}  ok={}\n", fmt17(r.log_w_total), r.total_ok);
    out += &format!("log_series_ratio: {}\n", fmt17(r.log_series_ratio));
    out += &format!(
        "side_conditions: p<1={} 2p<=1={} room>=1={} 2(K+b)<n={} w2_conv={} w3_conv={} cap>=1={}\n",
        s.p_below_one,
        s.b1_tail_is_probability,
        s.free_room_positive,
        s.k_plus_b_below_half_n,
        s.w2_ratio_below_one,
        s.w3_ratio_below_one,
        s.size_cap_positive
    );
    out += &format!("verdict: {}\n", r.verdict);
    out
}

#[derive(Serialize)]
struct OracleReport {
    r: Option<u32>,
    chromatic_number: Option<u32>,
    colorable: Option<bool>,
    witness: Option<Vec<u32>>,
    nodes_explored: Option<u64>,
}

fn cmd_oracle(a: OracleArgs) -> Result<Status> {
    let h = io::read_instance(&a.input)?;
    let cfg = OracleConfig {
        budget: a.budget,
        ..OracleConfig::default()
    };
    let (report, status) = match a.r {
        Some(r) => {
            let res = oracle::is_r_colorable(&h, r, &cfg)?;
            if let Some(w) = &res.witness {
                if !h.is_proper(w)?.is_proper() {
                    bail!("oracle witness is not a proper coloring");
                }
            }
            let status = Status::from_bool(res.colorable);
            let report = OracleReport {
                r: Some(r),
                chromatic_number: None,
                colorable: Some(res.colorable),
                witness: res.witness.map(|w| w.into_colors()),
                nodes_explored: Some(res.nodes_explored),
            };
            (report, status)
        }
        None => match oracle::chromatic_number(&h, &cfg) {
            Ok(chi) => (
                OracleReport {
                    r: None,
                    chromatic_number: Some(chi),
                    colorable: None,
                    witness: None,
                    nodes_explored: None,
                },
                Status::Positive,
            ),
            Err(OracleError::Uncolorable(e)) => {
                eprintln!("edge {e} has a single vertex, no proper coloring exists");
                return Ok(Status::Negative);
            }
            Err(e) => return Err(e.into()),
        },
    };
    match a.format {
        Format::Text => {
            if let Some(chi) = report.chromatic_number {
                println!("chromatic_number: {chi}");
            } else {
                println!("r: {}", a.r.unwrap_or_default());
                println!("colorable: {}", report.colorable.unwrap_or(false));
                println!("nodes_explored: {}", report.nodes_explored.unwrap_or(0));
                if let Some(w) = &report.witness {
                    println!("coloring: {}", io::join(w));
                }
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(status)
}
