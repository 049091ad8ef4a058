//! Log-domain evaluation of the Local Lemma certificate for the recoloring
//! procedure.
//!
//! Every quantity is carried as a natural logarithm: `r^{n-b}` overflows any
//! fixed-width type long before the certificate can hold. The bounds w¹–w⁴
//! are evaluated at `z = 1/(1-τ₀)` with the per-variable factor `z^{nt}`
//! bounded by `e^t`.

mod bounds;
mod exact;
pub mod logmath;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::CertifyError;
use crate::format::{de_f64_17, ser_f64_17};

pub use bounds::{
    b1_event_probability, exact_b1_tail, ln_2e, ln_binomial_tail, sample_b1_event, w1_bound, w1_loose, w2_bound,
    w2_series, w3_bound, w3_series, w3_start, w4_bound, w4_cap, B1Tail, SeriesValue,
};
pub use exact::{e_bounds, floor_over_2e4, ln_biguint, power_numerator, ExactQuotient, EXACT_BITS_LIMIT};

/// `1/(n+1)`.
pub fn default_tau0(n: u64) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// `min(1, 5 ln n / n)`.
pub fn default_p(n: u64) -> f64 {
    let n = n as f64;
    (5.0 * n.ln() / n).min(1.0)
}

/// `ceil(20 e ln n)`, at least 1.
pub fn default_k(n: u64) -> u64 {
    (20.0 * std::f64::consts::E * (n as f64).ln()).ceil().max(1.0) as u64
}

/// The edge-degree bound `Δ`: always as a logarithm, and as an integer when
/// it came from one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    #[serde(rename = "log_delta", serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub ln: f64,
    #[serde(rename = "delta")]
    pub exact: Option<u64>,
}

impl Delta {
    pub fn from_count(d: u64) -> Self {
        Self {
            ln: if d == 0 { f64::NEG_INFINITY } else { (d as f64).ln() },
            exact: Some(d),
        }
    }

    /// A real-valued bound on the (integer) edge degree; below 1 it can
    /// only mean `Δ = 0`.
    pub fn from_ln(ln: f64) -> Self {
        if ln < 0.0 {
            Self::from_count(0)
        } else {
            Self { ln, exact: None }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub n: u64,
    pub r: u64,
    pub b: u64,
    #[serde(flatten)]
    pub delta: Delta,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub tau0: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub p: f64,
    pub k: u64,
}

impl CertificateParams {
    /// Parameters with the default `τ₀`, `p` and `K` for `n`.
    pub fn new(n: u64, r: u64, b: u64, delta: Delta) -> Result<Self, CertifyError> {
        let params = Self {
            n,
            r,
            b,
            delta,
            tau0: default_tau0(n),
            p: default_p(n),
            k: default_k(n),
        };
        params.validate()?;
        Ok(params)
    }

    /// `Δ` set to the theorem threshold `n r^{n-b} / (2e)^4`.
    pub fn at_threshold(n: u64, r: u64, b: u64) -> Result<Self, CertifyError> {
        let t = theorem_threshold(n, r, b)?;
        Self::new(n, r, b, Delta::from_ln(t.ln))
    }

    pub fn validate(&self) -> Result<(), CertifyError> {
        let bad = |m: String| Err(CertifyError::InvalidParams(m));
        if self.r < 2 {
            return bad(format!("r = {} must be at least 2", self.r));
        }
        if self.b < 1 {
            return bad("b must be at least 1".into());
        }
        if self.n <= self.b {
            return bad(format!("n = {} must exceed b = {}", self.n, self.b));
        }
        if !(self.tau0 > 0.0 && self.tau0 < 1.0) {
            return bad(format!("tau0 = {} must lie in (0, 1)", self.tau0));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} must lie in [0, 1]", self.p));
        }
        if self.k < 1 {
            return bad("K must be at least 1".into());
        }
        if self.delta.ln.is_nan() || self.delta.ln == f64::INFINITY {
            return bad("delta must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideConditions {
    /// `p < 1`.
    pub p_below_one: bool,
    /// `2p <= 1`, so the degenerate-label tail bounds a probability.
    pub b1_tail_is_probability: bool,
    /// `n - K - b >= 1`.
    pub free_room_positive: bool,
    /// `K + b < n/2`.
    pub k_plus_b_below_half_n: bool,
    pub w2_ratio_below_one: bool,
    pub w3_ratio_below_one: bool,
    /// `floor(30 e (ln n)^2) >= 1`.
    pub size_cap_positive: bool,
}

impl SideConditions {
    pub fn all(&self) -> bool {
        self.p_below_one
            && self.b1_tail_is_probability
            && self.free_room_positive
            && self.k_plus_b_below_half_n
            && self.w2_ratio_below_one
            && self.w3_ratio_below_one
            && self.size_cap_positive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub params: CertificateParams,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub log_w1: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub log_w2: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub log_w3: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub log_w4: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub log_w_total: f64,
    /// `ln` of the common term ratio of the w² and w³ series.
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub log_series_ratio: f64,
    pub side_conditions: SideConditions,
    /// Each `w^i <= 1/(10(n+1))`.
    pub per_bound_ok: [bool; 4],
    /// `w¹ + w² + w³ + w⁴ <= τ₀`.
    pub total_ok: bool,
    pub verdict: bool,
}

impl CertificateReport {
    pub fn log_bounds(&self) -> [f64; 4] {
        [self.log_w1, self.log_w2, self.log_w3, self.log_w4]
    }
}

/// Evaluates all four bounds and the side conditions.
pub fn certify(params: &CertificateParams) -> Result<CertificateReport, CertifyError> {
    params.validate()?;
    let log_w1 = w1_bound(params);
    let w2 = w2_series(params);
    let w3 = w3_series(params);
    let log_w4 = w4_bound(params);
    let log_w_total = logmath::log_sum_exp(&[log_w1, w2.log_value, w3.log_value, log_w4]);

    let room_ok = params.n.checked_sub(params.k).and_then(|x| x.checked_sub(params.b)).is_some_and(|m| m >= 1);
    let side_conditions = SideConditions {
        p_below_one: params.p < 1.0,
        b1_tail_is_probability: 2.0 * params.p <= 1.0,
        free_room_positive: room_ok,
        k_plus_b_below_half_n: 2 * (params.k + params.b) < params.n,
        w2_ratio_below_one: w2.converges,
        w3_ratio_below_one: w3.converges,
        size_cap_positive: w4_cap(params.n) >= 1,
    };
    let per_limit = -(10.0 * (params.n as f64 + 1.0)).ln();
    let per_bound_ok = [log_w1, w2.log_value, w3.log_value, log_w4].map(|w| w <= per_limit);
    let total_ok = log_w_total <= params.tau0.ln();
    Ok(CertificateReport {
        params: *params,
        log_w1,
        log_w2: w2.log_value,
        log_w3: w3.log_value,
        log_w4,
        log_w_total,
        log_series_ratio: w2.log_ratio,
        side_conditions,
        per_bound_ok,
        total_ok,
        verdict: side_conditions.all() && total_ok,
    })
}

fn ser_opt_biguint<S: Serializer>(x: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// A log-domain value with its exact floor when the big-integer path ran.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactLog {
    #[serde(rename = "log", serialize_with = "ser_f64_17")]
    pub ln: f64,
    /// `floor` of the value, as a decimal string.
    #[serde(serialize_with = "ser_opt_biguint")]
    pub floor: Option<BigUint>,
    /// `ln` of the value from the exact rational enclosure.
    #[serde(skip)]
    pub exact_ln: Option<f64>,
}

fn exact_log(ln: f64, numerator: Option<BigUint>) -> ExactLog {
    let q = numerator.as_ref().and_then(floor_over_2e4);
    ExactLog {
        ln,
        exact_ln: q.as_ref().map(ExactQuotient::ln),
        floor: q.map(|q| q.floor),
    }
}

fn check_nrb(n: u64, r: u64, b: u64, allow_b_eq_n: bool) -> Result<(), CertifyError> {
    if r < 2 || b < 1 || n < b || (n == b && !allow_b_eq_n) {
        return Err(CertifyError::InvalidParams(format!("need r >= 2, b >= 1, n > b (got n={n}, r={r}, b={b})")));
    }
    Ok(())
}

/// `n r^{n-b} / (2e)^4`, the largest edge degree the coloring guarantee covers.
pub fn theorem_threshold(n: u64, r: u64, b: u64) -> Result<ExactLog, CertifyError> {
    check_nrb(n, r, b, false)?;
    let ln = (n as f64).ln() + (n - b) as f64 * (r as f64).ln() - 4.0 * ln_2e();
    Ok(exact_log(ln, power_numerator(n, r, b, true)))
}

/// `r^{n-b} / (2e)^4`, the vertex-degree form of the threshold.
pub fn vertex_degree_bound(n: u64, r: u64, b: u64) -> Result<ExactLog, CertifyError> {
    check_nrb(n, r, b, true)?;
    let ln = (n - b) as f64 * (r as f64).ln() - 4.0 * ln_2e();
    Ok(exact_log(ln, power_numerator(n, r, b, false)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountBound {
    /// `ln` of the bound; `-∞` when the chain is not positive.
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub ln: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub ln_d: f64,
    #[serde(serialize_with = "ser_f64_17", deserialize_with = "de_f64_17")]
    pub ln_m: f64,
    pub positive: bool,
}

/// Above this, `ceil(d^{1/b})` is indistinguishable from `d^{1/b}` in `f64`.
const CEIL_LN_LIMIT: f64 = 36.0;

/// Lower bound on the edge count of a non-`r`-colorable `n`-uniform
/// `b`-simple hypergraph, from the chain `d = r^{n-2b}/(2e)^4`,
/// `m = ceil(d^{1/b})`, bound `= (d m - C(m, b+1)) / b`.
pub fn m_lower_bound(n: u64, r: u64, b: u64) -> Result<EdgeCountBound, CertifyError> {
    if r < 2 || b < 1 || n <= 2 * b {
        return Err(CertifyError::InvalidParams(format!("need r >= 2, b >= 1, n > 2b (got n={n}, r={r}, b={b})")));
    }
    let ln_d = (n - 2 * b) as f64 * (r as f64).ln() - 4.0 * ln_2e();
    let root = ln_d / b as f64;
    let (ln_m, ln_c) = if root <= CEIL_LN_LIMIT {
        let m = root.exp().ceil().max(1.0) as u64;
        ((m as f64).ln(), logmath::ln_choose(m, b + 1))
    } else {
        (root, logmath::ln_choose_big(root, b + 1))
    };
    match logmath::log_sub(ln_d + ln_m, ln_c) {
        Some(v) => Ok(EdgeCountBound {
            ln: v - (b as f64).ln(),
            ln_d,
            ln_m,
            positive: true,
        }),
        None => Ok(EdgeCountBound {
            ln: f64::NEG_INFINITY,
            ln_d,
            ln_m,
            positive: false,
        }),
    }
}

/// Smallest `n` (from the search below) at which the certificate holds with
/// `Δ` at the theorem threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinN {
    pub r: u64,
    pub b: u64,
    pub n_star: u64,
    /// Every `n` evaluated, with its verdict, in evaluation order.
    pub probes: Vec<(u64, bool)>,
}

/// Largest `n` the search will try.
pub const FIND_MIN_N_LIMIT: u64 = 1 << 50;

/// Doubles `n` from 10 until the verdict at the threshold is true, then
/// bisects down to an `n*` whose verdict is true while `n* - 1` is false.
pub fn find_min_n(r: u64, b: u64) -> Result<MinN, CertifyError> {
    let mut probes = Vec::new();
    let mut verdict = |n: u64| -> Result<bool, CertifyError> {
        let v = certify(&CertificateParams::at_threshold(n, r, b)?)?.verdict;
        probes.push((n, v));
        Ok(v)
    };
    let mut lo = (b + 1).max(10);
    if verdict(lo)? {
        return Ok(MinN { r, b, n_star: lo, probes });
    }
    let mut hi = lo;
    loop {
        hi = hi.checked_mul(2).filter(|&h| h <= FIND_MIN_N_LIMIT).ok_or(CertifyError::SearchExhausted(FIND_MIN_N_LIMIT))?;
        if verdict(hi)? {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if verdict(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MinN { r, b, n_star: hi, probes })
}

#[cfg(test)]
mod tests;
