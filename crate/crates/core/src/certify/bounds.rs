//! The four local-polynomial bounds and the degenerate-label tail.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::logmath::{ln_choose, log_add, log_sub};
use super::CertificateParams;

/// Stop summing once the next terms can change the sum by less than this, relatively.
const REL_TOL_LN: f64 = -69.077_552_789_821_37; // ln 1e-30

/// Hard cap on explicit series terms; a closed-form geometric tail covers the rest.
const MAX_TERMS: u64 = 2_000_000;

/// `ln(2e)`.
pub fn ln_2e() -> f64 {
    std::f64::consts::LN_2 + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B1Tail {
    /// `ln(r^{1-n} Σ_{k>=K} C(n,k)(2p)^k)`.
    pub log_value: f64,
    /// False when `2p > 1`: the sum then no longer bounds a probability.
    pub is_probability: bool,
}

/// `ln Σ_{k=K}^{n} C(n,k) q^k`, summed outward from `K` on whichever side of
/// the mode `K` lies.
pub fn ln_binomial_tail(n: u64, q: f64, k0: u64) -> f64 {
    if k0 > n {
        return f64::NEG_INFINITY;
    }
    if q == 0.0 {
        return if k0 == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let ln_q = q.ln();
    let nf = n as f64;
    // terms grow while q(n-k) >= k+1
    let mode = (((q * nf - 1.0) / (1.0 + q)).floor() + 1.0).clamp(0.0, nf) as u64;
    let term = |k: u64| ln_choose(n, k) + k as f64 * ln_q;
    if k0 == 0 {
        return nf * q.ln_1p();
    }
    if k0 >= mode {
        upward(n, ln_q, k0, term(k0))
    } else {
        let total = nf * q.ln_1p();
        let below = downward(n, ln_q, k0, term(k0 - 1));
        match log_sub(total, below) {
            Some(v) => v,
            // the lower part swallowed everything to rounding; sum directly
            None => upward(n, ln_q, k0, term(k0)),
        }
    }
}

/// `ln Σ_{k>=k0} t_k` with `t_{k+1}/t_k = q (n-k)/(k+1)` decreasing and < 1 from `k0` on.
fn upward(n: u64, ln_q: f64, k0: u64, first: f64) -> f64 {
    let mut sum = first;
    let mut term = first;
    let mut k = k0;
    while k < n {
        let ln_ratio = ((n - k) as f64).ln() - ((k + 1) as f64).ln() + ln_q;
        term += ln_ratio;
        k += 1;
        sum = log_add(sum, term);
        if ln_ratio < 0.0 {
            // the rest is at most term * ρ / (1 - ρ)
            let rest = term + ln_ratio - (-ln_ratio.exp()).ln_1p();
            if rest - sum < REL_TOL_LN {
                break;
            }
        }
        if k - k0 > MAX_TERMS {
            break;
        }
    }
    sum
}

/// `ln Σ_{k<k0} t_k`, walking down from `t_{k0-1}`.
fn downward(n: u64, ln_q: f64, k0: u64, first: f64) -> f64 {
    let mut sum = first;
    let mut term = first;
    let mut k = k0 - 1;
    while k > 0 {
        // t_{k-1}/t_k = k / (q (n-k+1))
        let ln_ratio = (k as f64).ln() - ((n - k + 1) as f64).ln() - ln_q;
        term += ln_ratio;
        k -= 1;
        sum = log_add(sum, term);
        if ln_ratio < 0.0 {
            let rest = term + ln_ratio - (-ln_ratio.exp()).ln_1p();
            if rest - sum < REL_TOL_LN {
                break;
            }
        }
        if k0 - k > MAX_TERMS {
            break;
        }
    }
    sum
}

/// `r^{1-n} Σ_{k>=K} C(n,k)(2p)^k`, the union bound on the degenerate-label
/// event of one edge.
pub fn exact_b1_tail(n: u64, r: u64, p: f64, k: u64) -> B1Tail {
    let q = 2.0 * p;
    B1Tail {
        log_value: (1.0 - n as f64) * (r as f64).ln() + ln_binomial_tail(n, q, k),
        is_probability: q <= 1.0,
    }
}

/// Exact probability that an `n`-vertex edge is initially colored only with
/// `α` and `α-1` for some `α`, every vertex colored `α-1` is free, and at
/// least `K` vertices are free. Returned as a plain probability.
///
/// For one `α` this is `r^{-n} Σ_{k>=K} C(n,k)(2p)^k (1-p)^{n-k}`. Two such
/// events overlap only when every vertex is free: for `r = 2` the two
/// events share all-free colorings (probability `p^n`), for `r >= 3` the
/// `r` cyclically adjacent pairs share the all-free colorings in the single
/// common color (`(p/r)^n` each), and no three events meet.
pub fn b1_event_probability(n: u64, r: u64, p: f64, k: u64) -> f64 {
    let rf = r as f64;
    let nf = n as f64;
    let per_alpha = if p >= 1.0 {
        // only k = n survives
        if k <= n {
            (nf * (2.0 / rf).ln()).exp()
        } else {
            0.0
        }
    } else {
        let s = ln_binomial_tail(n, (2.0 * p) / (1.0 - p), k) + nf * (-p).ln_1p();
        (s - nf * rf.ln()).exp()
    };
    let overlap = if k <= n {
        if r == 2 {
            p.powf(nf)
        } else {
            rf * (p / rf).powf(nf)
        }
    } else {
        0.0
    };
    (rf * per_alpha - overlap).clamp(0.0, 1.0)
}

/// Samples one edge's initial colors and weights and reports whether the
/// event of [`b1_event_probability`] occurred.
pub fn sample_b1_event<R: Rng>(rng: &mut R, n: u64, r: u64, p: f64, k: u64) -> bool {
    let mut colors = Vec::with_capacity(n as usize);
    let mut free = Vec::with_capacity(n as usize);
    for _ in 0..n {
        colors.push(rng.gen_range(0..r));
        free.push(rng.gen::<f64>() <= p);
    }
    if (free.iter().filter(|&&f| f).count() as u64) < k {
        return false;
    }
    (0..r).any(|alpha| {
        let below = (alpha + r - 1) % r;
        colors
            .iter()
            .zip(&free)
            .all(|(&c, &f)| c == alpha || (c == below && f))
    })
}

/// `ln w¹ = ln(2Δ e) + ln tail`.
pub fn w1_bound(params: &CertificateParams) -> f64 {
    let tail = exact_b1_tail(params.n, params.r, params.p, params.k);
    2f64.ln() + params.delta.ln + 1.0 + tail.log_value
}

/// Outcome of a geometric-type series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub log_value: f64,
    /// `ln` of the term ratio; the series converges iff this is negative.
    pub log_ratio: f64,
    pub converges: bool,
}

/// `n - K - b` when positive.
fn free_room(params: &CertificateParams) -> Option<u64> {
    params.n.checked_sub(params.k)?.checked_sub(params.b).filter(|&m| m >= 1)
}

/// Common log-term of w² and w³ at `t`, without the `(1-p)` factor:
/// `ln[2 (4Δ)^t e^t r^{1-n-(n-b)(t-1)} (n-K-b)^{-(t-1)}]`.
fn tree_term(params: &CertificateParams, room: u64, t: u64) -> f64 {
    let ln_r = (params.r as f64).ln();
    let (n, b) = (params.n as f64, params.b as f64);
    let t1 = (t - 1) as f64;
    let count = if params.delta.is_zero() {
        // a lone edge is the only tree
        if t == 1 {
            2f64.ln()
        } else {
            f64::NEG_INFINITY
        }
    } else {
        2f64.ln() + t as f64 * (4f64.ln() + params.delta.ln)
    };
    count + t as f64 + (1.0 - n - (n - b) * t1) * ln_r - t1 * (room as f64).ln()
}

/// `ln` of the term ratio `4Δ e r^{-(n-b)} / (n-K-b)`.
fn tree_ratio(params: &CertificateParams, room: u64) -> f64 {
    4f64.ln() + params.delta.ln + 1.0 - (params.n - params.b) as f64 * (params.r as f64).ln() - (room as f64).ln()
}

/// `ln Σ_{t>=t0} a_{t0} ρ^{t-t0}`, accumulated term by term until the
/// relative change drops below `1e-30`, with a closed-form remainder after
/// [`MAX_TERMS`] terms.
fn geometric(first: f64, log_ratio: f64) -> f64 {
    if first == f64::NEG_INFINITY || log_ratio == f64::NEG_INFINITY {
        return first;
    }
    let mut sum = first;
    let mut term = first;
    for _ in 0..MAX_TERMS {
        term += log_ratio;
        let next = log_add(sum, term);
        let change = term - next;
        sum = next;
        if change < REL_TOL_LN {
            return sum;
        }
    }
    log_add(sum, term + log_ratio - (-log_ratio.exp()).ln_1p())
}

fn tree_series(params: &CertificateParams, t0: u64, with_free_factor: bool) -> SeriesValue {
    let Some(room) = free_room(params) else {
        return SeriesValue {
            log_value: f64::INFINITY,
            log_ratio: f64::INFINITY,
            converges: false,
        };
    };
    let log_ratio = if params.delta.is_zero() { f64::NEG_INFINITY } else { tree_ratio(params, room) };
    if log_ratio >= 0.0 {
        return SeriesValue {
            log_value: f64::INFINITY,
            log_ratio,
            converges: false,
        };
    }
    let factor = if with_free_factor { room as f64 * (-params.p).ln_1p() } else { 0.0 };
    let first = tree_term(params, room, t0) + factor;
    SeriesValue {
        log_value: geometric(first, log_ratio),
        log_ratio,
        converges: true,
    }
}

/// `ln w²`: trees of every size `t >= 1`, including the `(1-p)^{n-K-b}` factor.
pub fn w2_series(params: &CertificateParams) -> SeriesValue {
    tree_series(params, 1, true)
}

pub fn w2_bound(params: &CertificateParams) -> f64 {
    w2_series(params).log_value
}

/// First tree size counted by w³: `max(1, ceil(ln n))`.
pub fn w3_start(n: u64) -> u64 {
    ((n as f64).ln().ceil() as u64).max(1)
}

/// `ln w³`: the w² terms without the `(1-p)` factor, for `t >= ceil(ln n)`.
pub fn w3_series(params: &CertificateParams) -> SeriesValue {
    tree_series(params, w3_start(params.n), false)
}

pub fn w3_bound(params: &CertificateParams) -> f64 {
    w3_series(params).log_value
}

/// `floor(30 e (ln n)^2)`, the largest tree size counted by w⁴.
pub fn w4_cap(n: u64) -> u64 {
    let l = (n as f64).ln();
    (30.0 * std::f64::consts::E * l * l).floor() as u64
}

/// `ln w⁴ = ln Σ_{t=1}^{cap} 4·4^t t² Δ^{t-1} C(nt, b+1) min(1, r^{1-t(n-bt)}) e^t`.
pub fn w4_bound(params: &CertificateParams) -> f64 {
    let cap = if params.delta.is_zero() { w4_cap(params.n).min(1) } else { w4_cap(params.n) };
    let ln_r = (params.r as f64).ln();
    let (n, b) = (params.n as f64, params.b as f64);
    let mut sum = f64::NEG_INFINITY;
    for t in 1..=cap {
        let tf = t as f64;
        let ln_delta_pow = if t == 1 { 0.0 } else { (tf - 1.0) * params.delta.ln };
        let ln_prob = ((1.0 - tf * (n - b * tf)) * ln_r).min(0.0);
        let ln_vbl = ln_choose(params.n.saturating_mul(t), params.b + 1);
        let term = 4f64.ln() + tf * 4f64.ln() + 2.0 * tf.ln() + ln_delta_pow + ln_vbl + ln_prob + tf;
        sum = log_add(sum, term);
    }
    sum
}

/// The loosened closed form `(1/(4e³)) r^{1-b} n^{-9}` that w¹ is compared against.
pub fn w1_loose(n: u64, r: u64, b: u64) -> f64 {
    -(4f64.ln() + 3.0) + (1.0 - b as f64) * (r as f64).ln() - 9.0 * (n as f64).ln()
}
