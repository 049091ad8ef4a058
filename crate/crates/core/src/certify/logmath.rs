//! Log-domain arithmetic helpers.

use statrs::function::gamma::ln_gamma;

/// `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == f64::INFINITY || b == f64::INFINITY {
        return f64::INFINITY;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a - e^b)` for `a >= b`; `None` when the difference is not positive.
pub fn log_sub(a: f64, b: f64) -> Option<f64> {
    if b == f64::NEG_INFINITY {
        return Some(a);
    }
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Greater) || a == f64::INFINITY {
        return None;
    }
    Some(a + (-(b - a).exp()).ln_1p())
}

/// `ln Σ e^{x_i}`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Below this many factors `ln C(m, k)` is a direct sum of logarithms.
const DIRECT_TERMS: u64 = 100_000;

/// `ln C(m, k)`; `-∞` when `k > m`.
pub fn ln_choose(m: u64, k: u64) -> f64 {
    if k > m {
        return f64::NEG_INFINITY;
    }
    let k = k.min(m - k);
    if k == 0 {
        return 0.0;
    }
    if k <= DIRECT_TERMS {
        let mf = m as f64;
        let mut s = 0.0;
        for i in 0..k {
            let i = i as f64;
            s += (mf - i).ln() - (i + 1.0).ln();
        }
        s
    } else {
        ln_gamma(m as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((m - k) as f64 + 1.0)
    }
}

/// `ln C(m, k)` for a possibly astronomically large `m` given as `ln m`, and
/// a small `k`. Assumes `m >= k`.
pub fn ln_choose_big(ln_m: f64, k: u64) -> f64 {
    let inv_m = (-ln_m).exp();
    let mut s = 0.0;
    for i in 0..k {
        let i = i as f64;
        s += ln_m + (-i * inv_m).ln_1p() - (i + 1.0).ln();
    }
    s
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    if k <= DIRECT_TERMS {
        (2..=k).map(|i| (i as f64).ln()).sum()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}
