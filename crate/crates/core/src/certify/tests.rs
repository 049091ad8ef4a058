use num_bigint::BigUint;
use num_integer::Integer;

use super::logmath::ln_choose;
use super::*;

const E50: &str = "271828182845904523536028747135266249775724709369995";

/// `floor(x / (2e)^4)` from a 50-digit decimal enclosure of `e`.
fn floor_by_digits(x: &BigUint) -> (BigUint, BigUint) {
    let lo: BigUint = E50.parse().unwrap();
    let hi = &lo + 1u32;
    let scale = BigUint::from(10u32).pow(50 * 4);
    let q = |e: &BigUint| (x * &scale).div_floor(&(BigUint::from(16u32) * e.pow(4)));
    (q(&hi), q(&lo))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn threshold_ratio_and_substitution() {
    for (n, r) in [(20, 2), (50, 3), (1000, 5)] {
        let a = theorem_threshold(n, r, 1).unwrap().ln;
        let b = theorem_threshold(n, r, 2).unwrap().ln;
        assert!((a - b - (r as f64).ln()).abs() < 1e-9 * a.abs());
    }
    let t = theorem_threshold(7, 3, 6).unwrap();
    assert!((t.ln - (21f64.ln() - 4.0 * (2.0 * std::f64::consts::E).ln())).abs() < 1e-14);
    assert!(theorem_threshold(3, 2, 3).is_err());
    assert!(theorem_threshold(3, 1, 1).is_err());
}

#[test]
fn threshold_floor_n20() {
    let t = theorem_threshold(20, 2, 1).unwrap();
    let x = BigUint::from(20u32 * (1 << 19));
    let (lo, hi) = floor_by_digits(&x);
    assert_eq!(lo, hi);
    assert_eq!(t.floor, Some(lo.clone()));
    assert_eq!(lo, BigUint::from(t.ln.exp().floor() as u64));
    assert!(rel(t.exact_ln.unwrap(), t.ln) < 1e-9);
}

#[test]
fn vertex_degree_bound_examples() {
    for (n, r, b) in [(20, 2, 1), (40, 3, 2), (500, 2, 7)] {
        let v = vertex_degree_bound(n, r, b).unwrap().ln;
        let t = theorem_threshold(n, r, b).unwrap().ln;
        assert!((t - v - (n as f64).ln()).abs() < 1e-9);
    }
    let at_n = vertex_degree_bound(9, 2, 9).unwrap();
    assert!((at_n.ln + 4.0 * (2.0 * std::f64::consts::E).ln()).abs() < 1e-14);
    assert_eq!(at_n.floor, Some(BigUint::from(0u32)));

    let v = vertex_degree_bound(30, 2, 1).unwrap();
    let (lo, hi) = floor_by_digits(&BigUint::from(1u64 << 29));
    assert_eq!(lo, hi);
    assert_eq!(v.floor, Some(lo));
    assert!(rel(v.exact_ln.unwrap(), v.ln) < 1e-9);
}

#[test]
fn exact_path_matches_float_path() {
    for (n, r, b) in [(60, 2, 1), (200, 3, 2), (1000, 2, 3), (3000, 4, 1)] {
        let t = theorem_threshold(n, r, b).unwrap();
        assert!(t.floor.is_some());
        assert!(rel(t.exact_ln.unwrap(), t.ln) < 1e-9, "n={n} r={r} b={b}");
    }
    // past the size limit only the float path runs
    assert!(theorem_threshold(100_000, 2, 1).unwrap().floor.is_none());
}

#[test]
fn b1_tail_examples() {
    assert_eq!(exact_b1_tail(4, 2, 0.25, 5).log_value, f64::NEG_INFINITY);
    let v = exact_b1_tail(4, 2, 0.25, 2);
    assert!(v.is_probability);
    assert!(rel(v.log_value.exp(), 0.2578125) < 1e-14);
    for (n, r, p) in [(12u64, 2u64, 0.3f64), (50, 3, 0.01), (1000, 2, 0.2), (7, 5, 0.9)] {
        let closed = (1.0 - n as f64) * (r as f64).ln() + n as f64 * (2.0 * p).ln_1p();
        assert!(rel(exact_b1_tail(n, r, p, 0).log_value, closed) < 1e-12);
    }
    assert!(!exact_b1_tail(7, 5, 0.9, 0).is_probability);
}

#[test]
fn binomial_tail_against_direct_sum() {
    for &(n, q) in &[(30u64, 0.4), (30, 1.0), (200, 0.05), (200, 1.7), (1, 0.5)] {
        for k in 0..=n + 1 {
            let direct: f64 = (k..=n).map(|j| (ln_choose(n, j) + j as f64 * f64::ln(q)).exp()).sum();
            let got = ln_binomial_tail(n, q, k).exp();
            if direct == 0.0 {
                assert_eq!(got, 0.0);
            } else {
                assert!(rel(got, direct) < 1e-10, "n={n} q={q} k={k}: {got} vs {direct}");
            }
        }
    }
}

#[test]
fn b1_event_probability_by_enumeration() {
    // sum over colorings of Pr[free pattern makes the event hold]
    fn oracle(n: u32, r: u32, p: f64, k: u64) -> f64 {
        let mut total = 0.0;
        for code in 0..r.pow(n) {
            let mut colors = Vec::new();
            let mut c = code;
            for _ in 0..n {
                colors.push(c % r);
                c /= r;
            }
            // over free subsets: each vertex free w.p. p
            let mut prob = 0.0;
            for mask in 0u32..(1 << n) {
                let free = |v: usize| mask >> v & 1 == 1;
                if (mask.count_ones() as u64) < k {
                    continue;
                }
                let ok = (0..r).any(|a| {
                    let below = (a + r - 1) % r;
                    colors.iter().enumerate().all(|(v, &c)| c == a || (c == below && free(v)))
                });
                if ok {
                    let f = mask.count_ones() as i32;
                    prob += p.powi(f) * (1.0 - p).powi(n as i32 - f);
                }
            }
            total += prob / (r as f64).powi(n as i32);
        }
        total
    }
    for (n, r, p, k) in [(5, 2, 0.3, 2), (4, 3, 0.5, 1), (6, 2, 1.0, 3), (4, 4, 0.7, 0), (5, 3, 0.2, 6)] {
        let want = oracle(n, r, p, k);
        let got = b1_event_probability(n as u64, r as u64, p, k);
        assert!((got - want).abs() < 1e-12, "n={n} r={r} p={p} k={k}: {got} vs {want}");
    }
}

fn params(n: u64, r: u64, b: u64, delta: u64) -> CertificateParams {
    CertificateParams::new(n, r, b, Delta::from_count(delta)).unwrap()
}

#[test]
fn w1_examples() {
    assert_eq!(w1_bound(&params(1000, 2, 1, 0)), f64::NEG_INFINITY);
    let a = w1_bound(&params(1000, 2, 1, 10));
    let b = w1_bound(&params(1000, 2, 1, 11));
    assert!(a < b);
    let mut p = params(1000, 2, 1, 10);
    p.p = 0.05;
    assert!(w1_bound(&p) > a);
}

#[test]
fn w1_below_loosened_form() {
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        for (r, b) in [(2u64, 1u64), (2, 2), (3, 1)] {
            let p = CertificateParams::at_threshold(n, r, b).unwrap();
            assert!(w1_bound(&p) <= w1_loose(n, r, b), "n={n} r={r} b={b}");
        }
    }
}

#[test]
fn w2_examples() {
    let n = 1000;
    let p = params(n, 2, 1, 0);
    let room = (n - p.k - 1) as f64;
    let want = 2f64.ln() + 1.0 + (1.0 - n as f64) * 2f64.ln() + room * (-p.p).ln_1p();
    assert!(rel(w2_bound(&p), want) < 1e-12);

    let p = CertificateParams::at_threshold(2000, 2, 1).unwrap();
    let s = w2_series(&p);
    assert!(s.converges);
    let room = (2000 - p.k - 1) as f64;
    let ratio = 2000.0 / (4.0 * std::f64::consts::E.powi(3) * room);
    assert!((s.log_ratio - ratio.ln()).abs() < 1e-6);
    // geometric closed form a_1 / (1 - ρ)
    let a1 = 2f64.ln() + 4f64.ln() + p.delta.ln + 1.0 + (1.0 - 2000.0) * 2f64.ln() + room * (-p.p).ln_1p();
    assert!(rel(s.log_value, a1 - (-ratio).ln_1p()) < 1e-9);

    let mut zero_p = p;
    zero_p.p = 0.0;
    assert!(w2_bound(&zero_p) > w2_bound(&p));
}

#[test]
fn w2_divergence_and_room() {
    let mut p = params(1000, 2, 1, 1);
    p.delta = Delta::from_ln(2000.0);
    let s = w2_series(&p);
    assert!(!s.converges);
    assert_eq!(s.log_value, f64::INFINITY);
    let r = certify(&p).unwrap();
    assert!(!r.side_conditions.w2_ratio_below_one);
    assert!(!r.verdict);
    // n - K - b < 1
    let small = params(50, 2, 1, 1);
    assert_eq!(w2_bound(&small), f64::INFINITY);
    assert!(!certify(&small).unwrap().side_conditions.free_room_positive);
}

#[test]
fn w3_examples() {
    assert_eq!(w3_bound(&params(1000, 2, 1, 0)), f64::NEG_INFINITY);
    let p = CertificateParams::at_threshold(100_000, 2, 1).unwrap();
    let w2 = w2_series(&p);
    let w3 = w3_series(&p);
    let room = (p.n - p.k - p.b) as f64;
    // tail of w2 from ceil(ln n), with the (1-p) factor removed
    let t0 = w3_start(p.n) as f64;
    let a1 = w2.log_value + (-w2.log_ratio.exp()).ln_1p();
    let tail = a1 + (t0 - 1.0) * w2.log_ratio - (-w2.log_ratio.exp()).ln_1p() - room * (-p.p).ln_1p();
    assert!(w3.log_value >= tail - 1e-9 * tail.abs());

    let grid: Vec<f64> = [1e6, 3e6, 1e7, 3e7, 1e8]
        .iter()
        .map(|&n| w3_bound(&CertificateParams::at_threshold(n as u64, 2, 1).unwrap()))
        .collect();
    assert!(grid.iter().all(|v| v.is_finite()));
    assert!(grid.windows(2).all(|w| w[1] < w[0]), "{grid:?}");
}

#[test]
fn w4_single_term() {
    for (n, r, b) in [(20u64, 2u64, 1u64), (200, 3, 2), (50, 2, 4)] {
        let p = params(n, r, b, 0);
        let want = 16f64.ln() + ln_choose(n, b + 1) + ((1.0 - (n - b) as f64) * (r as f64).ln()).min(0.0) + 1.0;
        assert!(rel(w4_bound(&p), want) < 1e-12);
    }
    assert!(w4_cap(2) >= 1);
}

#[test]
fn w4_crossing_is_monotone() {
    let limit = |n: u64| -(10.0 * (n as f64 + 1.0)).ln();
    let ok = |n: u64| w4_bound(&CertificateParams::at_threshold(n, 2, 1).unwrap()) <= limit(n);
    let mut lo = 10u64;
    let mut hi = 20u64;
    while !ok(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let grid: Vec<u64> = (0..20).map(|i| hi + i * hi / 4).collect();
    assert!(grid.iter().all(|&n| ok(n)), "w4 crosses back above the limit past n* = {hi}");
    assert!(!ok(hi - 1));
}

#[test]
fn certify_delta_zero_and_small_n() {
    let r = certify(&params(1000, 2, 1, 0)).unwrap();
    assert!(r.verdict, "{r:?}");
    let at10 = certify(&CertificateParams::at_threshold(10, 2, 1).unwrap()).unwrap();
    assert!(!at10.verdict);
    let json = serde_json::to_string(&r).unwrap();
    let back: CertificateReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn param_validation() {
    assert!(CertificateParams::new(3, 1, 1, Delta::from_count(1)).is_err());
    assert!(CertificateParams::new(3, 2, 0, Delta::from_count(1)).is_err());
    assert!(CertificateParams::new(3, 2, 3, Delta::from_count(1)).is_err());
    let mut p = params(10, 2, 1, 1);
    p.tau0 = 1.0;
    assert!(certify(&p).is_err());
    p.tau0 = 0.5;
    p.p = 1.5;
    assert!(certify(&p).is_err());
}

#[test]
fn m_lower_bound_examples() {
    // b = 1: d m - m(m-1)/2 with m = d, i.e. about d^2/2
    for n in [100u64, 300, 1000] {
        let got = m_lower_bound(n, 2, 1).unwrap();
        let want = 2.0 * (n - 2) as f64 * 2f64.ln() - 8.0 * (2.0 * std::f64::consts::E).ln() - 2f64.ln();
        assert!(got.positive);
        assert!(rel(got.ln, want) < 1e-9, "n={n}: {} vs {want}", got.ln);
    }
    // small n: m = ceil(d^{1/b}) exactly and the direct formula applies
    for (n, r, b) in [(3u64, 2u64, 1u64), (20, 2, 1), (25, 3, 2), (40, 2, 3)] {
        let got = m_lower_bound(n, r, b).unwrap();
        let d = ((n - 2 * b) as f64 * (r as f64).ln()).exp() / (2.0 * std::f64::consts::E).powi(4);
        let m = d.powf(1.0 / b as f64).ceil();
        let c = (ln_choose(m as u64, b + 1)).exp();
        let want = (d * m - c) / b as f64;
        assert!(want > 0.0);
        assert!(got.positive);
        assert!(rel(got.ln.exp(), want) < 1e-9, "n={n} r={r} b={b}");
    }
    assert!(m_lower_bound(4, 2, 2).is_err());
}

#[test]
fn find_min_n_small_case() {
    let found = find_min_n(2, 1).unwrap();
    let n = found.n_star;
    assert!(certify(&CertificateParams::at_threshold(n, 2, 1).unwrap()).unwrap().verdict);
    assert!(!certify(&CertificateParams::at_threshold(n - 1, 2, 1).unwrap()).unwrap().verdict);
    assert!(!certify(&CertificateParams::at_threshold(n / 2, 2, 1).unwrap()).unwrap().verdict);
}
