//! Exact big-integer evaluation of `N / (2e)^4` with rigorous bounds on `e`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Largest numerator (in bits) the exact path is attempted for.
pub const EXACT_BITS_LIMIT: u64 = 20_000;

/// `e_lo = Σ_{k<=K} 1/k!` and `e_hi = e_lo + 1/(K·K!)`, as `(num, den)` pairs.
pub fn e_bounds(terms: u64) -> ((BigUint, BigUint), (BigUint, BigUint)) {
    let terms = terms.max(1);
    // Σ K!/k! built from the top: K!/K! + K!/(K-1)! + …
    let mut num = BigUint::zero();
    let mut fall = BigUint::one();
    for k in (0..=terms).rev() {
        num += &fall;
        fall *= BigUint::from(k.max(1));
    }
    let den: BigUint = (1..=terms).fold(BigUint::one(), |acc, k| acc * BigUint::from(k));
    let k = BigUint::from(terms);
    let hi_num = &num * &k + BigUint::one();
    let hi_den = &den * &k;
    ((num, den), (hi_num, hi_den))
}

/// `ln x` for an arbitrary-size positive integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactQuotient {
    /// `floor(N / (2e)^4)`.
    pub floor: BigUint,
    /// `N · Q^4` and `16 · P^4` for the upper bound `P/Q` on `e` that settled the floor.
    pub num: BigUint,
    pub den: BigUint,
}

impl ExactQuotient {
    /// `ln(num / den)`; within rounding of `ln(N / (2e)^4)`.
    pub fn ln(&self) -> f64 {
        ln_biguint(&self.num) - ln_biguint(&self.den)
    }
}

/// `floor(numerator / (2e)^4)`, settled by tightening rational bounds on `e`
/// until the floors of both enclosing quotients coincide. `None` when the
/// numerator exceeds [`EXACT_BITS_LIMIT`] bits.
pub fn floor_over_2e4(numerator: &BigUint) -> Option<ExactQuotient> {
    if numerator.is_zero() || numerator.bits() > EXACT_BITS_LIMIT {
        return None;
    }
    let mut terms: u64 = 16;
    loop {
        let ((lo_n, lo_d), (hi_n, hi_d)) = e_bounds(terms);
        // larger e gives the smaller quotient
        let small_num = numerator * hi_d.pow(4);
        let small_den = BigUint::from(16u32) * hi_n.pow(4);
        let big_num = numerator * lo_d.pow(4);
        let big_den = BigUint::from(16u32) * lo_n.pow(4);
        let lo_floor = small_num.div_floor(&small_den);
        let hi_floor = big_num.div_floor(&big_den);
        if lo_floor == hi_floor {
            return Some(ExactQuotient {
                floor: lo_floor,
                num: small_num,
                den: small_den,
            });
        }
        terms *= 2;
        if terms > 1 << 16 {
            return None;
        }
    }
}

/// `n · r^{n-b}` (or `r^{n-b}` without the `n`).
pub fn power_numerator(n: u64, r: u64, b: u64, with_n: bool) -> Option<BigUint> {
    let exp = n.checked_sub(b)?;
    let bits = exp as f64 * (r as f64).log2() + if with_n { (n as f64).log2() } else { 0.0 };
    if bits > EXACT_BITS_LIMIT as f64 {
        return None;
    }
    let mut x = BigUint::from(r).pow(exp as u32);
    if with_n {
        x *= BigUint::from(n);
    }
    Some(x)
}
