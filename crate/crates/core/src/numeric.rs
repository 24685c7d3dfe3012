//! Floating-point helpers shared by the analytics: a fixed-order pairwise
//! sum and conversions from exact big integers.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

const PAIRWISE_BLOCK: usize = 64;

/// Sum with a fixed binary-tree order.
///
/// The split points depend only on the slice length, so the result is
/// bit-identical wherever it is evaluated, whichever thread does it.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i` in `0..len`, same tree as [`pairwise_sum`].
pub fn pairwise_sum_by<F: Fn(usize) -> f64 + Copy>(len: usize, f: F) -> f64 {
    fn go<F: Fn(usize) -> f64 + Copy>(lo: usize, hi: usize, f: F) -> f64 {
        if hi - lo <= PAIRWISE_BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, len, f)
}

/// Split a big integer into `(mantissa, exponent)` with `x ≈ mantissa · 2^exponent`.
///
/// The mantissa keeps the top 64 bits, so the relative error is below 2^-63.
pub fn biguint_parts(x: &BigUint) -> (f64, i64) {
    if x.is_zero() {
        return (0.0, 0);
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap_or(u64::MAX) as f64, 0);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64, shift as i64)
}

/// `num / den` as a real, without overflow for arbitrarily wide operands.
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    let (mn, en) = biguint_parts(num);
    let (md, ed) = biguint_parts(den);
    if mn == 0.0 {
        return 0.0;
    }
    scale_pow2(mn / md, en - ed)
}

/// `log2(x)` of a positive big integer; `-inf` at zero.
pub fn big_log2(x: &BigUint) -> f64 {
    let (m, e) = biguint_parts(x);
    if m == 0.0 {
        return f64::NEG_INFINITY;
    }
    libm::log2(m) + e as f64
}

/// `x · 2^e` with graceful underflow/overflow for large exponents.
pub fn scale_pow2(x: f64, e: i64) -> f64 {
    let clamped = e.clamp(-4000, 4000) as i32;
    // ldexp saturates to 0 / inf outside the representable range
    libm::ldexp(x, clamped)
}

/// `2^-n` as a real.
pub fn inv_pow2(n: u32) -> f64 {
    scale_pow2(1.0, -(n as i64))
}
