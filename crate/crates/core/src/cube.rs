//! Bit-level combinatorics of the Boolean cube `{0,1}^n`.
//!
//! A point is an `n`-bit mask; coordinate `i` is set iff `x_i = 1`. The
//! partial order `y ⪯ x` is bitwise inclusion, levels are Hamming weights.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Largest dimension whose points fit one machine word with room to spare.
pub const MAX_DIM: u32 = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubePoint {
    bits: u64,
    n: u32,
}

impl CubePoint {
    pub fn new(bits: u64, n: u32) -> Result<Self> {
        check_dim(n)?;
        if bits & !full_mask(n) != 0 {
            return Err(Error::InvalidPoint { mask: bits, n });
        }
        Ok(Self { bits, n })
    }

    /// Caller guarantees `bits` fits in `n` bits.
    #[inline]
    pub(crate) fn new_unchecked(bits: u64, n: u32) -> Self {
        debug_assert!(bits & !full_mask(n) == 0);
        Self { bits, n }
    }

    pub fn zero(n: u32) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn ones(n: u32) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { bits: full_mask(n), n })
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> u32 {
        self.n
    }

    #[inline]
    pub fn index(self) -> usize {
        self.bits as usize
    }

    #[inline]
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.n).rev() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn full_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn check_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::DimensionOutOfRange(n, MAX_DIM));
    }
    Ok(())
}

/// Number of coordinates equal to one.
#[inline]
pub fn hamming_weight(x: CubePoint) -> u32 {
    x.weight()
}

/// True iff `y ⪯ x`, i.e. every coordinate set in `y` is set in `x`.
pub fn dominates(x: CubePoint, y: CubePoint) -> Result<bool> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch(x.n, y.n));
    }
    Ok(y.bits & x.bits == y.bits)
}

/// All points of weight `h`, in ascending mask order.
pub fn enumerate_level(n: u32, h: u32) -> Result<Vec<CubePoint>> {
    check_dim(n)?;
    if h > n {
        return Err(Error::LevelOutOfRange { h, n });
    }
    Ok(LevelIter::new(n, h).map(|b| CubePoint::new_unchecked(b, n)).collect())
}

/// All `z` with `y ⪯ z ⪯ x`, in ascending mask order.
pub fn enumerate_interval(y: CubePoint, x: CubePoint) -> Result<Vec<CubePoint>> {
    if !dominates(x, y)? {
        return Err(Error::NotDominated { lower: y.bits, upper: x.bits });
    }
    let n = x.n;
    Ok(Submasks::new(x.bits ^ y.bits)
        .map(|s| CubePoint::new_unchecked(y.bits | s, n))
        .collect())
}

/// Masks of popcount `h` below `2^n`, ascending (Gosper's hack).
#[derive(Debug, Clone)]
pub struct LevelIter {
    next: Option<u64>,
    limit: u64,
}

impl LevelIter {
    pub fn new(n: u32, h: u32) -> Self {
        let limit = full_mask(n);
        let next = if h > n {
            None
        } else if h == 0 {
            Some(0)
        } else {
            Some(full_mask(h))
        };
        Self { next, limit }
    }
}

impl Iterator for LevelIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            if r == 0 || r > self.limit {
                None
            } else {
                let nxt = (((r ^ cur) >> 2) / c) | r;
                if nxt > self.limit {
                    None
                } else {
                    Some(nxt)
                }
            }
        };
        Some(cur)
    }
}

/// Every submask of `mask`, ascending, starting with 0 and ending with `mask`.
#[derive(Debug, Clone)]
pub struct Submasks {
    mask: u64,
    cur: Option<u64>,
}

impl Submasks {
    pub fn new(mask: u64) -> Self {
        Self { mask, cur: Some(0) }
    }
}

impl Iterator for Submasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let s = self.cur?;
        self.cur = if s == self.mask {
            None
        } else {
            Some(s.wrapping_sub(self.mask) & self.mask)
        };
        Some(s)
    }
}

/// Submasks of `mask` with exactly `k` bits set, ascending by rank among the
/// set-bit positions.
#[derive(Debug, Clone)]
pub struct SubmasksOfWeight {
    positions: [u8; 64],
    len: u32,
    inner: LevelIter,
}

impl SubmasksOfWeight {
    pub fn new(mask: u64, k: u32) -> Self {
        let mut positions = [0u8; 64];
        let mut len = 0u32;
        let mut m = mask;
        while m != 0 {
            positions[len as usize] = m.trailing_zeros() as u8;
            len += 1;
            m &= m - 1;
        }
        let inner = if len == 0 {
            LevelIter::new(1, if k == 0 { 0 } else { 2 })
        } else {
            LevelIter::new(len, k)
        };
        Self { positions, len, inner }
    }
}

impl Iterator for SubmasksOfWeight {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let idx = self.inner.next()?;
        if self.len == 0 {
            return Some(0);
        }
        let mut out = 0u64;
        let mut m = idx;
        while m != 0 {
            out |= 1u64 << self.positions[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        Some(out)
    }
}

/// Exact binomial coefficients `C(n, k)` and upper tails `Σ_{j≥h} C(n, j)`.
///
/// Not limited by [`MAX_DIM`]: the appendix scans evaluate these at `n` in
/// the thousands.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    n: u32,
    choose: Vec<BigUint>,
    tail: Vec<BigUint>,
}

impl BinomialTable {
    pub fn new(n: u32) -> Self {
        let mut choose = Vec::with_capacity(n as usize + 1);
        let mut c = BigUint::one();
        choose.push(c.clone());
        for k in 0..n {
            c = c * BigUint::from(n - k) / BigUint::from(k + 1);
            choose.push(c.clone());
        }
        let mut tail = alloc::vec![BigUint::zero(); n as usize + 2];
        for h in (0..=n as usize).rev() {
            tail[h] = &tail[h + 1] + &choose[h];
        }
        tail.truncate(n as usize + 1);
        Self { n, choose, tail }
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    /// `C(n, k)`; panics if `k > n`.
    pub fn choose(&self, k: u32) -> &BigUint {
        &self.choose[k as usize]
    }

    /// `Σ_{j≥h} C(n, j)`; panics if `h > n`.
    pub fn tail(&self, h: u32) -> &BigUint {
        &self.tail[h as usize]
    }

    pub fn choose_f64(&self, k: u32) -> f64 {
        numeric::big_ratio(self.choose(k), &BigUint::one())
    }

    pub fn tail_f64(&self, h: u32) -> f64 {
        numeric::big_ratio(self.tail(h), &BigUint::one())
    }

    /// `C(n, k) / 2^n`.
    pub fn level_mass(&self, k: u32) -> f64 {
        numeric::big_ratio(self.choose(k), &self.tail[0])
    }

    /// `Pr_{x uniform}[||x|| ≥ h] = tail(h) / 2^n`.
    pub fn tail_fraction(&self, h: u32) -> f64 {
        numeric::big_ratio(self.tail(h), &self.tail[0])
    }

    /// `C(n, h) / Σ_{j≥h} C(n, j)`.
    pub fn level_ratio(&self, h: u32) -> f64 {
        numeric::big_ratio(self.choose(h), self.tail(h))
    }

    /// `log2 C(n, k)`.
    pub fn log2_choose(&self, k: u32) -> f64 {
        numeric::big_log2(self.choose(k))
    }
}

/// `C(n, h) / Σ_{j≥h} C(n, j)`, exact up to the final rounding.
pub fn level_ratio(n: u32, h: u32) -> Result<f64> {
    if h > n {
        return Err(Error::LevelOutOfRange { h, n });
    }
    Ok(BinomialTable::new(n).level_ratio(h))
}

/// Piecewise upper bound on [`level_ratio`], claimed for all large `n`:
/// `2/n²` up to `n/2 − √(n ln n)`, `200/√n` in the middle band, and
/// `200·(h − n/2)/n` from `n/2 + √n` on.
pub fn ratio_bound(n: u32, h: u32) -> f64 {
    let nf = n as f64;
    let hf = h as f64;
    let low_edge = nf / 2.0 - libm::sqrt(nf * libm::log(nf));
    let high_edge = nf / 2.0 + libm::sqrt(nf);
    if hf <= low_edge {
        2.0 / (nf * nf)
    } else if hf < high_edge {
        200.0 / libm::sqrt(nf)
    } else {
        200.0 * (hf - nf / 2.0) / nf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64, n: u32) -> CubePoint {
        CubePoint::new(bits, n).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(hamming_weight(p(0b0000, 4)), 0);
        assert_eq!(hamming_weight(p(0b1111, 4)), 4);
        assert_eq!(hamming_weight(p(0b1010, 4)), 2);
    }

    #[test]
    fn dominance() {
        assert!(dominates(p(0b0111, 4), p(0b0011, 4)).unwrap());
        assert!(!dominates(p(0b0111, 4), p(0b1000, 4)).unwrap());
        assert!(dominates(p(0b0101, 4), p(0b0101, 4)).unwrap());
        assert_eq!(
            dominates(p(0b1, 3), p(0b1, 4)),
            Err(Error::DimensionMismatch(3, 4))
        );
    }

    #[test]
    fn point_validation() {
        assert!(CubePoint::new(0b10000, 4).is_err());
        assert!(CubePoint::new(0, 0).is_err());
        assert!(CubePoint::new(0, 63).is_err());
        assert_eq!(CubePoint::ones(62).unwrap().weight(), 62);
        assert_eq!(p(0b011, 3).to_string(), "011");
    }

    #[test]
    fn levels() {
        let bits = |v: Vec<CubePoint>| v.into_iter().map(|c| c.bits()).collect::<Vec<_>>();
        assert_eq!(bits(enumerate_level(3, 0).unwrap()), [0b000]);
        assert_eq!(bits(enumerate_level(3, 2).unwrap()), [0b011, 0b101, 0b110]);
        assert_eq!(bits(enumerate_level(3, 3).unwrap()), [0b111]);
        assert!(enumerate_level(3, 4).is_err());
        assert_eq!(bits(enumerate_level(62, 62).unwrap()), [full_mask(62)]);
    }

    #[test]
    fn intervals() {
        let bits = |v: Vec<CubePoint>| v.into_iter().map(|c| c.bits()).collect::<Vec<_>>();
        assert_eq!(bits(enumerate_interval(p(0b001, 3), p(0b011, 3)).unwrap()), [0b001, 0b011]);
        assert_eq!(bits(enumerate_interval(p(0b101, 3), p(0b101, 3)).unwrap()), [0b101]);
        assert_eq!(
            bits(enumerate_interval(p(0b000, 3), p(0b011, 3)).unwrap()),
            [0b000, 0b001, 0b010, 0b011]
        );
        assert!(matches!(
            enumerate_interval(p(0b100, 3), p(0b011, 3)),
            Err(Error::NotDominated { .. })
        ));
    }

    #[test]
    fn submasks_of_weight() {
        let v: Vec<u64> = SubmasksOfWeight::new(0b1011, 2).collect();
        assert_eq!(v, [0b0011, 0b1001, 0b1010]);
        let v: Vec<u64> = SubmasksOfWeight::new(0b1011, 0).collect();
        assert_eq!(v, [0]);
        let v: Vec<u64> = SubmasksOfWeight::new(0, 0).collect();
        assert_eq!(v, [0]);
        assert_eq!(SubmasksOfWeight::new(0, 1).count(), 0);
        assert_eq!(SubmasksOfWeight::new(0b11, 3).count(), 0);
    }

    #[test]
    fn level_ratio_values() {
        assert_eq!(level_ratio(4, 4).unwrap(), 1.0);
        assert_eq!(level_ratio(4, 3).unwrap(), 0.8);
        assert_eq!(level_ratio(4, 0).unwrap(), 0.0625);
        assert!(level_ratio(4, 5).is_err());
    }

    #[test]
    fn ratio_bound_branches() {
        assert_eq!(ratio_bound(4, 4), 100.0);
        assert_eq!(ratio_bound(10_000, 5000), 2.0);
        assert!((ratio_bound(10_000, 4000) - 2e-8).abs() < 1e-20);
    }

    #[test]
    fn binomial_table_identities() {
        let t = BinomialTable::new(10);
        assert_eq!(*t.tail(0), BigUint::from(1024u32));
        assert_eq!(*t.tail(10), BigUint::one());
        assert_eq!(*t.choose(5), BigUint::from(252u32));
        assert_eq!(t.tail_fraction(8), 56.0 / 1024.0);
        assert_eq!(t.level_mass(5), 252.0 / 1024.0);
    }
}
