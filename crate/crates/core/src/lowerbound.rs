//! Subcube-mixture constructions and the exact binomial and collision
//! computations that show the close and far families look alike.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::{check_dim, full_mask, BinomialTable, CubePoint, LevelIter};
use crate::dist::{check_dense_dim, DenseDistribution};
use crate::error::{Error, Result};
use crate::numeric::{big_ratio, inv_pow2};

/// Exponent of the center weight in the constructions (`0.5 − 0.01`).
pub const DEFAULT_EXPONENT: f64 = 0.49;

/// A uniform mixture of subcube distributions `S_c`, all centers of weight `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub n: u32,
    pub m: u32,
    pub exponent: f64,
    /// Centers with multiplicity; each carries weight `1 / centers.len()`.
    pub centers: Vec<CubePoint>,
    pub with_replacement: bool,
    /// How the non-integer quantities were made integral.
    pub rounding: String,
}

/// `m = round_half_even(n^exponent)`, at least 1 and at most `n`.
pub fn center_weight(n: u32, exponent: f64) -> u32 {
    let raw = libm::rint(libm::pow(n as f64, exponent));
    (raw.max(1.0) as u32).min(n)
}

/// `K = max(1, ⌊½ · 2^m⌋)` centers for the far family.
pub fn far_component_count(m: u32) -> usize {
    if m == 0 {
        1
    } else {
        (1usize << (m - 1)).max(1)
    }
}

impl MixtureSpec {
    /// Every weight-`m` center once.
    pub fn close(n: u32, exponent: f64) -> Result<Self> {
        check_dim(n)?;
        let m = center_weight(n, exponent);
        let centers = LevelIter::new(n, m).map(|b| CubePoint::new_unchecked(b, n)).collect();
        Ok(Self {
            n,
            m,
            exponent,
            centers,
            with_replacement: false,
            rounding: String::from("m = round-half-even(n^exponent), min 1"),
        })
    }

    /// `K = ⌊½·2^m⌋` weight-`m` centers drawn uniformly with replacement.
    pub fn far(n: u32, seed: u64, exponent: f64) -> Result<Self> {
        check_dim(n)?;
        let m = center_weight(n, exponent);
        let k = far_component_count(m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = (0..k).map(|_| random_point_of_weight(&mut rng, n, m)).collect();
        Ok(Self {
            n,
            m,
            exponent,
            centers,
            with_replacement: true,
            rounding: String::from(
                "m = round-half-even(n^exponent), min 1; K = max(1, floor(2^m / 2))",
            ),
        })
    }

    pub fn component_count(&self) -> usize {
        self.centers.len()
    }

    /// Dense mass function. Counts centers below each point with a subset-sum
    /// transform, so no binomial coefficient enters the computation.
    pub fn realize(&self) -> Result<DenseDistribution> {
        check_dense_dim(self.n)?;
        if self.centers.is_empty() {
            return Err(Error::InvalidWeights("mixture has no components"));
        }
        if let Some(c) = self.centers.iter().find(|c| c.dim() != self.n || c.weight() != self.m) {
            return Err(Error::InvalidPoint { mask: c.bits(), n: self.n });
        }
        let len = 1usize << self.n;
        let mut counts = vec![0u64; len];
        for c in &self.centers {
            counts[c.index()] += 1;
        }
        for i in 0..self.n {
            let bit = 1usize << i;
            for y in 0..len {
                if y & bit != 0 {
                    counts[y] += counts[y ^ bit];
                }
            }
        }
        let unit = inv_pow2(self.n - self.m) / self.centers.len() as f64;
        let probs = counts.iter().map(|&c| c as f64 * unit).collect();
        DenseDistribution::new(probs)
    }

    /// One draw: a component index uniformly, then a uniform point above its
    /// center. Needs no dense storage.
    pub fn sample_tracked<R: Rng>(&self, rng: &mut R) -> (usize, CubePoint) {
        let j = rng.random_range(0..self.centers.len());
        let c = self.centers[j];
        let free = full_mask(self.n) & !c.bits();
        let bits = c.bits() | (rng.random::<u64>() & free);
        (j, CubePoint::new_unchecked(bits, self.n))
    }
}

fn random_point_of_weight<R: Rng>(rng: &mut R, n: u32, m: u32) -> CubePoint {
    let mut coords: Vec<u32> = (0..n).collect();
    let mut bits = 0u64;
    for i in 0..m as usize {
        let j = rng.random_range(i..n as usize);
        coords.swap(i, j);
        bits |= 1 << coords[i];
    }
    CubePoint::new_unchecked(bits, n)
}

/// Exact `½ Σ_w |Pr[Bin(n,½) = w] − Pr[m + Bin(n−m,½) = w]|`.
pub fn binomial_shift_tv(n: u32, m: u32) -> Result<f64> {
    if m > n {
        return Err(Error::LevelOutOfRange { h: m, n });
    }
    let full = BinomialTable::new(n);
    let reduced = BinomialTable::new(n - m);
    // both laws over the common denominator 2^n
    let mut l1 = BigUint::from(0u32);
    for w in 0..=n {
        let a = full.choose(w).clone();
        let b = if w >= m { reduced.choose(w - m) << m } else { BigUint::from(0u32) };
        l1 += if a >= b { a - b } else { b - a };
    }
    Ok(big_ratio(&l1, &(BigUint::one() << (n + 1))))
}

/// Exact total variation between `Bin(k,½)` and `Bin(k+1,½)`, by enumeration.
pub fn consecutive_binomial_tv(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    let lo = BinomialTable::new(k);
    let hi = BinomialTable::new(k + 1);
    let mut l1 = BigUint::from(0u32);
    for j in 0..=k + 1 {
        let a = if j <= k { lo.choose(j) << 1u32 } else { BigUint::from(0u32) };
        let b = hi.choose(j).clone();
        l1 += if a >= b { a - b } else { b - a };
    }
    Ok(big_ratio(&l1, &(BigUint::one() << (k + 2))))
}

/// The telescoped expression `(1/2^k)(2·C(k−1,(k−1)/2) − 1)` for odd `k`.
///
/// It bounds the L1 distance (twice the total variation) between
/// `Bin(k,½)` and `Bin(k+1,½)` and equals it at `k = 1` and `k = 3`.
pub fn consecutive_binomial_closed_form(k: u32) -> Result<f64> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::InvalidParameter("closed form needs odd k"));
    }
    let t = BinomialTable::new(k - 1);
    let numer = (t.choose((k - 1) / 2) << 1u32) - BigUint::one();
    Ok(big_ratio(&numer, &(BigUint::one() << k)))
}

/// `consecutive_binomial_tv(k)` for `k = 1..=k_max` in floating point, by
/// running Pascal's recurrence once. Tail entries below the smallest double
/// flush to zero, which perturbs the result by far less than rounding.
pub fn consecutive_binomial_tv_scan(k_max: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max as usize);
    let mut pmf = vec![1.0f64];
    for k in 0..=k_max {
        let mut next = vec![0.0; pmf.len() + 1];
        for (j, p) in pmf.iter().enumerate() {
            next[j] += 0.5 * p;
            next[j + 1] += 0.5 * p;
        }
        if k >= 1 {
            let mut acc = 0.0;
            for (j, q) in next.iter().enumerate() {
                let p = pmf.get(j).copied().unwrap_or(0.0);
                acc += (p - q).abs();
            }
            out.push(0.5 * acc);
        }
        pmf = next;
    }
    out
}

/// `∏_{i<q} (1 − i/K)`: all `q` uniform picks from `K` components differ.
pub fn collision_probability(k: u64, q: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1"));
    }
    if q > k {
        return Ok(0.0);
    }
    let mut p = 1.0;
    for i in 0..q {
        p *= 1.0 - i as f64 / k as f64;
    }
    Ok(p)
}

/// Fraction of `trials` in which `q` draws from the mixture come from
/// pairwise distinct components. Trial `t` uses stream `t` of the seeded
/// generator, so trials are independent of evaluation order.
pub fn collision_experiment(spec: &MixtureSpec, q: usize, trials: u64, seed: u64) -> f64 {
    let mut distinct = 0u64;
    let mut ids = Vec::with_capacity(q);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        ids.clear();
        for _ in 0..q {
            ids.push(spec.sample_tracked(&mut rng).0);
        }
        if all_distinct(&mut ids) {
            distinct += 1;
        }
    }
    distinct as f64 / trials as f64
}

/// Same experiment with `K` abstract components, for `K` beyond what a
/// concrete cube can host.
pub fn collision_experiment_components(k: usize, q: usize, trials: u64, seed: u64) -> f64 {
    let mut distinct = 0u64;
    let mut ids = Vec::with_capacity(q);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        ids.clear();
        for _ in 0..q {
            ids.push(rng.random_range(0..k));
        }
        if all_distinct(&mut ids) {
            distinct += 1;
        }
    }
    distinct as f64 / trials as f64
}

fn all_distinct(ids: &mut [usize]) -> bool {
    ids.sort_unstable();
    ids.windows(2).all(|w| w[0] != w[1])
}

/// Exact support fraction of the realized mixture.
pub fn far_support_check(spec: &MixtureSpec) -> Result<f64> {
    Ok(spec.realize()?.support_fraction())
}

/// Union bound `K · 2^-m` on the support fraction of a mixture.
pub fn support_union_bound(spec: &MixtureSpec) -> f64 {
    spec.centers.len() as f64 * inv_pow2(spec.m)
}

/// Total variation to uniform computed on the Hamming-weight laws only;
/// equals the full TV for distributions that are constant on each level.
pub fn weight_law_tv_to_uniform(dist: &DenseDistribution) -> f64 {
    let n = dist.dim();
    let table = BinomialTable::new(n);
    let law = dist.weight_law();
    let mut acc = 0.0;
    for (w, p) in law.iter().enumerate() {
        acc += (p - table.level_mass(w as u32)).abs();
    }
    0.5 * acc
}
