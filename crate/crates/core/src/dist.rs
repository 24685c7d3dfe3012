//! Dense probability tables over `{0,1}^n` and their monotone analytics.
//!
//! Tables are indexed by mask. Functions that only need a real-valued table
//! (slack, level averages, monotonicity) take `&[f64]` so they apply equally
//! to sub-normalized outputs of the decomposition and to signed estimates.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::{check_dim, full_mask, BinomialTable, CubePoint, LevelIter, Submasks};
use crate::error::{Error, Result};
use crate::lowerbound::MixtureSpec;
use crate::numeric::{inv_pow2, pairwise_sum, pairwise_sum_by};

/// Hard cap on dense storage (2^26 reals, 512 MiB).
pub const MAX_DENSE_DIM: u32 = 26;
/// Default cap used by front ends unless explicitly raised.
pub const DEFAULT_DENSE_DIM: u32 = 24;
/// Allowed deviation of the total mass from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Slack used by every inequality check on tables.
pub const INEQ_TOL: f64 = 1e-12;

pub(crate) fn check_dense_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DENSE_DIM {
        return Err(Error::DimensionOutOfRange(n, MAX_DENSE_DIM));
    }
    Ok(())
}

/// Dimension of a table of length `2^n`.
pub fn table_dim(table: &[f64]) -> Result<u32> {
    let len = table.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidDistribution("table length is not 2^n with n >= 1"));
    }
    let n = len.trailing_zeros();
    check_dense_dim(n)?;
    Ok(n)
}

/// Exact probability mass function over `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseDistribution {
    n: u32,
    probs: Vec<f64>,
}

impl DenseDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let n = table_dim(&probs)?;
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution("entries must be finite and nonnegative"));
        }
        let total = pairwise_sum(&probs);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution("entries do not sum to 1"));
        }
        Ok(Self { n, probs })
    }

    /// Rescale a nonnegative table with positive total mass to sum to one.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        table_dim(&weights)?;
        if weights.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution("entries must be finite and nonnegative"));
        }
        let total = pairwise_sum(&weights);
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero"));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(weights)
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    #[inline]
    pub fn prob(&self, x: CubePoint) -> f64 {
        self.probs[x.index()]
    }

    pub fn is_monotone(&self) -> bool {
        is_monotone(&self.probs)
    }

    pub fn slack(&self, x: CubePoint) -> f64 {
        slack(&self.probs, x)
    }

    pub fn level_average(&self, k: u32) -> Result<f64> {
        level_average(&self.probs, k)
    }

    pub fn slack_profile(&self) -> SlackProfile {
        SlackProfile::of(&self.probs)
    }

    pub fn support_fraction(&self) -> f64 {
        support_fraction(self)
    }

    pub fn is_well_behaved(&self) -> bool {
        is_well_behaved(self)
    }

    /// Mass of the Hamming-weight law: entry `w` is `Pr[||x|| = w]`.
    pub fn weight_law(&self) -> Vec<f64> {
        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); self.n as usize + 1];
        for (i, p) in self.probs.iter().enumerate() {
            buckets[(i as u64).count_ones() as usize].push(*p);
        }
        buckets.iter().map(|b| pairwise_sum(b)).collect()
    }

    pub fn sampler(&self, seed: u64) -> DenseSampler<'_> {
        DenseSampler::new(self, seed)
    }
}

/// A drawn multiset of points, kept as masks in draw order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    n: u32,
    seed: u64,
    samples: Vec<u64>,
}

impl SampleSet {
    pub fn from_masks(n: u32, seed: u64, samples: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        let full = full_mask(n);
        if let Some(&bad) = samples.iter().find(|&&s| s & !full != 0) {
            return Err(Error::InvalidPoint { mask: bad, n });
        }
        Ok(Self { n, seed, samples })
    }

    pub fn from_points(n: u32, seed: u64, points: &[CubePoint]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch(p.dim(), n));
        }
        Self::from_masks(n, seed, points.iter().map(|p| p.bits()).collect())
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.samples
    }

    pub fn points(&self) -> impl Iterator<Item = CubePoint> + '_ {
        let n = self.n;
        self.samples.iter().map(move |&b| CubePoint::new_unchecked(b, n))
    }

    /// Occurrence count of every mask; needs dense-storable `n`.
    pub fn count_table(&self) -> Result<Vec<u64>> {
        check_dense_dim(self.n)?;
        let mut counts = vec![0u64; 1usize << self.n];
        for &s in &self.samples {
            counts[s as usize] += 1;
        }
        Ok(counts)
    }
}

/// Anything the estimators can draw i.i.d. points from.
pub trait SampleSource {
    fn dim(&self) -> u32;
    fn seed(&self) -> u64;
    fn draw(&mut self) -> CubePoint;

    fn draw_set(&mut self, count: usize) -> SampleSet {
        let n = self.dim();
        let seed = self.seed();
        let samples = (0..count).map(|_| self.draw().bits()).collect();
        SampleSet { n, seed, samples }
    }
}

/// Inverse-CDF sampler over the ascending mask order, seeded ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct DenseSampler<'a> {
    dist: &'a DenseDistribution,
    cdf: Vec<f64>,
    rng: ChaCha8Rng,
    seed: u64,
}

impl<'a> DenseSampler<'a> {
    pub fn new(dist: &'a DenseDistribution, seed: u64) -> Self {
        let mut cdf = Vec::with_capacity(dist.probs.len());
        let mut acc = 0.0;
        for p in &dist.probs {
            acc += p;
            cdf.push(acc);
        }
        Self { dist, cdf, rng: ChaCha8Rng::seed_from_u64(seed), seed }
    }
}

impl SampleSource for DenseSampler<'_> {
    fn dim(&self) -> u32 {
        self.dist.n
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn draw(&mut self) -> CubePoint {
        let total = *self.cdf.last().unwrap_or(&1.0);
        let u: f64 = self.rng.random();
        let target = u * total;
        let mut idx = self.cdf.partition_point(|&c| c <= target);
        if idx >= self.cdf.len() {
            idx = self.cdf.len() - 1;
            while idx > 0 && self.dist.probs[idx] == 0.0 {
                idx -= 1;
            }
        }
        CubePoint::new_unchecked(idx as u64, self.dist.n)
    }
}

/// `count` i.i.d. draws from `dist`, reproducible from `seed`.
pub fn sample(dist: &DenseDistribution, seed: u64, count: usize) -> SampleSet {
    dist.sampler(seed).draw_set(count)
}

/// Edge test: `f(x) ≤ f(x ∪ {i}) + 1e-12` on every up-edge.
pub fn is_monotone(table: &[f64]) -> bool {
    let Ok(n) = table_dim(table) else {
        return false;
    };
    for (x, fx) in table.iter().enumerate() {
        for i in 0..n {
            let bit = 1usize << i;
            if x & bit == 0 && *fx > table[x | bit] + INEQ_TOL {
                return false;
            }
        }
    }
    true
}

/// Largest value among the lower neighbours of `x`, or 0 at the bottom.
#[inline]
pub(crate) fn max_lower_neighbor(table: &[f64], x: u64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut m = x;
    while m != 0 {
        let bit = m & m.wrapping_neg();
        let v = table[(x ^ bit) as usize];
        if v > best {
            best = v;
        }
        m ^= bit;
    }
    if best == f64::NEG_INFINITY {
        0.0
    } else {
        best
    }
}

/// `f(x) − max_{y ≺ x} f(y)` over lower neighbours; `f(0)` at the bottom.
pub fn slack(table: &[f64], x: CubePoint) -> f64 {
    let fx = table[x.index()];
    if x.bits() == 0 {
        fx
    } else {
        fx - max_lower_neighbor(table, x.bits())
    }
}

/// Mean of `f` over level `k`.
pub fn level_average(table: &[f64], k: u32) -> Result<f64> {
    let n = table_dim(table)?;
    if k > n {
        return Err(Error::LevelOutOfRange { h: k, n });
    }
    let values: Vec<f64> = LevelIter::new(n, k).map(|b| table[b as usize]).collect();
    Ok(pairwise_sum(&values) / values.len() as f64)
}

/// Half the L1 distance between two tables of equal dimension.
pub fn tv_distance(a: &DenseDistribution, b: &DenseDistribution) -> Result<f64> {
    table_tv(&a.probs, &b.probs)
}

/// `½ Σ |a − b|` for arbitrary (possibly signed) tables.
pub fn table_tv(a: &[f64], b: &[f64]) -> Result<f64> {
    let na = table_dim(a)?;
    let nb = table_dim(b)?;
    if na != nb {
        return Err(Error::DimensionMismatch(na, nb));
    }
    Ok(0.5 * pairwise_sum_by(a.len(), |i| (a[i] - b[i]).abs()))
}

/// Fraction of points with strictly positive mass.
pub fn support_fraction(dist: &DenseDistribution) -> f64 {
    let support = dist.probs.iter().filter(|&&p| p > 0.0).count();
    support as f64 / dist.probs.len() as f64
}

/// Every entry is exactly zero or at least `2^-n` (less a 1e-15 allowance).
pub fn is_well_behaved(dist: &DenseDistribution) -> bool {
    let floor = inv_pow2(dist.n) - 1e-15;
    dist.probs.iter().all(|&p| p == 0.0 || p >= floor)
}

/// Per-level slack summary of a real-valued table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackProfile {
    pub n: u32,
    pub avg_slack: Vec<f64>,
    pub has_nonzero_slack: Vec<bool>,
}

impl SlackProfile {
    pub fn of(table: &[f64]) -> Self {
        let n = table_dim(table).expect("table length must be 2^n");
        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n as usize + 1];
        for x in 0..table.len() as u64 {
            let s = slack(table, CubePoint::new_unchecked(x, n));
            buckets[x.count_ones() as usize].push(s);
        }
        let avg_slack = buckets.iter().map(|b| pairwise_sum(b) / b.len() as f64).collect();
        let has_nonzero_slack = buckets.iter().map(|b| b.iter().any(|&s| s > INEQ_TOL)).collect();
        Self { n, avg_slack, has_nonzero_slack }
    }

    /// Levels holding at least one point of slack above tolerance.
    pub fn slacky_levels(&self) -> Vec<u32> {
        (0..=self.n).filter(|&h| self.has_nonzero_slack[h as usize]).collect()
    }
}

// ---------------------------------------------------------------------------
// Generators

pub fn uniform(n: u32) -> Result<DenseDistribution> {
    check_dense_dim(n)?;
    let len = 1usize << n;
    Ok(DenseDistribution { n, probs: vec![inv_pow2(n); len] })
}

pub fn point_mass(x: CubePoint) -> Result<DenseDistribution> {
    check_dense_dim(x.dim())?;
    let mut probs = vec![0.0; 1usize << x.dim()];
    probs[x.index()] = 1.0;
    Ok(DenseDistribution { n: x.dim(), probs })
}

/// Uniform over `{y : y ⪰ x}`; exact zero elsewhere.
pub fn subcube(x: CubePoint) -> Result<DenseDistribution> {
    let n = x.dim();
    check_dense_dim(n)?;
    let mut probs = vec![0.0; 1usize << n];
    let mass = inv_pow2(n - x.weight());
    for s in Submasks::new(full_mask(n) & !x.bits()) {
        probs[(x.bits() | s) as usize] = mass;
    }
    Ok(DenseDistribution { n, probs })
}

/// `Σ w_i · component_i`; weights nonnegative summing to one.
pub fn mixture(components: &[DenseDistribution], weights: &[f64]) -> Result<DenseDistribution> {
    if components.is_empty() || components.len() != weights.len() {
        return Err(Error::InvalidWeights("need one weight per component"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidWeights("weights must be nonnegative"));
    }
    if (pairwise_sum(weights) - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidWeights("weights must sum to 1"));
    }
    let n = components[0].n;
    if let Some(c) = components.iter().find(|c| c.n != n) {
        return Err(Error::DimensionMismatch(n, c.n));
    }
    let mut probs = vec![0.0; 1usize << n];
    for (c, &w) in components.iter().zip(weights) {
        for (acc, p) in probs.iter_mut().zip(&c.probs) {
            *acc += w * p;
        }
    }
    DenseDistribution::new(probs)
}

/// `g(x) = max_{y ⪯ x} r(y)` for i.i.d. uniform seeds `r`, normalized.
pub fn random_monotone(n: u32, seed: u64) -> Result<DenseDistribution> {
    check_dense_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g: Vec<f64> = (0..1usize << n).map(|_| rng.random::<f64>()).collect();
    for i in 0..n {
        let bit = 1usize << i;
        for x in 0..g.len() {
            if x & bit != 0 && g[x ^ bit] > g[x] {
                g[x] = g[x ^ bit];
            }
        }
    }
    DenseDistribution::normalized(g)
}

/// Uniform over the up-closure of one to four random seed points, each
/// coordinate of a seed set with probability 1/4.
pub fn uniform_on_upset(n: u32, seed: u64) -> Result<DenseDistribution> {
    check_dense_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=4u32);
    let mut members = vec![false; 1usize << n];
    for _ in 0..k {
        let mut s = 0u64;
        for i in 0..n {
            if rng.random_range(0..4u32) == 0 {
                s |= 1 << i;
            }
        }
        for t in Submasks::new(full_mask(n) & !s) {
            members[(s | t) as usize] = true;
        }
    }
    let size = members.iter().filter(|&&m| m).count();
    let mass = 1.0 / size as f64;
    let probs = members.iter().map(|&m| if m { mass } else { 0.0 }).collect();
    DenseDistribution::new(probs)
}

/// Uniform distribution with mass `eps` taken off the highest levels
/// (top down) and placed on `0^n`. Its distance to the monotone cone is at
/// least `eps`, since any monotone `μ` has `μ(0^n) ≤ 2^-n`.
pub fn top_to_bottom_shift(n: u32, eps: f64) -> Result<DenseDistribution> {
    check_dense_dim(n)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("shifted mass must lie in (0, 1)"));
    }
    let table = BinomialTable::new(n);
    let unit = inv_pow2(n);
    let mut probs = vec![unit; 1usize << n];
    let mut remaining = eps;
    for h in (1..=n).rev() {
        if remaining <= 0.0 {
            break;
        }
        let level_mass = table.choose_f64(h) * unit;
        let take = remaining.min(level_mass);
        let keep = unit * (1.0 - take / level_mass);
        for b in LevelIter::new(n, h) {
            probs[b as usize] = keep;
        }
        remaining -= take;
    }
    if remaining > 1e-15 {
        return Err(Error::InvalidParameter("not enough mass above the bottom point"));
    }
    probs[0] += eps;
    DenseDistribution::normalized(probs)
}

/// The symmetric subcube mixture over every center of weight
/// `round(n^exponent)`.
pub fn delta_close(n: u32, exponent: f64) -> Result<DenseDistribution> {
    MixtureSpec::close(n, exponent)?.realize()
}

/// A random half-sized subcube mixture, centers drawn with replacement.
pub fn delta_far(n: u32, seed: u64, exponent: f64) -> Result<DenseDistribution> {
    MixtureSpec::far(n, seed, exponent)?.realize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::CubePoint;

    fn p(bits: u64, n: u32) -> CubePoint {
        CubePoint::new(bits, n).unwrap()
    }

    #[test]
    fn monotonicity_examples() {
        assert!(uniform(3).unwrap().is_monotone());
        assert!(!point_mass(p(0, 3)).unwrap().is_monotone());
        assert!(subcube(p(0b10, 2)).unwrap().is_monotone());
    }

    #[test]
    fn slack_examples() {
        let u = uniform(4).unwrap();
        assert_eq!(u.slack(p(0, 4)), 1.0 / 16.0);
        for x in 1..16 {
            assert_eq!(u.slack(p(x, 4)), 0.0);
        }
        let top = point_mass(p(0b11, 2)).unwrap();
        assert_eq!(top.slack(p(0b11, 2)), 1.0);
        for x in 0..3 {
            assert_eq!(top.slack(p(x, 2)), 0.0);
        }
    }

    #[test]
    fn level_average_examples() {
        assert_eq!(uniform(5).unwrap().level_average(2).unwrap(), 1.0 / 32.0);
        let top = point_mass(p(0b111, 3)).unwrap();
        assert_eq!(top.level_average(3).unwrap(), 1.0);
        assert_eq!(top.level_average(2).unwrap(), 0.0);
        assert_eq!(subcube(p(0b01, 2)).unwrap().level_average(1).unwrap(), 0.25);
        assert!(top.level_average(4).is_err());
    }

    #[test]
    fn tv_examples() {
        let u1 = uniform(1).unwrap();
        assert_eq!(tv_distance(&u1, &u1).unwrap(), 0.0);
        assert_eq!(tv_distance(&u1, &point_mass(p(1, 1)).unwrap()).unwrap(), 0.5);
        let u2 = uniform(2).unwrap();
        assert_eq!(tv_distance(&u2, &subcube(p(0b11, 2)).unwrap()).unwrap(), 0.75);
        assert!(tv_distance(&u1, &u2).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(uniform(6).unwrap().support_fraction(), 1.0);
        assert_eq!(subcube(p(0b0111, 6)).unwrap().support_fraction(), 0.125);
        let a = subcube(p(0b01, 2)).unwrap();
        let b = subcube(p(0b10, 2)).unwrap();
        let m = mixture(&[a, b], &[0.5, 0.5]).unwrap();
        assert_eq!(m.support_fraction(), 0.75);
    }

    #[test]
    fn well_behaved_examples() {
        assert!(uniform(5).unwrap().is_well_behaved());
        assert!(subcube(p(0b101, 5)).unwrap().is_well_behaved());
        let mut probs = vec![1.0 / 16.0; 16];
        probs[3] = 1.0 / 32.0;
        probs[4] = 3.0 / 32.0;
        assert!(!DenseDistribution::new(probs).unwrap().is_well_behaved());
    }

    #[test]
    fn sampler_examples() {
        let d = point_mass(p(0b1011, 4)).unwrap();
        let s = sample(&d, 99, 5);
        assert!(s.masks().iter().all(|&m| m == 0b1011));
        assert_eq!(s.count(), 5);
        assert!(sample(&d, 1, 0).is_empty());
        let u = uniform(6).unwrap();
        assert_eq!(sample(&u, 7, 100), sample(&u, 7, 100));
        assert_ne!(sample(&u, 7, 100), sample(&u, 8, 100));
    }

    #[test]
    fn sampler_skips_zero_mass_points() {
        let d = subcube(p(0b110, 3)).unwrap();
        let s = sample(&d, 3, 10_000);
        assert!(s.masks().iter().all(|&m| m & 0b110 == 0b110));
    }

    #[test]
    fn generator_identities() {
        assert_eq!(subcube(p(0, 5)).unwrap(), uniform(5).unwrap());
        assert_eq!(subcube(p(0b11111, 5)).unwrap(), point_mass(p(0b11111, 5)).unwrap());
        assert!(random_monotone(8, 4).unwrap().is_monotone());
        let up = uniform_on_upset(8, 4).unwrap();
        assert!(up.is_monotone());
        assert!(up.is_well_behaved());
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let u = uniform(2).unwrap();
        assert!(mixture(std::slice::from_ref(&u), &[0.5]).is_err());
        assert!(mixture(&[u.clone(), u.clone()], &[1.5, -0.5]).is_err());
        assert!(mixture(std::slice::from_ref(&u), &[1.0, 0.0]).is_err());
        assert!(mixture(&[], &[]).is_err());
    }

    #[test]
    fn shifted_construction_is_far_from_monotone_at_the_bottom() {
        let d = top_to_bottom_shift(8, 0.3).unwrap();
        assert!((d.probs()[0] - (0.3 + 1.0 / 256.0)).abs() < 1e-15);
        assert_eq!(d.probs()[255], 0.0);
        assert!(!d.is_monotone());
    }

    #[test]
    fn construction_rejects_malformed_tables() {
        assert!(DenseDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DenseDistribution::new(vec![1.0, 0.0, 0.0]).is_err());
        assert!(DenseDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(DenseDistribution::new(vec![1.0]).is_err());
    }
}
