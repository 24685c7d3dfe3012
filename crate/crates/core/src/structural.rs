//! Slack removal: a single forward pass over the levels that zeroes the
//! slack of every level whose average slack is small relative to its regret
//! weight, plus exact verifiers for the guarantees of the output.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cube::{BinomialTable, LevelIter};
use crate::dist::{is_monotone, max_lower_neighbor, table_dim, DenseDistribution, SlackProfile};
use crate::error::{Error, Result};
use crate::numeric::{big_ratio, pairwise_sum, pairwise_sum_by};

/// Per-level budget `R_h ≥ 0`, `h = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretWeights {
    n: u32,
    weights: Vec<f64>,
}

impl RegretWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("need n + 1 weights"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidWeights("regret weights must be nonnegative"));
        }
        Ok(Self { n: weights.len() as u32 - 1, weights })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn get(&self, h: u32) -> f64 {
        self.weights[h as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_h R_h · C(n,h) / Σ_{j≥h} C(n,j)`, the left side of the precondition.
    pub fn precondition_sum(&self) -> f64 {
        let table = BinomialTable::new(self.n);
        pairwise_sum_by(self.weights.len(), |h| self.weights[h] * table.level_ratio(h as u32))
    }
}

/// Step weights `ε²/16` up to and including `h0`, zero above.
pub fn corollary_weights(n: u32, eps: f64, h0: u32) -> Result<RegretWeights> {
    check_eps(eps)?;
    if h0 > n {
        return Err(Error::LevelOutOfRange { h: h0, n });
    }
    let r = eps * eps / 16.0;
    RegretWeights::new((0..=n).map(|h| if h <= h0 { r } else { 0.0 }).collect())
}

/// `R_h = (200/ε) · L_h · b_h` with `b_h = 200/√n` below `n/2 + √n` and
/// `200·(h − n/2)/n` from there on.
pub fn learner_weights(n: u32, eps: f64, levels: &[f64]) -> Result<RegretWeights> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    if levels.len() != n as usize + 1 {
        return Err(Error::InvalidParameter("need one window per level"));
    }
    if levels.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidWeights("windows must be nonnegative"));
    }
    let nf = n as f64;
    let edge = nf / 2.0 + libm::sqrt(nf);
    let weights = levels
        .iter()
        .enumerate()
        .map(|(h, l)| {
            let hf = h as f64;
            let band = if hf < edge { 200.0 / libm::sqrt(nf) } else { 200.0 * (hf - nf / 2.0) / nf };
            (200.0 / eps) * l * band
        })
        .collect();
    RegretWeights::new(weights)
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    /// Output function, pointwise below the input and generally sub-normalized.
    pub f: Vec<f64>,
    pub mass_removed: f64,
    /// Levels of `f` holding a point with slack above tolerance.
    pub slacky_levels: Vec<u32>,
    /// `Σ R_h` over the slacky levels.
    pub regret_spent: f64,
    /// Levels the pass flattened.
    pub zeroed_levels: Vec<u32>,
}

impl DecompositionResult {
    /// Number of slacky levels strictly below `h0`.
    pub fn slacky_levels_below(&self, h0: u32) -> usize {
        self.slacky_levels.iter().filter(|&&h| h < h0).count()
    }
}

/// Forward pass over `h = 0..=n` on a distribution.
pub fn slack_regret_reduce(rho: &DenseDistribution, weights: &RegretWeights) -> Result<DecompositionResult> {
    slack_regret_reduce_table(rho.probs(), weights)
}

/// Forward pass over `h = 0..=n` on any monotone table.
///
/// At level `h`, when the average slack is strictly below
/// `R_h / Σ_{j≥h} C(n,j)`, every point of the level is set to the largest
/// value among its lower neighbours. Flattening level `h` leaves the slack of
/// lower levels untouched, so one pass in increasing `h` is exact; the order
/// is part of the contract.
pub fn slack_regret_reduce_table(table: &[f64], weights: &RegretWeights) -> Result<DecompositionResult> {
    let n = table_dim(table)?;
    if weights.dim() != n {
        return Err(Error::DimensionMismatch(weights.dim(), n));
    }
    if !is_monotone(table) {
        return Err(Error::NotMonotone);
    }
    let binom = BinomialTable::new(n);
    let mut f = table.to_vec();
    let mut zeroed_levels = Vec::new();
    let mut slacks = Vec::new();
    for h in 0..=n {
        slacks.clear();
        for x in LevelIter::new(n, h) {
            slacks.push(f[x as usize] - max_lower_neighbor(&f, x));
        }
        let avg = pairwise_sum(&slacks) / slacks.len() as f64;
        let threshold = weights.get(h) * big_ratio(&BigUint::one(), binom.tail(h));
        if avg < threshold {
            for x in LevelIter::new(n, h) {
                let floor = max_lower_neighbor(&f, x);
                let cur = &mut f[x as usize];
                if floor < *cur {
                    *cur = floor;
                }
            }
            zeroed_levels.push(h);
        }
    }
    let mass_removed = pairwise_sum_by(f.len(), |i| table[i] - f[i]);
    let profile = SlackProfile::of(&f);
    let slacky_levels = profile.slacky_levels();
    let regret_spent = slacky_levels.iter().map(|&h| weights.get(h)).sum();
    Ok(DecompositionResult { f, mass_removed, slacky_levels, regret_spent, zeroed_levels })
}

/// Outcome of checking the three guarantees and the precondition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// `f(x) ≤ ρ(x)` everywhere, exactly.
    pub prop1: bool,
    /// `min_x (ρ(x) − f(x))`.
    pub prop1_margin: f64,
    /// `Σ(ρ − f) ≤ ζ` (within 1e-9).
    pub prop2: bool,
    /// `ζ − Σ(ρ − f)`.
    pub prop2_margin: f64,
    /// `Σ R_h · 1[level h slacky in f] ≤ 1` (within 1e-9).
    pub prop3: bool,
    /// `1 − Σ R_h` over slacky levels, recomputed from `f`.
    pub prop3_margin: f64,
    pub precondition: bool,
    /// `ζ − Σ_h R_h · C(n,h)/Σ_{j≥h} C(n,j)`.
    pub precondition_margin: f64,
}

impl DecompositionReport {
    pub fn all_hold(&self) -> bool {
        self.prop1 && self.prop2 && self.prop3
    }
}

pub const DECOMPOSITION_TOL: f64 = 1e-9;

pub fn verify_decomposition(
    rho: &DenseDistribution,
    result: &DecompositionResult,
    weights: &RegretWeights,
    zeta: f64,
) -> DecompositionReport {
    let probs = rho.probs();
    let prop1_margin = probs
        .iter()
        .zip(&result.f)
        .map(|(r, f)| r - f)
        .fold(f64::INFINITY, f64::min);
    let removed = pairwise_sum_by(probs.len(), |i| probs[i] - result.f[i]);
    let profile = SlackProfile::of(&result.f);
    let spent: f64 = profile.slacky_levels().iter().map(|&h| weights.get(h)).sum();
    let precondition_margin = zeta - weights.precondition_sum();
    DecompositionReport {
        prop1: prop1_margin >= 0.0,
        prop1_margin,
        prop2: removed <= zeta + DECOMPOSITION_TOL,
        prop2_margin: zeta - removed,
        prop3: spent <= 1.0 + DECOMPOSITION_TOL,
        prop3_margin: 1.0 - spent,
        precondition: precondition_margin >= -DECOMPOSITION_TOL,
        precondition_margin,
    }
}

/// Smallest `h0` with `ε/4 ≤ Pr_{x uniform}[||x|| ≥ h0] ≤ ε/2`, both ends
/// inclusive.
pub fn find_h0(n: u32, eps: f64) -> Result<u32> {
    check_eps(eps)?;
    let table = BinomialTable::new(n);
    let (lo, hi) = (eps / 4.0, eps / 2.0);
    (0..=n)
        .find(|&h| {
            let frac = table.tail_fraction(h);
            lo <= frac && frac <= hi
        })
        .ok_or(Error::NoValidH0 { n, lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::CubePoint;
    use crate::dist::{point_mass, uniform};

    #[test]
    fn uniform_is_left_alone() {
        for eps in [0.25, 0.5, 1.0] {
            let rho = uniform(5).unwrap();
            let w = corollary_weights(5, eps, 5).unwrap();
            let out = slack_regret_reduce(&rho, &w).unwrap();
            assert_eq!(out.f, rho.probs());
            assert_eq!(out.slacky_levels, [0]);
            assert_eq!(out.regret_spent, eps * eps / 16.0);
            assert_eq!(out.mass_removed, 0.0);
        }
    }

    #[test]
    fn top_point_mass_is_removed() {
        let rho = point_mass(CubePoint::new(1, 1).unwrap()).unwrap();
        let w = RegretWeights::new(vec![0.5, 2.0]).unwrap();
        let out = slack_regret_reduce(&rho, &w).unwrap();
        assert_eq!(out.f, [0.0, 0.0]);
        assert_eq!(out.mass_removed, 1.0);
        assert!(out.slacky_levels.is_empty());
    }

    #[test]
    fn zero_weights_never_flatten() {
        let rho = crate::dist::random_monotone(6, 3).unwrap();
        let w = RegretWeights::new(vec![0.0; 7]).unwrap();
        let out = slack_regret_reduce(&rho, &w).unwrap();
        assert_eq!(out.f, rho.probs());
    }

    #[test]
    fn violated_precondition_keeps_props_one_and_three() {
        let rho = point_mass(CubePoint::new(1, 1).unwrap()).unwrap();
        let w = RegretWeights::new(vec![2.0, 2.0]).unwrap();
        let out = slack_regret_reduce(&rho, &w).unwrap();
        let zeta = 0.5;
        let report = verify_decomposition(&rho, &out, &w, zeta);
        assert!(!report.precondition);
        assert!(report.prop1);
        assert!(report.prop3);
    }

    #[test]
    fn rejects_non_monotone() {
        let rho = point_mass(CubePoint::new(0, 3).unwrap()).unwrap();
        let w = corollary_weights(3, 1.0, 3).unwrap();
        assert_eq!(slack_regret_reduce(&rho, &w), Err(Error::NotMonotone));
    }

    #[test]
    fn weight_schedules() {
        let w = corollary_weights(4, 1.0, 3).unwrap();
        assert_eq!(w.as_slice(), [1.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0, 1.0 / 16.0, 0.0]);
        let w = corollary_weights(3, 0.5, 3).unwrap();
        assert!(w.as_slice().iter().all(|&r| r == 1.0 / 64.0));
        assert!(corollary_weights(3, 1.5, 3).is_err());
        assert!(corollary_weights(3, 1.0, 4).is_err());

        let zeros = learner_weights(6, 1.0, &[0.0; 7]).unwrap();
        assert!(zeros.as_slice().iter().all(|&r| r == 0.0));
        let mut levels = vec![0.0; 10_001];
        levels[5000] = 1.0;
        levels[5200] = 1.0;
        let w = learner_weights(10_000, 1.0, &levels).unwrap();
        assert!((w.get(5000) - 400.0).abs() < 1e-9);
        assert!((w.get(5200) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn h0_search() {
        assert_eq!(find_h0(4, 1.0).unwrap(), 3);
        assert_eq!(find_h0(4, 0.25).unwrap(), 4);
        assert!(matches!(find_h0(10, 0.25), Err(Error::NoValidH0 { n: 10, .. })));
        assert!(find_h0(10, 0.0).is_err());
    }
}
