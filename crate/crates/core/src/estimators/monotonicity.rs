use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::learn::{learn, LearnerParams};
use super::lp::{Constraint, LinearProgram, Relation};
use crate::dist::{is_monotone, table_dim, table_tv, DenseDistribution, SampleSource};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::structural::check_eps;

/// Largest dimension accepted by the exact LP solve.
pub const LP_MAX_DIM: u32 = 10;

/// Estimates the total variation distance between the sampled distribution
/// and a candidate table.
pub trait DistanceOracle {
    fn distance_to_source(&mut self, candidate: &[f64]) -> Result<f64>;
}

/// Distance from a table to the nearest monotone probability distribution.
pub trait MonotoneDistanceOracle {
    fn distance_to_monotone(&mut self, candidate: &[f64]) -> Result<f64>;
}

/// Exact total variation against a known ground truth.
#[derive(Debug, Clone, Copy)]
pub struct ExactTvOracle<'a> {
    pub truth: &'a DenseDistribution,
}

impl DistanceOracle for ExactTvOracle<'_> {
    fn distance_to_source(&mut self, candidate: &[f64]) -> Result<f64> {
        table_tv(self.truth.probs(), candidate)
    }
}

/// [`distance_to_monotone`] behind the oracle interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct LpMonotoneDistance;

impl MonotoneDistanceOracle for LpMonotoneDistance {
    fn distance_to_monotone(&mut self, candidate: &[f64]) -> Result<f64> {
        distance_to_monotone(candidate)
    }
}

/// `min ½ Σ |ρ̂ − μ|` over monotone probability distributions `μ`.
///
/// Written as `μ = ρ̂ + p − q` with `p, q ≥ 0`, one constraint per up-edge,
/// `μ(0^n) ≥ 0` (monotonicity extends it everywhere) and `Σ(p − q) = 1 − Σρ̂`.
pub fn distance_to_monotone(candidate: &[f64]) -> Result<f64> {
    let n = table_dim(candidate)?;
    if n > LP_MAX_DIM {
        return Err(Error::LpTooLarge(n, LP_MAX_DIM));
    }
    if candidate.iter().all(|&v| v >= 0.0) && is_monotone(candidate) {
        return Ok(0.0);
    }
    let len = candidate.len();
    let p = |x: usize| x;
    let q = |x: usize| len + x;
    let mut constraints = Vec::with_capacity(n as usize * len / 2 + 2);
    for x in 0..len {
        for i in 0..n {
            let bit = 1usize << i;
            if x & bit == 0 {
                let y = x | bit;
                // μ(x) − μ(y) ≤ 0
                constraints.push(Constraint {
                    coeffs: alloc::vec![(p(x), 1.0), (q(x), -1.0), (p(y), -1.0), (q(y), 1.0)],
                    rel: Relation::Le,
                    rhs: candidate[y] - candidate[x],
                });
            }
        }
    }
    constraints.push(Constraint {
        coeffs: alloc::vec![(p(0), 1.0), (q(0), -1.0)],
        rel: Relation::Ge,
        rhs: -candidate[0],
    });
    let mut total = Vec::with_capacity(2 * len);
    for x in 0..len {
        total.push((p(x), 1.0));
        total.push((q(x), -1.0));
    }
    constraints.push(Constraint { coeffs: total, rel: Relation::Eq, rhs: 1.0 - pairwise_sum(candidate) });
    let lp = LinearProgram { num_vars: 2 * len, objective: alloc::vec![0.5; 2 * len], constraints };
    let sol = lp.minimize()?;
    Ok(sol.objective.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityStep {
    /// The learned table is far from the sampled distribution.
    Distance,
    /// The learned table is far from every monotone distribution.
    Projection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    pub accept: bool,
    pub rejected_at: Option<MonotonicityStep>,
    /// Reject when a distance exceeds this (`ε/2`); ties accept.
    pub threshold: f64,
    pub learned_distance: f64,
    /// Not evaluated when the distance step already rejected.
    pub monotone_distance: Option<f64>,
}

/// Learn, compare the estimate with the source, then with the monotone cone.
///
/// `params` should be learner parameters for error `ε/4`.
pub fn test_monotonicity<S, D, M>(
    source: &mut S,
    params: &LearnerParams,
    eps: f64,
    distance: &mut D,
    monotone: &mut M,
) -> Result<MonotonicityVerdict>
where
    S: SampleSource,
    D: DistanceOracle + ?Sized,
    M: MonotoneDistanceOracle + ?Sized,
{
    check_eps(eps)?;
    let threshold = eps / 2.0;
    let learned = learn(source, params)?;
    let rho_hat = &learned.table.rho_hat;
    let learned_distance = distance.distance_to_source(rho_hat)?;
    if learned_distance > threshold {
        return Ok(MonotonicityVerdict {
            accept: false,
            rejected_at: Some(MonotonicityStep::Distance),
            threshold,
            learned_distance,
            monotone_distance: None,
        });
    }
    let d = monotone.distance_to_monotone(rho_hat)?;
    let accept = d <= threshold;
    Ok(MonotonicityVerdict {
        accept,
        rejected_at: if accept { None } else { Some(MonotonicityStep::Projection) },
        threshold,
        learned_distance,
        monotone_distance: Some(d),
    })
}
