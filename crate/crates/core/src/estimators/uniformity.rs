use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ceil_count;
use super::phi::{interval_max, phi_hat_from_counts};
use crate::cube::LevelIter;
use crate::dist::{check_dense_dim, DenseDistribution, SampleSource};
use crate::error::{Error, Result};
use crate::numeric::{inv_pow2, pairwise_sum};
use crate::structural::{check_eps, find_h0};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UniformityOverrides {
    pub h0: Option<u32>,
    pub window: Option<u32>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
}

/// Every resolved quantity of the distance-to-uniform estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityPlan {
    pub n: u32,
    pub eps: f64,
    pub h0: u32,
    /// Window `L = ⌊√n ε⁴ / 512⌋` unless overridden.
    pub window: u32,
    pub n1: u64,
    pub n2_log2: f64,
    pub n2: Option<u64>,
}

/// Resolve `h0`, `N₁`, `L` and `N₂`. Fails with `NoValidH0` when no `h0`
/// fits and none was supplied.
pub fn plan_distance_to_uniform(n: u32, eps: f64, overrides: &UniformityOverrides) -> Result<UniformityPlan> {
    check_eps(eps)?;
    let h0 = match overrides.h0 {
        Some(h) if h > n => return Err(Error::LevelOutOfRange { h, n }),
        Some(h) => h,
        None => find_h0(n, eps)?,
    };
    let nf = n as f64;
    let e2 = eps * eps;
    let default_n1 = libm::ceil(32.0 * core::f64::consts::LN_2 / e2) as u64;
    let default_window = libm::floor(libm::sqrt(nf) * e2 * e2 / 512.0) as u32;
    let window = overrides.window.unwrap_or(default_window);
    let lf = window as f64;
    let ln2 = core::f64::consts::LN_2;
    let n2_log2 = nf - lf + libm::log2(192.0 / e2) + libm::log2(nf * ln2 + lf * libm::log(nf) + 4.0 * ln2);
    Ok(UniformityPlan {
        n,
        eps,
        h0,
        window,
        n1: overrides.n1.unwrap_or(default_n1),
        n2_log2,
        n2: overrides.n2.or_else(|| ceil_count(n2_log2)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformityEstimate {
    /// Half the fraction of `S₁` at weight `h0` or more.
    pub d1: f64,
    /// `½ Σ_{L ≤ ||x|| < h0} |φ̂(x) − 2^-n|` from `S₂`.
    pub d2: f64,
    pub estimate: f64,
}

/// Draw `S₁` then `S₂` from `source` and return `d̂₁ + d̂₂`.
pub fn estimate_distance_to_uniform<S: SampleSource>(source: &mut S, plan: &UniformityPlan) -> Result<UniformityEstimate> {
    let n = plan.n;
    check_dense_dim(n)?;
    if source.dim() != n {
        return Err(Error::DimensionMismatch(source.dim(), n));
    }
    let n2 = plan
        .n2
        .ok_or(Error::InvalidParameter("formula N2 is not representable; override it"))?;
    let s1 = source.draw_set(plan.n1 as usize);
    let high = s1.masks().iter().filter(|m| m.count_ones() >= plan.h0).count();
    let d1 = if plan.n1 == 0 { 0.0 } else { 0.5 * high as f64 / plan.n1 as f64 };

    let s2 = source.draw_set(n2 as usize);
    let counts = s2.count_table()?;
    let unit = inv_pow2(n);
    let mut terms = Vec::new();
    for w in plan.window..plan.h0 {
        for x in LevelIter::new(n, w) {
            let phi = phi_hat_from_counts(&counts, n2, x, plan.window);
            terms.push((phi - unit).abs());
        }
    }
    let d2 = 0.5 * pairwise_sum(&terms);
    Ok(UniformityEstimate { d1, d2, estimate: d1 + d2 })
}

/// The estimator with every sampled quantity replaced by its exact value:
/// `d̂₁` by half the true mass at weight `h0` or more, `φ̂` by `φ`.
pub fn distance_to_uniform_oracle(rho: &DenseDistribution, plan: &UniformityPlan) -> Result<UniformityEstimate> {
    let n = rho.dim();
    if n != plan.n {
        return Err(Error::DimensionMismatch(n, plan.n));
    }
    let law = rho.weight_law();
    let d1 = 0.5 * pairwise_sum(&law[plan.h0 as usize..]);
    let unit = inv_pow2(n);
    let scale = inv_pow2(plan.window);
    let mut terms = Vec::new();
    for w in plan.window..plan.h0 {
        for x in LevelIter::new(n, w) {
            let phi = interval_max(rho.probs(), x, plan.window) * scale;
            terms.push((phi - unit).abs());
        }
    }
    let d2 = 0.5 * pairwise_sum(&terms);
    Ok(UniformityEstimate { d1, d2, estimate: d1 + d2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::uniform;

    #[test]
    fn formula_constants() {
        let plan = plan_distance_to_uniform(4, 1.0, &UniformityOverrides::default()).unwrap();
        assert_eq!(plan.n1, 23);
        assert_eq!(plan.h0, 3);
        assert_eq!(plan.window, 0);
        let over = UniformityOverrides { h0: Some(700), ..Default::default() };
        let plan = plan_distance_to_uniform(1024, 1.0, &over).unwrap();
        assert_eq!(plan.window, 0);
        assert_eq!(plan.n2, None);
    }

    #[test]
    fn missing_h0_propagates() {
        let err = plan_distance_to_uniform(10, 0.25, &UniformityOverrides::default()).unwrap_err();
        assert!(matches!(err, Error::NoValidH0 { .. }));
    }

    #[test]
    fn oracle_on_uniform_is_zero() {
        let plan = plan_distance_to_uniform(4, 1.0, &UniformityOverrides::default()).unwrap();
        let u = uniform(4).unwrap();
        let est = distance_to_uniform_oracle(&u, &plan).unwrap();
        // d1 is half the uniform tail mass 5/16, d2 vanishes
        assert_eq!(est.d2, 0.0);
        assert_eq!(est.d1, 5.0 / 32.0);
        assert!(est.estimate <= 1.0);
    }
}
