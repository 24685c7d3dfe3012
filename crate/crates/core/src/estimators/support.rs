use alloc::vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ceil_count;
use crate::cube::{full_mask, CubePoint};
use crate::dist::{SampleSet, SampleSource, MAX_DENSE_DIM};
use crate::error::{Error, Result};
use crate::structural::check_eps;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SupportOverrides {
    pub m1: Option<u64>,
    pub m2: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPlan {
    pub n: u32,
    pub eps: f64,
    pub m1_log2: f64,
    pub m1: Option<u64>,
    pub m2: u64,
}

/// `M₁ = 2^n / 2^{(ε²/64)√n} · (ln(32/ε) + 1)` and `M₂ = 32 ln 2 / ε²`, rounded up.
pub fn plan_support(n: u32, eps: f64, overrides: &SupportOverrides) -> Result<SupportPlan> {
    check_eps(eps)?;
    crate::cube::check_dim(n)?;
    let nf = n as f64;
    let e2 = eps * eps;
    let m1_log2 = nf - e2 / 64.0 * libm::sqrt(nf) + libm::log2(libm::log(32.0 / eps) + 1.0);
    let m2 = libm::ceil(32.0 * core::f64::consts::LN_2 / e2) as u64;
    Ok(SupportPlan {
        n,
        eps,
        m1_log2,
        m1: overrides.m1.or_else(|| ceil_count(m1_log2)),
        m2: overrides.m2.unwrap_or(m2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportEstimate {
    pub covered_probes: u64,
    pub probes: u64,
    /// Fraction of probes covered, the estimate of the support fraction.
    pub eta_hat: f64,
}

/// True iff some sample `z` satisfies `z ⪯ y`.
pub fn covered(y: CubePoint, s1: &SampleSet) -> Result<bool> {
    if y.dim() != s1.dim() {
        return Err(Error::DimensionMismatch(y.dim(), s1.dim()));
    }
    let b = y.bits();
    Ok(s1.masks().iter().any(|&z| z & !b == 0))
}

/// Draw `S₁` from `source`, then `M₂` uniform probes from the stream seeded
/// by `probe_seed`, and report the covered fraction.
pub fn estimate_support<S: SampleSource>(source: &mut S, plan: &SupportPlan, probe_seed: u64) -> Result<SupportEstimate> {
    let n = plan.n;
    if source.dim() != n {
        return Err(Error::DimensionMismatch(source.dim(), n));
    }
    let m1 = plan
        .m1
        .ok_or(Error::InvalidParameter("formula M1 is not representable; override it"))?;
    let s1 = source.draw_set(m1 as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(probe_seed);
    let mask = full_mask(n);
    let mut hits = 0u64;
    if n <= MAX_DENSE_DIM {
        // up-closure of S₁ by an OR subset transform, then O(1) lookups
        let mut up = vec![false; 1usize << n];
        for &z in s1.masks() {
            up[z as usize] = true;
        }
        for i in 0..n {
            let bit = 1usize << i;
            for y in 0..up.len() {
                if y & bit != 0 && up[y ^ bit] {
                    up[y] = true;
                }
            }
        }
        for _ in 0..plan.m2 {
            let y = rng.random::<u64>() & mask;
            if up[y as usize] {
                hits += 1;
            }
        }
    } else {
        for _ in 0..plan.m2 {
            let y = CubePoint::new_unchecked(rng.random::<u64>() & mask, n);
            if covered(y, &s1)? {
                hits += 1;
            }
        }
    }
    let eta_hat = if plan.m2 == 0 { 0.0 } else { hits as f64 / plan.m2 as f64 };
    Ok(SupportEstimate { covered_probes: hits, probes: plan.m2, eta_hat })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u64, n: u32) -> CubePoint {
        CubePoint::new(bits, n).unwrap()
    }

    #[test]
    fn coverage_examples() {
        let s = SampleSet::from_masks(4, 0, vec![0b0011]).unwrap();
        assert!(covered(p(0b0111, 4), &s).unwrap());
        assert!(!covered(p(0b0100, 4), &s).unwrap());
        let empty = SampleSet::from_masks(4, 0, vec![]).unwrap();
        assert!((0..16).all(|y| !covered(p(y, 4), &empty).unwrap()));
    }

    #[test]
    fn formula_counts() {
        let plan = plan_support(12, 1.0, &SupportOverrides::default()).unwrap();
        assert_eq!(plan.m2, 23);
        assert!(plan.m1.is_some());
    }
}
