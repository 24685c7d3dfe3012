//! Numerical checks of the conditions the learner's window schedule must meet,
//! and of the binomial tail-ratio bound.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cube::{ratio_bound, BinomialTable};
use crate::error::Result;
use crate::estimators::learn::{nine_sqrt_ceil, LearnerParams};
use crate::numeric::{pairwise_sum, pairwise_sum_by};
use crate::structural::check_eps;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub n: u32,
    pub eps: f64,
    /// Largest step `L_{h+1} − L_h`; the schedule is non-increasing iff ≤ 0.
    pub cond_a: bool,
    pub cond_a_max_step: f64,
    pub cond_b: bool,
    pub cond_b_max_level: f64,
    pub cond_b_bound: f64,
    pub cond_c: bool,
    pub cond_c_value: f64,
    pub cond_d: bool,
    pub cond_d_value: f64,
    pub cond_d_bound: f64,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c && self.cond_d
    }
}

/// Level weight in condition (d).
pub fn cond_d_weight(n: u32, h: u32) -> f64 {
    let nf = n as f64;
    let hf = h as f64;
    if hf <= nf / 2.0 - libm::sqrt(nf * libm::log(nf)) {
        400.0 / libm::pow(nf, 2.5)
    } else if hf < nf / 2.0 + libm::sqrt(nf) {
        40000.0 / nf
    } else {
        let r = (hf - nf / 2.0) / nf;
        40000.0 * r * r
    }
}

pub fn cond_d_bound(eps: f64) -> f64 {
    eps * eps / 20000.0
}

pub fn check_conditions(n: u32, eps: f64, params: &LearnerParams) -> Result<ConditionReport> {
    check_eps(eps)?;
    let levels = &params.levels;
    let cond_a_max_step = levels
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let cond_b_max_level = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cond_b_bound = 9.0 * libm::sqrt(n as f64);

    let start = nine_sqrt_ceil(n);
    let binom = BinomialTable::new(n);
    let (cond_c_value, cond_d_value) = if start > n {
        (0.0, 0.0)
    } else {
        let count = (n - start + 1) as usize;
        let h = |i: usize| start + i as u32;
        let c = pairwise_sum_by(count, |i| {
            binom.level_mass(h(i)) * params.a * libm::exp2(-levels[h(i) as usize])
        });
        let d = pairwise_sum_by(count, |i| levels[h(i) as usize] * cond_d_weight(n, h(i)));
        (c, d)
    };
    Ok(ConditionReport {
        n,
        eps,
        cond_a: cond_a_max_step <= 0.0,
        cond_a_max_step,
        cond_b: cond_b_max_level <= cond_b_bound,
        cond_b_max_level,
        cond_b_bound,
        cond_c: cond_c_value <= 0.5,
        cond_c_value,
        cond_d: cond_d_value <= cond_d_bound(eps),
        cond_d_value,
        cond_d_bound: cond_d_bound(eps),
    })
}

/// One grid point of [`cond_d_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondDScanPoint {
    pub n: u64,
    /// Weighted sum with the window bounded by `log2(2nA)` below
    /// `n/2 + √n` and by `max(log2(2nA·C(n,h)/2^n), 0)` above.
    pub value: f64,
    pub holds: bool,
    /// `⌈9√n⌉ ≥ ⌈n/2 + √n⌉`: only the top tail is summed, which is empty for
    /// these `n`.
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondDScan {
    pub eps: f64,
    pub bound: f64,
    pub points: Vec<CondDScanPoint>,
    /// Smallest non-vacuous grid `n` where the bound holds, if any.
    pub first_holding: Option<u64>,
}

/// `log2(C(n,h)/2^n)` by Stirling in entropy form; stays accurate for `n`
/// far past where `lgamma` differences cancel.
fn log2_level_mass_approx(n: f64, h: f64) -> f64 {
    if h <= 0.0 || h >= n {
        return -n;
    }
    let t = (2.0 * h - n) / n;
    let kl = h * libm::log1p(t) + (n - h) * libm::log1p(-t);
    let ln = -kl - 0.5 * libm::log(2.0 * core::f64::consts::PI * h * (n - h) / n);
    ln / core::f64::consts::LN_2
}

/// Condition (d) at dimension `n` using the envelope that the asymptotic
/// argument works with, without the zero clamp below the middle.
///
/// Binomials come from Stirling's formula, so `n` may be far beyond dense range.
pub fn cond_d_envelope(n: u64) -> f64 {
    let nf = n as f64;
    let ln2na = libm::pow(nf, 0.2) / 2000.0;
    let cap = ln2na / core::f64::consts::LN_2;
    let start = libm::ceil(9.0 * libm::sqrt(nf));
    let low_edge = libm::floor(nf / 2.0 - libm::sqrt(nf * libm::log(nf)));
    let high_edge = libm::ceil(nf / 2.0 + libm::sqrt(nf));
    let low_count = (low_edge - start + 1.0).max(0.0);
    let mid_count = (high_edge - low_edge.max(start - 1.0) - 1.0).max(0.0);
    let low = low_count * cap * 400.0 / libm::pow(nf, 2.5);
    let mid = mid_count * cap * 40000.0 / nf;
    let mut tail = Vec::new();
    let mut h = high_edge.max(start);
    while h <= nf {
        // log2(2nA·C(n,h)/2^n), with log2(2nA) = cap
        let l = cap + log2_level_mass_approx(nf, h);
        if l <= 0.0 {
            break;
        }
        let r = (h - nf / 2.0) / nf;
        tail.push(40000.0 * r * r * l);
        h += 1.0;
    }
    low + mid + pairwise_sum(&tail)
}

/// Evaluate [`cond_d_envelope`] on `n = start, 2·start, …` up to `budget`.
pub fn cond_d_scan(eps: f64, start: u64, budget: u64) -> Result<CondDScan> {
    check_eps(eps)?;
    let bound = cond_d_bound(eps);
    let mut points = Vec::new();
    let mut n = start.max(4);
    while n <= budget {
        let value = cond_d_envelope(n);
        let nf = n as f64;
        let vacuous = libm::ceil(9.0 * libm::sqrt(nf)) >= libm::ceil(nf / 2.0 + libm::sqrt(nf));
        points.push(CondDScanPoint { n, value, holds: value <= bound, vacuous });
        match n.checked_mul(2) {
            Some(next) => n = next,
            None => break,
        }
    }
    let first_holding = points.iter().find(|p| p.holds && !p.vacuous).map(|p| p.n);
    Ok(CondDScan { eps, bound, points, first_holding })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioMargin {
    pub n: u32,
    /// `max_h level_ratio(n,h) − ratio_bound(n,h)`; negative means the bound holds.
    pub max_margin: f64,
    pub worst_h: u32,
}

fn ratio_margin(n: u32) -> RatioMargin {
    let binom = BinomialTable::new(n);
    let mut best = RatioMargin { n, max_margin: f64::NEG_INFINITY, worst_h: 0 };
    for h in 0..=n {
        let m = binom.level_ratio(h) - ratio_bound(n, h);
        if m > best.max_margin {
            best.max_margin = m;
            best.worst_h = h;
        }
    }
    best
}

pub fn ratio_bound_scan(n_list: &[u32]) -> Result<Vec<RatioMargin>> {
    if let Some(&bad) = n_list.iter().find(|&&n| n < 4) {
        return Err(crate::error::Error::DimensionOutOfRange(bad, u32::MAX));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(n_list.par_iter().map(|&n| ratio_margin(n)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    Ok(n_list.iter().map(|&n| ratio_margin(n)).collect())
}

/// Smallest `n` in the list from which every later entry also has a
/// negative margin.
pub fn ratio_bound_threshold(margins: &[RatioMargin]) -> Option<u32> {
    let mut out = None;
    for m in margins.iter().rev() {
        if m.max_margin < 0.0 {
            out = Some(m.n);
        } else {
            break;
        }
    }
    out
}
