use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ceil_count;
use super::phi::phi_hat_from_counts;
use crate::cube::BinomialTable;
use crate::dist::{check_dense_dim, SampleSet, SampleSource};
use crate::error::{Error, Result};
use crate::numeric::{inv_pow2, pairwise_sum};
use crate::structural::check_eps;

/// Optional replacements for every resolved learner quantity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LearnerOverrides {
    pub a: Option<f64>,
    /// Either one window for every level or a full per-level schedule.
    pub levels: Option<Vec<f64>>,
    pub low_cutoff: Option<u32>,
    pub samples: Option<u64>,
}

/// Resolved learner schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerParams {
    pub n: u32,
    pub eps: f64,
    pub a: f64,
    /// Window schedule `L_h`, clamped at zero.
    pub levels: Vec<f64>,
    /// The schedule before clamping (what the formula gives).
    pub raw_levels: Vec<f64>,
    /// Points below this weight get `φ̂ = 0`.
    pub low_cutoff: u32,
    /// `log2` of the formula sample count, before rounding.
    pub samples_log2: f64,
    /// Sample count used; `None` when the formula count exceeds 63 bits and
    /// no override was given.
    pub samples: Option<u64>,
}

/// `⌈9√n⌉`, computed in integers.
pub(crate) fn nine_sqrt_ceil(n: u32) -> u32 {
    let target = 81u64 * n as u64;
    let mut c = libm::sqrt(target as f64) as u64;
    while c * c < target {
        c += 1;
    }
    while c > 0 && (c - 1) * (c - 1) >= target {
        c -= 1;
    }
    c as u32
}

/// `A = e^{n^{1/5}/2000} / (2n)`.
pub(crate) fn default_a(n: u32) -> f64 {
    libm::exp(libm::pow(n as f64, 0.2) / 2000.0) / (2.0 * n as f64)
}

/// `log2(2nA · C(n,h) / 2^n)` for `h ≥ n/2`, and the value at `⌈n/2⌉` below.
pub(crate) fn raw_schedule(n: u32, a: f64, binom: &BinomialTable) -> Vec<f64> {
    let base = libm::log2(2.0 * n as f64 * a) - n as f64;
    let mid = n.div_ceil(2);
    let at = |h: u32| base + binom.log2_choose(h);
    (0..=n).map(|h| if h >= mid { at(h) } else { at(mid) }).collect()
}

pub fn learner_params(n: u32, eps: f64, overrides: &LearnerOverrides) -> Result<LearnerParams> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::DimensionOutOfRange(n, u32::MAX));
    }
    let a = overrides.a.unwrap_or_else(|| default_a(n));
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter("A must be positive"));
    }
    let binom = BinomialTable::new(n);
    let raw_levels = raw_schedule(n, a, &binom);
    let levels = match &overrides.levels {
        Some(l) if l.len() == 1 => vec![l[0]; n as usize + 1],
        Some(l) if l.len() == n as usize + 1 => l.clone(),
        Some(_) => return Err(Error::InvalidParameter("window schedule needs 1 or n + 1 entries")),
        None => raw_levels.iter().map(|&l| l.max(0.0)).collect(),
    };
    if levels.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidParameter("windows must be nonnegative"));
    }
    let nf = n as f64;
    let samples_log2 = nf - libm::log2(a) + libm::log2(192.0 / (eps * eps))
        + libm::log2(nf + 9.0 * libm::sqrt(nf) + 4.0);
    let samples = overrides.samples.or_else(|| ceil_count(samples_log2));
    Ok(LearnerParams {
        n,
        eps,
        a,
        levels,
        raw_levels,
        low_cutoff: overrides.low_cutoff.unwrap_or_else(|| nine_sqrt_ceil(n)),
        samples_log2,
        samples,
    })
}

impl LearnerParams {
    /// Integer window used at weight `w`, before the per-point clamp.
    pub fn window(&self, w: u32) -> u32 {
        libm::floor(self.levels[w as usize]) as u32
    }

    /// True when the cutoff exceeds every weight, so `φ̂ ≡ 0`.
    pub fn cutoff_zeroes_everything(&self) -> bool {
        self.low_cutoff > self.n
    }
}

/// `φ̂` and the renormalized estimate `ρ̂ = φ̂ + (1 − Σφ̂)/2^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateTable {
    pub n: u32,
    pub phi_hat: Vec<f64>,
    /// Signed: entries can be negative when `Σφ̂ > 1`.
    pub rho_hat: Vec<f64>,
}

impl EstimateTable {
    pub fn from_phi(n: u32, phi_hat: Vec<f64>) -> Self {
        let deficit = (1.0 - pairwise_sum(&phi_hat)) * inv_pow2(n);
        let rho_hat = phi_hat.iter().map(|p| p + deficit).collect();
        Self { n, phi_hat, rho_hat }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub table: EstimateTable,
    pub samples: u64,
    pub seed: u64,
    /// Points whose window exceeded their weight and was cut down to it.
    pub clamped_points: u64,
    /// Points zeroed because their weight is below the cutoff.
    pub cutoff_points: u64,
}

impl LearnOutcome {
    pub fn all_zeroed_by_cutoff(&self) -> bool {
        self.cutoff_points == self.table.phi_hat.len() as u64
    }
}

/// Draw the parameterized number of samples and run the learner on them.
///
/// When the cutoff exceeds every weight the output cannot depend on the
/// samples, so none are drawn.
pub fn learn<S: SampleSource>(source: &mut S, params: &LearnerParams) -> Result<LearnOutcome> {
    if source.dim() != params.n {
        return Err(Error::DimensionMismatch(source.dim(), params.n));
    }
    if params.cutoff_zeroes_everything() {
        return learn_from_samples(&source.draw_set(0), params);
    }
    let count = params
        .samples
        .ok_or(Error::InvalidParameter("formula sample count is not representable; override it"))?;
    let count = usize::try_from(count).map_err(|_| Error::InvalidParameter("sample count too large"))?;
    let samples = source.draw_set(count);
    learn_from_samples(&samples, params)
}

/// The learner on a fixed multiset (steps 3 and 4).
pub fn learn_from_samples(samples: &SampleSet, params: &LearnerParams) -> Result<LearnOutcome> {
    let n = params.n;
    check_dense_dim(n)?;
    if samples.dim() != n {
        return Err(Error::DimensionMismatch(samples.dim(), n));
    }
    let counts = samples.count_table()?;
    let total = samples.count() as u64;
    let point = |x: usize| -> (f64, bool, bool) {
        let w = (x as u64).count_ones();
        if w < params.low_cutoff {
            return (0.0, false, true);
        }
        let mut window = params.window(w);
        let clamped = window > w;
        if clamped {
            window = w;
        }
        (phi_hat_from_counts(&counts, total, x as u64, window), clamped, false)
    };
    let per_point = map_points(1usize << n, point);
    let clamped_points = per_point.iter().filter(|p| p.1).count() as u64;
    let cutoff_points = per_point.iter().filter(|p| p.2).count() as u64;
    let phi_hat = per_point.into_iter().map(|p| p.0).collect();
    Ok(LearnOutcome {
        table: EstimateTable::from_phi(n, phi_hat),
        samples: total,
        seed: samples.seed(),
        clamped_points,
        cutoff_points,
    })
}

#[cfg(feature = "parallel")]
pub(crate) fn map_points<T: Send, F: Fn(usize) -> T + Sync + Send>(len: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_points<T, F: Fn(usize) -> T>(len: usize, f: F) -> Vec<T> {
    (0..len).map(f).collect()
}

/// Euclidean projection onto the probability simplex. Not part of the
/// learner; an opt-in post-processing step for signed estimates.
pub fn project_to_simplex(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    values.iter().map(|v| (v - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample, uniform};

    #[test]
    fn cutoff_in_integers() {
        assert_eq!(nine_sqrt_ceil(16), 36);
        assert_eq!(nine_sqrt_ceil(1), 9);
        assert_eq!(nine_sqrt_ceil(2), 13);
        assert_eq!(nine_sqrt_ceil(81), 81);
    }

    #[test]
    fn paper_constants_at_1024() {
        let p = learner_params(1024, 1.0, &LearnerOverrides::default()).unwrap();
        assert!((p.a - libm::exp(0.002) / 2048.0).abs() < 1e-15);
        assert!((p.a - 4.8926e-4).abs() < 1e-7);
        assert!((p.raw_levels[512] + 5.3).abs() < 0.05, "{}", p.raw_levels[512]);
        assert!(p.levels.iter().all(|&l| l == 0.0));
        assert_eq!(p.samples, None);
        assert_eq!(p.low_cutoff, 288);
    }

    #[test]
    fn small_dimension_defaults_zero_every_point() {
        let p = learner_params(16, 1.0, &LearnerOverrides::default()).unwrap();
        assert_eq!(p.low_cutoff, 36);
        assert!(p.cutoff_zeroes_everything());
        let p = LearnerParams { samples: Some(1000), ..p };
        let u = uniform(16).unwrap();
        let out = learn(&mut u.sampler(1), &p).unwrap();
        assert!(out.all_zeroed_by_cutoff());
        assert!(out.table.rho_hat.iter().all(|&r| r == 1.0 / 65536.0));
    }

    #[test]
    fn zero_samples_give_uniform() {
        let over = LearnerOverrides { levels: Some(vec![1.0]), low_cutoff: Some(0), samples: Some(0), ..Default::default() };
        let p = learner_params(6, 0.5, &over).unwrap();
        let out = learn_from_samples(&SampleSet::from_masks(6, 0, vec![]).unwrap(), &p).unwrap();
        assert!(out.table.rho_hat.iter().all(|&r| r == 1.0 / 64.0));
    }

    #[test]
    fn renormalization_sums_to_one() {
        let over = LearnerOverrides { levels: Some(vec![2.0]), low_cutoff: Some(0), samples: Some(5000), ..Default::default() };
        let p = learner_params(8, 1.0, &over).unwrap();
        let s = sample(&uniform(8).unwrap(), 11, 5000);
        let out = learn_from_samples(&s, &p).unwrap();
        assert!((pairwise_sum(&out.table.rho_hat) - 1.0).abs() < 1e-9);
        // weights 0 and 1 cannot host a window of 2
        assert_eq!(out.clamped_points, 1 + 8);
    }

    #[test]
    fn simplex_projection() {
        let p = project_to_simplex(&[0.75, 0.5, -0.25]);
        assert!((p[0] - 0.625).abs() < 1e-12 && (p[1] - 0.375).abs() < 1e-12 && p[2] == 0.0);
        assert_eq!(project_to_simplex(&[0.5, 0.5]), [0.5, 0.5]);
    }
}
