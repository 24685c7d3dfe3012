use core::ops::Add;

use crate::cube::{CubePoint, Submasks, SubmasksOfWeight};
use crate::dist::{DenseDistribution, SampleSet};
use crate::error::{Error, Result};
use crate::numeric::inv_pow2;

/// Largest total of `table` over an interval `[y, x]` with `||x|| − ||y|| = window`.
///
/// `y` ranges over the `C(||x||, window)` ways of clearing `window` set bits
/// of `x`; each interval is summed in ascending mask order.
pub fn interval_max<T>(table: &[T], x: u64, window: u32) -> T
where
    T: Copy + Default + PartialOrd + Add<Output = T>,
{
    let mut best: Option<T> = None;
    for cleared in SubmasksOfWeight::new(x, window) {
        let y = x ^ cleared;
        let mut acc = T::default();
        for s in Submasks::new(cleared) {
            acc = acc + table[(y | s) as usize];
        }
        if best.is_none_or(|b| acc > b) {
            best = Some(acc);
        }
    }
    best.unwrap_or_default()
}

fn check_window(x: CubePoint, window: u32) -> Result<()> {
    if window > x.weight() {
        return Err(Error::WindowTooLarge { window, weight: x.weight() });
    }
    Ok(())
}

/// Empirical interval-max estimate at `x` from a count table of `total` samples.
pub fn phi_hat_from_counts(counts: &[u64], total: u64, x: u64, window: u32) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let best = interval_max(counts, x, window);
    best as f64 * inv_pow2(window) / total as f64
}

/// `(1/2^L) · max_y |{z ∈ S : y ⪯ z ⪯ x}| / N`.
pub fn phi_hat(samples: &SampleSet, x: CubePoint, window: u32) -> Result<f64> {
    check_window(x, window)?;
    if samples.dim() != x.dim() {
        return Err(Error::DimensionMismatch(samples.dim(), x.dim()));
    }
    let counts = samples.count_table()?;
    Ok(phi_hat_from_counts(&counts, samples.count() as u64, x.bits(), window))
}

/// `(1/2^L) · max_y Pr_{z∼ρ}[y ⪯ z ⪯ x]`, the population target of [`phi_hat`].
pub fn phi_exact(rho: &DenseDistribution, x: CubePoint, window: u32) -> Result<f64> {
    check_window(x, window)?;
    if rho.dim() != x.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), x.dim()));
    }
    Ok(interval_max(rho.probs(), x.bits(), window) * inv_pow2(window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{subcube, uniform};

    fn p(bits: u64, n: u32) -> CubePoint {
        CubePoint::new(bits, n).unwrap()
    }

    #[test]
    fn window_zero_is_frequency() {
        let s = SampleSet::from_masks(3, 0, vec![0b101; 5]).unwrap();
        assert_eq!(phi_hat(&s, p(0b101, 3), 0).unwrap(), 1.0);
        assert_eq!(phi_hat(&s, p(0b111, 3), 0).unwrap(), 0.0);
    }

    #[test]
    fn hand_enumerated_interval_max() {
        let s = SampleSet::from_masks(2, 0, vec![0b01, 0b11, 0b11]).unwrap();
        assert_eq!(phi_hat(&s, p(0b11, 2), 1).unwrap(), 0.5);
        assert!(phi_hat(&s, p(0b01, 2), 2).is_err());
    }

    #[test]
    fn exact_targets() {
        let u = uniform(5).unwrap();
        for x in [0b00111u64, 0b11111, 0b10001] {
            for l in 0..=(x.count_ones()) {
                assert_eq!(phi_exact(&u, p(x, 5), l).unwrap(), 1.0 / 32.0);
            }
        }
        let sc = subcube(p(0b10, 2)).unwrap();
        assert_eq!(phi_exact(&sc, p(0b11, 2), 1).unwrap(), 0.5);
    }
}
