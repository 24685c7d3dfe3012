//! Cross-checks against computations that share no code with the library.

use monocube::cube::{enumerate_interval, BinomialTable, CubePoint};
use monocube::dist::{self, DenseDistribution};
use monocube::estimators::{distance_to_monotone, learner_params, phi_exact, LearnerOverrides};
use monocube::lowerbound::{
    binomial_shift_tv, center_weight, collision_probability, consecutive_binomial_closed_form,
    consecutive_binomial_tv, consecutive_binomial_tv_scan,
};
use monocube::structural::find_h0;

fn pascal_u128(n: usize) -> Vec<Vec<u128>> {
    let mut rows = vec![vec![1u128]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1u128; i + 1];
        for k in 1..i {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}

fn binom_pmf(n: usize) -> Vec<f64> {
    let mut row = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![0.0; row.len() + 1];
        for (k, v) in row.iter().enumerate() {
            next[k] += v / 2.0;
            next[k + 1] += v / 2.0;
        }
        row = next;
    }
    row
}

#[test]
fn binomials_match_pascal() {
    let rows = pascal_u128(100);
    for n in [0u32, 1, 7, 31, 62, 100] {
        let t = BinomialTable::new(n);
        let mut tail = 0u128;
        for k in (0..=n).rev() {
            let c = rows[n as usize][k as usize];
            tail += c;
            assert_eq!(t.choose(k).to_string(), c.to_string());
            assert_eq!(t.tail(k).to_string(), tail.to_string());
        }
    }
}

#[test]
fn level_ratio_matches_float_pascal() {
    for n in [4u32, 10, 40] {
        let pmf = binom_pmf(n as usize);
        let t = BinomialTable::new(n);
        for h in 0..=n {
            let tail: f64 = pmf[h as usize..].iter().sum();
            let want = pmf[h as usize] / tail;
            assert!((t.level_ratio(h) - want).abs() <= 1e-12 * want.max(1.0));
        }
    }
}

#[test]
fn shift_tv_matches_direct_sum() {
    for (n, m) in [(8u32, 3u32), (12, 3), (16, 4), (30, 5)] {
        let a = binom_pmf(n as usize);
        let b = binom_pmf((n - m) as usize);
        let mut l1 = 0.0;
        for w in 0..=n as usize {
            let bw = if w >= m as usize { b[w - m as usize] } else { 0.0 };
            l1 += (a[w] - bw).abs();
        }
        assert!((binomial_shift_tv(n, m).unwrap() - l1 / 2.0).abs() < 1e-13);
    }
}

#[test]
fn consecutive_tv_small_k() {
    // Bin(1) vs Bin(2): ½(¼ + 0 + ¼)
    assert!((consecutive_binomial_tv(1).unwrap() - 0.25).abs() < 1e-15);
    // Bin(3) = (1,3,3,1)/8, Bin(4) = (1,4,6,4,1)/16
    assert!((consecutive_binomial_tv(3).unwrap() - 3.0 / 16.0).abs() < 1e-15);
    // the telescoped form is the L1 distance at k = 1, 3 and an upper bound later
    assert!((consecutive_binomial_closed_form(3).unwrap() - 3.0 / 8.0).abs() < 1e-15);
    assert!((consecutive_binomial_closed_form(5).unwrap() - 11.0 / 32.0).abs() < 1e-15);
    assert!((consecutive_binomial_tv(5).unwrap() - 5.0 / 32.0).abs() < 1e-15);
    let scan = consecutive_binomial_tv_scan(200);
    for k in 1..=200u32 {
        let a = binom_pmf(k as usize);
        let b = binom_pmf(k as usize + 1);
        let l1: f64 = (0..=k as usize + 1)
            .map(|w| (a.get(w).copied().unwrap_or(0.0) - b[w]).abs())
            .sum();
        assert!((scan[k as usize - 1] - l1 / 2.0).abs() < 1e-12, "k = {k}");
    }
}

#[test]
fn collision_probability_by_counting() {
    // all injective maps from q picks into K components, over K^q
    for (k, q) in [(8u64, 3u64), (5, 5), (6, 7)] {
        let mut distinct = 0u64;
        let total = k.pow(q as u32);
        for code in 0..total {
            let mut seen = 0u64;
            let mut c = code;
            let mut ok = true;
            for _ in 0..q {
                let d = c % k;
                c /= k;
                if seen & (1 << d) != 0 {
                    ok = false;
                }
                seen |= 1 << d;
            }
            distinct += ok as u64;
        }
        let want = distinct as f64 / total as f64;
        assert!((collision_probability(k, q).unwrap() - want).abs() < 1e-15);
    }
}

#[test]
fn phi_exact_matches_brute_force_intervals() {
    let rho = dist::random_monotone(6, 11).unwrap();
    for xb in 0..64u64 {
        let x = CubePoint::new(xb, 6).unwrap();
        for window in 0..=x.weight() {
            let mut best = 0.0f64;
            for yb in 0..64u64 {
                let y = CubePoint::new(yb, 6).unwrap();
                if yb & !xb != 0 || y.weight() + window != x.weight() {
                    continue;
                }
                let mass: f64 = enumerate_interval(y, x).unwrap().iter().map(|z| rho.prob(*z)).sum();
                best = best.max(mass);
            }
            let want = best / (1u64 << window) as f64;
            assert!((phi_exact(&rho, x, window).unwrap() - want).abs() < 1e-15);
        }
    }
}

#[test]
fn find_h0_small_cases() {
    // n = 4 tails: 16, 15, 11, 5, 1 over 16
    assert_eq!(find_h0(4, 1.0).unwrap(), 3);
    assert_eq!(find_h0(4, 0.25).unwrap(), 4);
    assert!(find_h0(4, 0.1).is_err());
}

#[test]
fn learner_constants_at_1024() {
    let p = learner_params(1024, 1.0, &LearnerOverrides::default()).unwrap();
    let a = (1024f64.powf(0.2) / 2000.0).exp() / 2048.0;
    assert!((p.a - a).abs() < 1e-18);
    assert_eq!(p.low_cutoff, 288);
    assert!(p.levels.iter().all(|&l| l == 0.0));
    // L_512 = log2(2nA) + log2 C(1024, 512) − 1024
    let mid = BinomialTable::new(1024).log2_choose(512);
    let want = (2048.0 * a).log2() + mid - 1024.0;
    assert!((p.raw_levels[512] - want).abs() < 1e-9);
    assert!((p.raw_levels[512] + 5.3).abs() < 0.1);
}

#[test]
fn delta_close_is_shifted_binomial_in_weight() {
    for n in [8u32, 12] {
        let close = dist::delta_close(n, 0.49).unwrap();
        let m = center_weight(n, 0.49);
        let u = dist::uniform(n).unwrap();
        let tv = dist::tv_distance(&close, &u).unwrap();
        assert!((tv - binomial_shift_tv(n, m).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn monotone_distance_matches_hand_solutions() {
    // n = 1: move mass up until the two points tie
    assert!((distance_to_monotone(&[0.9, 0.1]).unwrap() - 0.4).abs() < 1e-12);
    // n = 2: a point mass on the bottom; the closest monotone law is uniform
    assert!((distance_to_monotone(&[1.0, 0.0, 0.0, 0.0]).unwrap() - 0.75).abs() < 1e-12);
    // top-to-bottom shift on n = 2 with ε = 0.3: bottom 0.55, top 0; best
    // monotone law is uniform, at distance ½(0.3 + 0 + 0 + 0.25) = 0.3
    let far = dist::top_to_bottom_shift(2, 0.3).unwrap();
    let d = distance_to_monotone(far.probs()).unwrap();
    assert!(d >= 0.3 - 1e-12, "{d}");
    let mono = DenseDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!(distance_to_monotone(mono.probs()).unwrap(), 0.0);
}
