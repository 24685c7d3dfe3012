use monocube::cube::{dominates, enumerate_interval, BinomialTable, CubePoint, LevelIter};
use monocube::dist::{self, INEQ_TOL};
use monocube::estimators::{interval_max, phi_exact};
use monocube::structural::{corollary_weights, find_h0, slack_regret_reduce, verify_decomposition};
use proptest::prelude::*;

fn point(n: u32) -> impl Strategy<Value = CubePoint> {
    (0u64..(1u64 << n)).prop_map(move |b| CubePoint::new(b, n).unwrap())
}

proptest! {
    #[test]
    fn interval_size_is_power_of_two(n in 1u32..12, a in any::<u64>(), b in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let x = CubePoint::new((a | b) & mask, n).unwrap();
        let y = CubePoint::new(a & b & mask, n).unwrap();
        prop_assert!(dominates(x, y).unwrap());
        let iv = enumerate_interval(y, x).unwrap();
        prop_assert_eq!(iv.len(), 1usize << (x.weight() - y.weight()));
        prop_assert!(iv.iter().all(|z| dominates(x, *z).unwrap() && dominates(*z, y).unwrap()));
    }

    #[test]
    fn tail_identity(n in 0u32..80, h in 0u32..80) {
        let t = BinomialTable::new(n);
        let h = h.min(n);
        if h < n {
            prop_assert_eq!(t.tail(h), &(t.tail(h + 1) + t.choose(h)));
        }
        prop_assert_eq!(t.tail(0).bits(), n as u64 + 1);
    }

    #[test]
    fn levels_are_sorted_and_sized(n in 0u32..14, h in 0u32..14) {
        let h = h.min(n);
        let level: Vec<u64> = LevelIter::new(n, h).collect();
        prop_assert!(level.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(level.iter().all(|x| x.count_ones() == h));
        prop_assert_eq!(level.len().to_string(), BinomialTable::new(n).choose(h).to_string());
    }

    #[test]
    fn sampler_is_reproducible(n in 1u32..8, seed in any::<u64>(), s2 in any::<u64>()) {
        let rho = dist::random_monotone(n, s2).unwrap();
        let a = dist::sample(&rho, seed, 200);
        let b = dist::sample(&rho, seed, 200);
        prop_assert_eq!(a.masks(), b.masks());
        prop_assert!(a.masks().iter().all(|&m| rho.probs()[m as usize] > 0.0));
    }

    #[test]
    fn random_monotone_is_monotone_distribution(n in 1u32..10, seed in any::<u64>()) {
        let rho = dist::random_monotone(n, seed).unwrap();
        prop_assert!(rho.is_monotone());
        let total: f64 = rho.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn level_density_bound(n in 1u32..11, seed in any::<u64>()) {
        let rho = dist::random_monotone(n, seed).unwrap();
        let t = BinomialTable::new(n);
        for h in 0..=n {
            let mu = rho.level_average(h).unwrap();
            prop_assert!(mu <= 1.0 / t.tail_f64(h) + INEQ_TOL);
        }
    }

    #[test]
    fn phi_sandwich(n in 1u32..9, seed in any::<u64>(), x in any::<u64>(), w in 0u32..9) {
        let rho = dist::random_monotone(n, seed).unwrap();
        let x = CubePoint::new(x & ((1u64 << n) - 1), n).unwrap();
        let w = w.min(x.weight());
        let phi = phi_exact(&rho, x, w).unwrap();
        prop_assert!(phi <= rho.prob(x) + INEQ_TOL);
        let lower = (0..(1u64 << n))
            .filter(|&y| y & !x.bits() == 0 && y.count_ones() + w == x.weight())
            .map(|y| rho.probs()[y as usize])
            .fold(0.0, f64::max);
        prop_assert!(lower <= phi + INEQ_TOL);
    }

    #[test]
    fn interval_max_of_ones_counts_interval(x in point(9), w in 0u32..10) {
        let w = w.min(x.weight());
        let ones = vec![1u64; 1 << 9];
        prop_assert_eq!(interval_max(&ones, x.bits(), w), 1u64 << w);
    }

    #[test]
    fn decomposition_properties(n in 2u32..11, seed in any::<u64>(), e in 0usize..3) {
        let eps = [0.25, 0.5, 1.0][e];
        let h0 = find_h0(n, eps).unwrap_or(n);
        let rho = dist::random_monotone(n, seed).unwrap();
        let w = corollary_weights(n, eps, h0).unwrap();
        let r = slack_regret_reduce(&rho, &w).unwrap();
        let rep = verify_decomposition(&rho, &r, &w, eps);
        prop_assert!(rep.prop1 && rep.prop2 && rep.prop3, "{:?}", rep);
        prop_assert!(dist::is_monotone(&r.f));
    }

    #[test]
    fn decomposition_is_idempotent(n in 2u32..10, seed in any::<u64>()) {
        let h0 = find_h0(n, 1.0).unwrap_or(n);
        let rho = dist::random_monotone(n, seed).unwrap();
        let w = corollary_weights(n, 1.0, h0).unwrap();
        let first = slack_regret_reduce(&rho, &w).unwrap();
        let second = monocube::structural::slack_regret_reduce_table(&first.f, &w).unwrap();
        prop_assert_eq!(&second.f, &first.f);
    }

    #[test]
    fn observation_inequality(n in 1u32..11, seed in any::<u64>()) {
        let rho = dist::random_monotone(n, seed).unwrap();
        let p = rho.probs();
        for k in 0..n {
            let slack_avg: f64 = LevelIter::new(n, k + 1)
                .map(|x| dist::slack(p, CubePoint::new(x, n).unwrap()))
                .sum::<f64>() / BinomialTable::new(n).choose_f64(k + 1);
            let lhs = rho.level_average(k + 1).unwrap();
            let rhs = rho.level_average(k).unwrap() + slack_avg;
            prop_assert!(lhs >= rhs - INEQ_TOL);
        }
    }
}
