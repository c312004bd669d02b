use lvlab_core::dirichlet::{additive_energy, PointSet};
use lvlab_core::exponents::{classical_exponent, thm1_exponent, zero_density_curves, RegimePoint};
use lvlab_core::moments::level_sets;
use lvlab_core::primes::{pi_window, psi_window, SieveTables};
use lvlab_core::spectral::{build_gram, summarize, trace_gram};
use lvlab_core::{Points, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

fn r(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_sets_are_separated(count in 0usize..30, seed in any::<u64>(), delta in 0.5f64..3.0) {
        let w: Points = PointSet::random(count, delta, 400.0, seed).unwrap();
        prop_assert_eq!(w.len(), count);
        for p in w.points().windows(2) {
            prop_assert!(p[1] - p[0] >= delta);
        }
        prop_assert!(w.points().iter().all(|t| (0.0..=400.0).contains(t)));
    }

    #[test]
    fn energy_is_translation_invariant(seed in any::<u64>(), shift in -50i32..50) {
        let w = PointSet::random(20, 1.0, 120.0, seed).unwrap();
        let moved: Vec<f64> = w.points().iter().map(|t| t + shift as f64).collect();
        let e = additive_energy(w.points(), 1.0).unwrap();
        prop_assert_eq!(e, additive_energy(&moved, 1.0).unwrap());
        let n = w.len() as u64;
        prop_assert!(e >= n * n && e <= n * n * n);
        prop_assert!(level_sets(w.points()).unwrap().check(e));
    }

    #[test]
    fn gram_trace_and_singular_bound(seed in any::<u64>(), count in 1usize..10) {
        let w = PointSet::random(count, 2.0, 200.0, seed).unwrap();
        let g = build_gram(w.points(), 64).unwrap();
        let s = summarize(&g).unwrap();
        prop_assert!(s.hermitian_residual <= 1e-9 * s.trace1);
        prop_assert!(s.s1 * s.s1 <= trace_gram(&g) * (1.0 + 1e-9));
        prop_assert!(s.s1 <= s.sv_bound * (1.0 + 1e-9));
    }

    #[test]
    fn thm1_never_above_classical(i in 1i64..98, j in 10i64..=83) {
        let p = RegimePoint::new(r(700 + i, 1000), r(j, 100).min(r(5, 6))).unwrap();
        prop_assert!(thm1_exponent(&p) <= classical_exponent(&p));
    }

    #[test]
    fn envelope_is_minimum(i in 1i64..500) {
        let z = zero_density_curves(&r(500 + i, 1000)).unwrap();
        prop_assert!(z.envelope <= z.ingham && z.envelope <= z.huxley && z.envelope <= z.new);
        prop_assert!(z.envelope == z.ingham || z.envelope == z.huxley || z.envelope == z.new);
    }

    #[test]
    fn mobius_is_multiplicative(a in 1u64..300, b in 1u64..300) {
        let s = SieveTables::new(90_000).unwrap();
        if num_integer::gcd(a, b) == 1 {
            prop_assert_eq!(s.mu(a * b).unwrap(), s.mu(a).unwrap() * s.mu(b).unwrap());
        }
    }

    #[test]
    fn windows_are_additive(x in 0u64..200_000, y1 in 0u64..5_000, y2 in 0u64..5_000) {
        let whole: f64 = psi_window(x, y1 + y2).unwrap();
        let parts: f64 = psi_window::<f64>(x, y1).unwrap() + psi_window::<f64>(x + y1, y2).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-8 * whole.max(1.0));
        prop_assert_eq!(pi_window(x, y1 + y2).unwrap(), pi_window(x, y1).unwrap() + pi_window(x + y1, y2).unwrap());
    }
}
