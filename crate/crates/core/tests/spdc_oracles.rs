//! Down-conversion state: closed forms against truncated numerics.

use bosonic_bell::spdc::{self, build_distribution, pair_probability, pair_tail, Region};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn pair_distribution_normalization() {
    for i in 1..=40 {
        let t = 0.05 * i as f64;
        let d = build_distribution(t, 1e-15).unwrap();
        assert!((d.total() + d.tail_bound - 1.0).abs() < 1e-12, "t = {t}");
        let mut partial = 0.0;
        for p in &d.probabilities {
            partial += p;
            assert!(partial <= 1.0 + 1e-15);
        }
    }
}

#[test]
fn tail_formula_matches_summed_tail() {
    for &t in &[0.1, 0.5, 1.0, 1.5, 2.0] {
        for max_n in [0usize, 1, 5, 20, 100] {
            // Sum far past the point where terms drop below the last ulp.
            let numeric: f64 = (max_n + 1..max_n + 20_000)
                .rev()
                .map(|n| pair_probability(t, n))
                .sum();
            assert!(
                (pair_tail(t, max_n) - numeric).abs() < 1e-12,
                "t={t} M={max_n}"
            );
        }
    }
}

#[test]
fn mean_pair_number() {
    for &t in &[0.2, 0.7, 1.3, 2.0] {
        let d = build_distribution(t, 1e-17).unwrap();
        let want = 2.0 * t.sinh().powi(2);
        assert!(rel(d.mean_pairs(), want) < 1e-10, "t = {t}");
    }
}

#[test]
fn analytic_and_truncated_full_state_agree() {
    for &t in &[0.2, 0.5, 1.0] {
        for m in 1..=3 {
            let analytic = spdc::analytic_full_correlator(t, m).unwrap().to_real();
            let numeric = spdc::numeric_full_correlator(t, m, 1e-12)
                .unwrap()
                .to_real();
            assert!(rel(numeric, analytic) <= 1e-8, "t={t} m={m}");
        }
    }
}

#[test]
fn phases_drop_out_of_the_full_state_expectation() {
    for &t in &[0.3, 1.0] {
        for m in 1..=3 {
            let e = spdc::numeric_full_expectation(t, m, 1e-12).unwrap().value;
            assert!(e.im.abs() <= 1e-12 * e.norm(), "t={t} m={m}: {e}");
            assert!(e.re > 0.0);
        }
    }
}

#[test]
fn f_factor_converges_under_doubled_truncation() {
    for &t in &[0.3, 1.0, 2.0] {
        for m in 1..=6 {
            let coarse = build_distribution(t, 1e-10).unwrap();
            let fine = build_distribution(t, 1e-16).unwrap();
            assert!(fine.max_n >= coarse.max_n);
            let a = spdc::f_factor_log(&coarse, m, m, 1e-12);
            let b = spdc::f_factor_log(&fine, m, m, 1e-12);
            assert!((a - b).abs() < 1e-11 * b.abs().max(1.0), "t={t} m={m}");
            let loose = spdc::f_factor_log(&fine, m, m, 1e-6);
            assert!(
                loose <= b + 1e-15 * b.abs().max(1.0),
                "partial sums grow with truncation"
            );
        }
    }
}

#[test]
fn cauchy_schwarz_chain() {
    for &t in &[0.4, 0.9, 1.6] {
        for m in 1..=4 {
            let (mut coherent, mut incoherent) = (num_complex::Complex64::new(0.0, 0.0), 0.0);
            // The per-N values grow like N^(2m), so run well past the
            // probability cutoff.
            for n in m..=800 {
                let p = pair_probability(t, n);
                let c = spdc::fixed_n_state(n)
                    .unwrap()
                    .cross_expectation(m)
                    .to_complex();
                coherent += c * p;
                incoherent += p * c.norm_sqr();
            }
            assert!(coherent.norm_sqr() <= incoherent);
            let analytic = spdc::analytic_full_correlator(t, m).unwrap().to_real();
            assert!(rel(coherent.norm_sqr(), analytic) < 1e-9, "t={t} m={m}");
        }
    }
}

#[test]
fn full_state_stays_below_bound() {
    for i in 1..=50 {
        let t = 2.0 * i as f64 / 50.0;
        for m in [1, 2, 3, 4, 5, 6] {
            let r = spdc::full_state_report(t, m, 1e-12).unwrap();
            assert!(r.ratio() < 1.0 && !r.violates_bell, "t={t} m={m}");
        }
    }
}

#[test]
fn fixed_n_violation_pattern() {
    let ratios = |n: usize| -> Vec<f64> {
        let s = spdc::fixed_n_state(n).unwrap();
        (1..=n)
            .map(|m| spdc::fixed_n_correlator(&s, m).unwrap().ratio())
            .collect()
    };
    let six = ratios(6);
    assert!((six[5] - 4096.0 / 49.0).abs() < 1e-10);
    let violating: Vec<usize> = six
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 1.0)
        .map(|(i, _)| i + 1)
        .collect();
    assert_eq!(violating, [5, 6]);
    assert!(ratios(12)[1] < 1.0);
    assert!(ratios(3)[2] > 1.0);
}

#[test]
fn mixture_and_pure_state_agree() {
    for &t in &[0.5, 1.0] {
        for m in 1..=2 {
            let c = spdc::mixture_equivalence_check(t, m, 60).unwrap();
            assert!(c.relative() <= 1e-12, "t={t} m={m}: {c:?}");
            assert!(c.pure_correlator > 0.0);
        }
    }
}

#[test]
fn reduced_states_carry_no_coherence() {
    for n in 1..=12 {
        for m in 1..=n {
            let v = spdc::reduced_region_moment(n, m).unwrap();
            assert!(v.is_zero(), "N={n} m={m}");
            let s = spdc::fixed_n_state(n).unwrap();
            assert!(s.reduced_moment(Region::B, m).is_zero());
            let r = spdc::fixed_n_region_correlator(&s, Region::A, m).unwrap();
            assert!(!r.violates_bell);
        }
    }
}
