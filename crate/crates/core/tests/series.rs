use std::f64::consts::FRAC_1_SQRT_2;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use weber_core::mehler::{
    bilinear_partial_sum, mehler_kernel_closed, mehler_kernel_series, series_for_i, sum_rule_lhs,
    sum_rule_partial, sum_rule_rhs, term_decay_exponent, MehlerPoint, SumRuleQuery,
};
use weber_core::specfun::ln_gamma;
use weber_core::Error;

const SUM_RULE_CASES: [(f64, f64); 3] = [(2.0, 1.0), (3.0, 0.5), (2.5, -0.5)];

#[test]
fn kernel_series_on_random_points() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let p = MehlerPoint::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-0.9..0.9),
        )
        .unwrap();
        let closed = mehler_kernel_closed(&p).unwrap();
        let series = mehler_kernel_series(&p, 1e-11).unwrap().value;
        assert!(
            (series - closed).abs() <= 1e-9 * (1.0 + closed.abs()),
            "{p:?}"
        );
    }
}

#[test]
fn kernel_examples() {
    let p = MehlerPoint::new(1.0, 0.5, 0.0).unwrap();
    let s = mehler_kernel_series(&p, 1e-12).unwrap();
    assert_eq!((s.value, s.terms_used), (1.0, 1));
    let p = MehlerPoint::new(1.0, 1.0, 0.5).unwrap();
    assert!((mehler_kernel_closed(&p).unwrap() - (2.0f64 / 3.0).exp()).abs() < 1e-15);
    let p = MehlerPoint::new(2.0, 1.0, 0.9).unwrap();
    let closed = mehler_kernel_closed(&p).unwrap();
    assert!(
        (mehler_kernel_series(&p, 1e-10).unwrap().value - closed).abs() <= 1e-9 * (1.0 + closed)
    );
    let p = MehlerPoint::new(1.0, 1.0, 0.96).unwrap();
    assert!(mehler_kernel_closed(&p).is_ok());
    assert!(matches!(
        mehler_kernel_series(&p, 1e-10),
        Err(Error::Domain { .. })
    ));
    assert!(MehlerPoint::new(1.0, 1.0, 1.0).is_err());
}

#[test]
fn sum_rule_triples() {
    for nu in [0.5, 1.0, 2.0] {
        for (x, y) in SUM_RULE_CASES {
            let q = SumRuleQuery::new(nu, x, y).unwrap();
            let lhs = sum_rule_lhs(&q, 1e-10).unwrap();
            let rhs = sum_rule_rhs(&q).unwrap();
            assert!(
                (lhs.value - rhs).abs() <= 5e-7 * rhs.abs(),
                "ν={nu} x={x} y={y}"
            );
            assert!(lhs.terms_used > 0);
        }
    }
}

#[test]
fn sum_rule_first_term() {
    let q = SumRuleQuery::new(1.5, 2.0, 1.0).unwrap();
    assert!((sum_rule_partial(&q, 1) - (-1.25f64).exp() / 1.5).abs() < 1e-16);
    assert!(SumRuleQuery::new(1.0, 1.0, 1.0).is_err());
}

/// `2 Σ_{n<N} H_n(0)²/(2ⁿn!(2ν+n))`; only even `n = 2m` survive, each
/// contributing `(2m)!/(4^m (m!)²)`.
fn origin_partial_sum(nu: f64, n_terms: usize) -> f64 {
    (0..n_terms)
        .step_by(2)
        .map(|n| {
            let m = (n / 2) as f64;
            let log_c =
                ln_gamma(2.0 * m + 1.0).unwrap() - m * 4f64.ln() - 2.0 * ln_gamma(m + 1.0).unwrap();
            2.0 * log_c.exp() / (2.0 * nu + n as f64)
        })
        .sum()
}

#[test]
fn partial_sums_at_origin() {
    for nu in [0.25, 1.0, 3.0] {
        for n in [1, 2, 17, 200] {
            let got = 2.0 * bilinear_partial_sum(0.0, 0.0, 2.0 * nu, n);
            let want = origin_partial_sum(nu, n);
            assert!((got - want).abs() <= 1e-13 * want, "ν={nu} N={n}");
        }
        assert_eq!(2.0 * bilinear_partial_sum(0.0, 0.0, 2.0 * nu, 1), 1.0 / nu);
    }
}

#[test]
fn diagonal_is_rejected() {
    assert!(matches!(
        series_for_i(1.0, 0.7, 0.7, 1e-10),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn term_decay_follows_three_halves() {
    for nu in [0.5, 1.0, 2.0] {
        for (x, y) in SUM_RULE_CASES {
            let p =
                term_decay_exponent(x * FRAC_1_SQRT_2, y * FRAC_1_SQRT_2, nu, 100, 20_000).unwrap();
            assert!((1.3..=1.7).contains(&p), "ν={nu} x={x} y={y}: exponent {p}");
        }
    }
}

#[test]
fn scaled_terms_stay_bounded() {
    let (x, y) = (2.0 * FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let mut peak: f64 = 0.0;
    for n in [100, 1_000, 10_000, 100_000] {
        let term = bilinear_partial_sum(x, y, 1.0, n + 1) - bilinear_partial_sum(x, y, 1.0, n);
        peak = peak.max(term.abs() * (n as f64).powf(1.5));
    }
    assert!(peak.is_finite() && peak < 10.0);
}
