//! Property suites: containment of exact arithmetic, refinement
//! monotonicity, sandwich inequalities, sieve behavior, and the
//! total-monotonicity samples.

mod common;

use common::Lcg;
use harmonic_li_core::util::pow10;
use harmonic_li_core::*;
use proptest::prelude::*;
use rug::ops::Pow;
use rug::Rational;

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-100_000i64..100_000, 1u64..10_000).prop_map(|(n, d)| Rational::from((n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    // every arithmetic operation contains the exact rational image
    #[test]
    fn interval_ops_contain_exact(a in rational_strategy(), b in rational_strategy()) {
        let ia = Interval::from_rational(&a, 30);
        let ib = Interval::from_rational(&b, 30);
        prop_assert!(ia.add(&ib).contains_rational(&Rational::from(&a + &b)));
        prop_assert!(ia.sub(&ib).contains_rational(&Rational::from(&a - &b)));
        prop_assert!(ia.mul(&ib).contains_rational(&Rational::from(&a * &b)));
        if b.cmp0() != std::cmp::Ordering::Equal {
            let q = Rational::from(&a / &b);
            prop_assert!(ia.div(&ib).unwrap().contains_rational(&q));
            let r = Rational::from(&b).recip();
            prop_assert!(ib.recip().unwrap().contains_rational(&r));
        }
        prop_assert!(ia.pow_int(3).unwrap().contains_rational(&a.clone().pow(3)));
        prop_assert!(ia.pow_int(2).unwrap().contains_rational(&a.clone().pow(2)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // exp/log/sqrt containment through round trips
    #[test]
    fn transcendental_round_trips(a in 1i64..1_000_000, d in 1u64..1000) {
        let q = Rational::from((a, d));
        let iv = Interval::from_rational(&q, 35);
        let back = iv.exp().ln().unwrap();
        prop_assert!(back.contains_rational(&q));
        let sq = iv.mul(&iv).sqrt().unwrap();
        prop_assert!(sq.contains_rational(&q));
    }

    // increasing the working precision never produces a disjoint enclosure
    #[test]
    fn refinement_monotonicity(a in 2i64..1_000_000, d in 1u64..1000) {
        let q = Rational::from((a, d));
        let coarse = Interval::from_rational(&q, 20).ln().unwrap().exp();
        let fine = Interval::from_rational(&q, 40).ln().unwrap().exp();
        prop_assert!(coarse.intersects(&fine));
        prop_assert!(fine.width() <= coarse.width());
    }

    // cache serialization round trip
    #[test]
    fn cache_round_trip(xs in proptest::collection::btree_set(2u64..100_000, 1..12)) {
        let mut pc = PrimeCounter::new(SieveConfig::default()).unwrap();
        for &x in &xs {
            pc.pi(x).unwrap();
        }
        let text = pc.cache.to_file_string();
        let parsed = PrimeCountCache::parse(&text).unwrap();
        for &x in &xs {
            prop_assert_eq!(parsed.lookup(x), pc.cache.lookup(x));
        }
    }

    // shift parsing round-trips decimals exactly
    #[test]
    fn shift_parse_decimal(n in -1_000_000i64..1_000_000, scale in 0u32..6) {
        let q = Rational::from((n, 10u64.pow(scale)));
        let s = Shift::Exact(q.clone());
        let reparsed = Shift::parse(&s.to_string()).unwrap();
        prop_assert_eq!(reparsed, Shift::Exact(q));
    }
}

#[test]
fn pi_monotone_and_steps_at_primes() {
    let mut pc = PrimeCounter::new(SieveConfig::default()).unwrap();
    let mut prev = 0;
    for x in 1..=2000u64 {
        let v = pc.pi(x).unwrap();
        assert!(v >= prev, "pi not monotone at {x}");
        prev = v;
    }
    for p in [2u64, 3, 5, 97, 101, 7919, 104729] {
        assert_eq!(
            pc.pi(p).unwrap(),
            pc.pi(p - 1).unwrap() + 1,
            "no step at prime {p}"
        );
    }
    for c in [4u64, 100, 1000, 7918] {
        assert_eq!(
            pc.pi(c).unwrap(),
            pc.pi(c - 1).unwrap(),
            "step at composite {c}"
        );
    }
}

/// The two-sided midpoint-shift bracket for `H_x`, sampled across the
/// domain at two discrete depths.
#[test]
fn harmonic_midpoint_bracket_sampled() {
    let c = cfg();
    let mut rng = Lcg(0xabcdef1234567891);
    for _ in 0..50 {
        let x = Rational::from(100) * rng.unit_rational();
        if x == 0 {
            continue;
        }
        let h_x = harmonic_real(&x, 40, &c).unwrap();
        let gamma = constants::euler_gamma(42, &c).unwrap();
        for n in [10u64, 100] {
            let mut shift_sum = Rational::new();
            for k in 1..=n {
                shift_sum += Rational::from(1) / (&x + Rational::from(k));
            }
            let z = &x + Rational::from((2 * n as i64 + 1, 2));
            let log_z = Interval::from_rational(&z, 44).ln().unwrap();
            // D = (H_x - gamma) - (log(x+n+1/2) - sum)
            let d = h_x
                .sub(&gamma)
                .sub(&log_z)
                .add(&Interval::from_rational(&shift_sum, 44));
            let lower = Interval::from_rational(
                &(Rational::from(1) / (Rational::from(24) * (&z + Rational::from((1, 2))).pow(2))),
                44,
            );
            let upper = Interval::from_rational(
                &(Rational::from(1) / (Rational::from(24) * z.clone().pow(2))),
                44,
            );
            assert!(
                lower.certainly_lt(&d) && d.certainly_lt(&upper),
                "bracket failed at x={x}, n={n}"
            );
        }
    }
}

/// The `n = 0` instance of the bracket on the published grid.
#[test]
fn harmonic_shifted_log_bounds_grid() {
    let c = cfg();
    for xs in ["-0.4", "0", "0.5", "1", "2", "10", "100"] {
        let x = harmonic_li_core::util::rational_from_decimal(xs).unwrap();
        let h_x = harmonic_real(&x, 40, &c).unwrap();
        let gamma = constants::euler_gamma(42, &c).unwrap();
        let z = &x + Rational::from((1, 2));
        let log_z = Interval::from_rational(&z, 44).ln().unwrap();
        let d = h_x.sub(&gamma).sub(&log_z);
        let lower = Interval::from_rational(
            &(Rational::from(1) / (Rational::from(24) * (&x + Rational::from(1)).pow(2))),
            44,
        );
        let upper =
            Interval::from_rational(&(Rational::from(1) / (Rational::from(24) * z.pow(2))), 44);
        assert!(
            lower.certainly_lt(&d) && d.certainly_lt(&upper),
            "failed at x={xs}"
        );
    }
}

/// Total-monotonicity samples at `(t, N) = (1, 1)`: the alternating-sign
/// derivative expressions are certified positive at a deep truncation, and
/// each truncation increases toward its limit, so the limit signs follow.
#[test]
fn total_monotonicity_samples() {
    let c = cfg();
    let n = 2000u64;
    let t = Interval::exact_u64(1, 44);
    let a = Interval::exact_u64(1, 44);
    let b = Interval::exact_u64(n, 44);
    let mut ctx = ShiftContext::new(Shift::Exact(Rational::from(1)), 1, 40, &c).unwrap();
    for order in 1..=3u32 {
        let integral = li::inv_log_power_integral(&t, &a, &b, order, 40, &c).unwrap();
        let sum = ctx.partial_inverse_sum(n, order).unwrap();
        let diff = integral.sub(&sum);
        assert!(
            diff.is_strictly_positive(),
            "order {order} expression not certified positive"
        );
    }

    // derivative against a central finite difference at h = 1e-4
    let theta_estimate = |tq: &Rational| -> f64 {
        let mut ctx = ShiftContext::new(Shift::Exact(tq.clone()), 1, 40, &c).unwrap();
        let (theta, _, _) = ctx.discrepancies(n).unwrap();
        let tails = ctx.theta_tail_bounds(n).unwrap();
        theta.mid_f64() + tails.enclosure().mid_f64()
    };
    let h = Rational::from((1, 10_000));
    let up = theta_estimate(&Rational::from(&Rational::from(1) + &h));
    let down = theta_estimate(&Rational::from(&Rational::from(1) - &h));
    let fd = (up - down) / (2.0 * 1e-4);
    let order2 = li::inv_log_power_integral(&t, &a, &b, 2, 40, &c)
        .unwrap()
        .sub(&ctx.partial_inverse_sum(n, 2).unwrap());
    let analytic = -order2.mid_f64();
    assert!(
        (fd - analytic).abs() < 1e-6,
        "finite difference {fd} vs analytic derivative {analytic}"
    );
}

/// The located maxima decrease strictly in `n` over the computed
/// enclosures (numerical observation, asserted on the outputs themselves).
#[test]
fn rho_sequence_strictly_decreasing() {
    let c = cfg();
    let tol = Rational::from((1u64, 100_000_000));
    let mut prev: Option<Interval> = None;
    for n in 1..=10u64 {
        let rho = rho_n_search(n, &tol, 40, &c).unwrap();
        if let Some(p) = prev {
            assert!(
                rho.certainly_lt(&p),
                "rho_{n} not certified below rho_{}",
                n - 1
            );
        }
        prev = Some(rho);
    }
}

/// `li` sign pattern around its zero as published.
#[test]
fn li_sign_invariants() {
    let c = cfg();
    let mu = soldner_mu(20, &c).unwrap();
    let (mu_lo, mu_hi) = mu.to_rationals();
    let eps = pow10(-6);
    let below = Rational::from(&mu_lo - &eps);
    let above = Rational::from(&mu_hi + &eps);
    assert!(li(&below, 40, &c).unwrap().value.is_strictly_negative());
    assert!(li(&above, 40, &c).unwrap().value.is_strictly_positive());
    assert!(li(&Rational::from((1, 5)), 40, &c)
        .unwrap()
        .value
        .is_strictly_negative());
    // li at an enclosure of mu itself straddles zero
    let at_mu = li_interval(&mu, 40, &c).unwrap();
    assert!(at_mu.contains_zero());
}

/// Every preset's lambda is an admissible upper bound for the beta value
/// its sum actually targets: `beta(t)` plus the summands skipped between
/// `R_t` and the preset's explicit start index.
#[test]
fn preset_lambdas_certified_admissible() {
    let c = cfg();
    for preset in presets() {
        let rc = r_ceiling(&preset.shift, 40, &c).unwrap();
        let bp = beta_bounds(&preset.shift, Some(50), 40, &c).unwrap();
        let mut upper = bp.upper;
        if let SumStart::Explicit(k0) = preset.sum_start {
            let mut ctx = ShiftContext::new(preset.shift.clone(), rc.r_ceil, 40, &c).unwrap();
            for k in rc.r_ceil..k0 {
                upper = upper.add(&ctx.shifted_harmonic(k).unwrap().recip().unwrap());
            }
        }
        let lambda = Interval::from_rational(&preset.lambda, 40);
        let (_, hi) = upper.to_rationals();
        assert!(
            hi <= preset.lambda || upper.intersects(&lambda),
            "preset {} lambda not admissible: upper {:?} vs lambda {}",
            preset.id,
            upper.display_outward(12),
            preset.lambda
        );
        assert!(
            hi <= (&preset.lambda + pow10(-9)),
            "preset {} upper bound exceeds lambda",
            preset.id
        );
    }
}

/// Raising the working precision tightens the certified claim without ever
/// producing a disjoint enclosure.
#[test]
fn beta_bounds_refine_consistently() {
    let c = cfg();
    let coarse = beta_bounds(&Shift::gamma(), Some(50), 25, &c)
        .unwrap()
        .enclosure();
    let fine = beta_bounds(&Shift::gamma(), Some(50), 60, &c)
        .unwrap()
        .enclosure();
    assert!(coarse.intersects(&fine));
    assert!(fine.lo() >= coarse.lo() && fine.hi() <= coarse.hi());
}

/// Montgomery-Vaughan stays strict on adversarial short windows.
#[test]
fn mv_short_windows() {
    let mut pc = PrimeCounter::new(SieveConfig::default()).unwrap();
    // prime-dense short windows
    for (x, y) in [(2u64, 14u64), (100, 150), (9_547, 9_587), (113, 127)] {
        let r = pc
            .mv_gap_check(&Rational::from(x), &Rational::from(y), 30)
            .unwrap();
        assert!(r.holds, "failed at ({x}, {y})");
    }
}
