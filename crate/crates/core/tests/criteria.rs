use approx::assert_relative_eq;
use proptest::prelude::*;
use radlab::criteria::*;
use radlab::model::{Domain, NonlinearityDesc, ProblemSpec};

fn gradient(p: f64, h: NonlinearityDesc) -> ProblemSpec {
    ProblemSpec::gradient(3, 0.0, 0.0, p, h, Domain::Ball(1.0))
}

#[test]
fn tabulated_h_matches_power_law() {
    let samples: Vec<(f64, f64)> = (0..=2000).map(|i| {
        // clustered near 0, where k^1.5 has an unbounded second derivative
        let k = 40.0 * (i as f64 / 2000.0).powi(2);
        (k, k.powf(1.5))
    }).collect();
    let h = NonlinearityDesc::tabulated(&samples, Some(1.5));
    for t in [0.5f64, 3.0, 7.25, 19.0, 40.0] {
        assert_relative_eq!(eval_h(&h, t), t.powf(2.5) / 2.5, max_relative = 1e-6);
    }
}

#[test]
fn h_potential_matches_closed_form() {
    for s in [1.0, 1.5, 3.0, 6.0] {
        let h = NonlinearityDesc::power(1.0, s);
        for sigma in [0.1f64, 1.0, 4.0, 50.0] {
            let exact = sigma.powf(s + 2.0) / ((s + 1.0) * (s + 2.0));
            assert_relative_eq!(eval_h_potential(&h, sigma).unwrap(), exact, max_relative = 1e-8);
        }
    }
}

#[test]
fn a_and_d_match_closed_forms() {
    // g = r^a t^p: A = 2 ρ^a s^{p+1/2}/(2p+1), D = R^{2a} s^{2p+1}/(2p+1)
    let spec = ProblemSpec::power(3, 1.5, 0.0, 0.7, 2.0, Domain::Ball(2.0));
    for s in [0.01f64, 1.0, 30.0] {
        assert_relative_eq!(eval_a(&spec, 0.5, s).unwrap(), 2.0 * 0.5f64.powf(1.5) * s.powf(1.2) / 2.4, max_relative = 1e-9);
        assert_relative_eq!(eval_dfun(&spec, 2.0, s).unwrap(), 8.0 * s.powf(2.4) / 2.4, max_relative = 1e-9);
    }
}

#[test]
fn every_engine_is_registered() {
    let names = engine_names();
    assert!(names.contains(&"analytic") && names.contains(&"tail-fit"));
    assert_eq!(engine("nope").err().map(|e| e.code()), Some("unknown_strategy"));
}

#[test]
fn ball_examples() {
    let tag = |p, s| classify_ball(&ProblemSpec::power(3, 0.0, 0.0, p, s, Domain::Ball(1.0))).unwrap().tag;
    assert_eq!(tag(1.0, 1.0), RegimeTag::BothBounded);
    assert_eq!(tag(1.0, 2.0), RegimeTag::BothBlowUp);
    assert_eq!(tag(1.0, 5.0), RegimeTag::UBoundedVBlows);
}

#[test]
fn whole_space_examples() {
    let reg = classify_entire(&ProblemSpec::power(3, 0.0, 0.0, 0.5, 1.0, Domain::EntireSpace)).unwrap();
    assert_eq!(reg.tag, RegimeTag::GlobalExistence);
    assert_eq!(reg.asymptotics_eligible, Some(true));
    let none = classify_entire(&ProblemSpec::power(3, 0.0, 0.0, 1.0, 2.0, Domain::EntireSpace)).unwrap();
    assert_eq!(none.tag, RegimeTag::NoPositiveSolution);
}

#[test]
fn gradient_mode_agrees_with_closed_form_off_the_boundaries() {
    for (p, s) in [(1.0, 0.5), (1.0, 2.0), (1.0, 5.0), (0.5, 1.5), (2.0, 4.0)] {
        let spec = gradient(p, NonlinearityDesc::power(1.0, s));
        for name in engine_names() {
            assert_eq!(classify_ball_with(&spec, name).unwrap().tag, power_regime(p, s), "p={p} s={s} {name}");
        }
    }
}

#[test]
fn verdict_ignores_constant_and_scaling_of_h() {
    for (p, s) in [(1.0, 0.6), (1.0, 1.6), (0.5, 7.0), (2.0, 1.2)] {
        let base = gradient(p, NonlinearityDesc::power(1.0, s));
        for cond in [Condition::InverseA, Condition::InverseD, Condition::HPotential, Condition::HPotentialWeighted] {
            let reference = ko_condition_with("tail-fit", &base, cond, 1.0, None).unwrap().verdict;
            for c in C_SCAN {
                if cond.has_constant() {
                    assert_eq!(ko_condition_with("tail-fit", &base, cond, c, None).unwrap().verdict, reference);
                }
            }
            for k in [1e-2, 1e2] {
                let scaled = gradient(p, NonlinearityDesc::power(k, s));
                assert_eq!(ko_condition_with("tail-fit", &scaled, cond, 1.0, None).unwrap().verdict, reference, "{cond} k={k}");
            }
        }
    }
}

#[test]
fn tail_fit_recovers_exponent() {
    let spec = gradient(1.0, NonlinearityDesc::power(1.0, 3.0));
    for cond in Condition::ALL {
        let v = ko_condition_with("tail-fit", &spec, cond, 1.0, None).unwrap();
        assert_relative_eq!(v.tail_exponent_est, power_tail_exponent(1.0, 3.0), epsilon = 0.005);
    }
}

#[test]
fn inversion_rejects_non_monotone_functions() {
    let err = invert_monotone(|x| (x - 1.0) * (x - 1.0), 0.1, (0.0, 3.0), 1e-12).unwrap_err();
    assert_eq!(err.code(), "non_monotone");
}

#[test]
fn power_partition_is_exhaustive() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let p: f64 = rng.gen_range(0.05..10.0);
        let s: f64 = rng.gen_range(1.0..20.0);
        let bounded = p * s <= 1.0;
        let u_only = p * s > 1.0 && s > 2.0 * (1.0 + 1.0 / p);
        let both = p * s > 1.0 && s <= 2.0 * (1.0 + 1.0 / p);
        assert_eq!([bounded, u_only, both].iter().filter(|&&x| x).count(), 1);
        let expected = if bounded {
            RegimeTag::BothBounded
        } else if u_only {
            RegimeTag::UBoundedVBlows
        } else {
            RegimeTag::BothBlowUp
        };
        assert_eq!(power_regime(p, s), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h_and_potential_are_monotone(s in 0.0f64..6.0, k in 0.1f64..10.0, t in 0.0f64..20.0, dt in 0.001f64..5.0) {
        let h = NonlinearityDesc::power(k, s);
        prop_assert!(eval_h(&h, t + dt) >= eval_h(&h, t));
        prop_assert!(eval_h_potential(&h, t + dt).unwrap() >= eval_h_potential(&h, t).unwrap());
    }

    #[test]
    fn a_and_d_are_monotone(p in 0.1f64..5.0, rho in 0.01f64..3.0, s in 0.0f64..50.0, ds in 0.001f64..10.0) {
        let spec = ProblemSpec::power(3, 0.5, 0.0, p, 1.0, Domain::Ball(3.0));
        prop_assert!(eval_a(&spec, rho, s + ds).unwrap() >= eval_a(&spec, rho, s).unwrap());
        prop_assert!(eval_dfun(&spec, rho, s + ds).unwrap() >= eval_dfun(&spec, rho, s).unwrap());
    }

    #[test]
    fn inversion_round_trips(c1 in 0.01f64..5.0, c2 in 0.0f64..5.0, c3 in 0.0f64..5.0, x in 0.0f64..10.0) {
        let f = |t: f64| c1 * t + c2 * t * t + c3 * t * t * t;
        let y = f(x);
        let back = invert_monotone(f, y, (0.0, 1.0), 1e-13).unwrap();
        prop_assert!((f(back) - y).abs() <= 1e-12 * y.abs().max(1.0));
        prop_assert!((back - x).abs() <= 1e-9 * x.max(1.0));
    }
}
