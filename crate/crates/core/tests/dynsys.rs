mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use radlab::asymptotics::predicted_constants;
use radlab::dynsys::*;
use radlab::model::{Domain, InitialData, ProblemSpec};
use radlab::radial::{integrate_radial, SolverConfig};

fn pinned() -> DynParams {
    DynParams::new(3.0, 0.0, 0.0, 0.5, 1.0).unwrap()
}

/// Parameters with `ps < 1`.
fn admissible() -> impl Strategy<Value = DynParams> {
    (2u32..7, 0.0f64..2.0, 0.0f64..2.0, 0.05f64..3.0, 1.0f64..6.0, 0.05f64..0.95).prop_map(|(n, a, b, p, s0, frac)| {
        // rescale s so that ps lands strictly inside (0, 1) when needed
        let s = if p * s0 < 1.0 { s0 } else { (frac / p).max(1.0) };
        let p = if p * s < 1.0 { p } else { frac / s };
        DynParams::new(n as f64, a, b, p, s).unwrap()
    })
}

fn whole_space_run(params: &DynParams, r_max: f64) -> (ProblemSpec, DynTrajectory) {
    let spec = ProblemSpec::power(params.n as u32, params.a, params.b, params.p, params.s, Domain::EntireSpace);
    let cfg = SolverConfig {
        r_max,
        ..SolverConfig::default()
    };
    let sol = integrate_radial(&spec, &InitialData::default(), &cfg).unwrap();
    let traj = to_dynamical(&sol, &spec).unwrap();
    (spec, traj)
}

#[test]
fn pinned_vector_field_examples() {
    let params = pinned();
    assert_eq!(vector_field(&[0.0, 3.0, 4.0], &params), [0.0; 3]);
    assert_eq!(vector_field(&[6.0, 6.0, 7.0], &params), [0.0; 3]);
    let b = 0.4;
    let other = DynParams::new(3.0, 0.0, b, 0.5, 1.0).unwrap();
    assert_relative_eq!(vector_field(&[1.0, 3.0, 3.0 + b], &other)[0], b + 1.0, max_relative = 1e-15);
}

#[test]
fn pinned_stability_margin() {
    let rep = is_asymptotically_stable(&pinned()).unwrap();
    assert_relative_eq!(rep.routh_margin, 2154.0, max_relative = 1e-14);
    assert!(rep.stable);
}

#[test]
fn pinned_divergence_condition() {
    let rep = check_hirsch_conditions(&pinned()).unwrap();
    assert_relative_eq!(rep.divergence_condition_lhs, -3.0, max_relative = 1e-14);
    assert_relative_eq!(rep.divergence_condition_rhs, 4.0, max_relative = 1e-14);
    assert!(rep.divergence_condition && rep.divergence_negative && rep.cooperative);
}

#[test]
fn margin_shrinks_as_ps_approaches_one() {
    let mut last = f64::INFINITY;
    for ps in [0.9, 0.99, 0.999] {
        let rep = is_asymptotically_stable(&DynParams::new(3.0, 0.0, 0.0, ps, 1.0).unwrap()).unwrap();
        // xi2 itself grows like 1/(1 - ps), so compare against the trace
        let top = rep.eigenvalues[0];
        assert!(top.0 < 0.0);
        let rel = top.0.abs() / rep.alpha;
        assert!(rel < last);
        last = rel;
    }
    assert!(last < 1e-3, "{last}");
}

#[test]
fn decoupled_limit_of_xi2() {
    // p -> 0: Y2 -> 2 + b + s(1 + a), Z2 -> N + a, W2 -> N + b + s(1 + a)
    let (n, a, b, s) = (3.0, 0.5, 0.25, 2.0);
    let e = xi2(&DynParams::new(n, a, b, 1e-9, s).unwrap()).unwrap();
    assert_relative_eq!(e[0], 2.0 + b + s * (1.0 + a), epsilon = 1e-7);
    assert_relative_eq!(e[1], n + a, epsilon = 1e-7);
    assert_relative_eq!(e[2], n + b + s * (1.0 + a), epsilon = 1e-7);
}

#[test]
fn radial_run_converges_to_xi2() {
    let params = pinned();
    let (_, traj) = whole_space_run(&params, 1e8);
    let rep = omega_limit(&traj, &params).unwrap();
    assert_eq!(rep.classification, OmegaClass::ConvergedXi2);
}

#[test]
fn to_dynamical_limits() {
    let params = DynParams::new(4.0, 1.0, 0.0, 0.5, 1.0).unwrap();
    let (_, traj) = whole_space_run(&params, 1e8);
    let first = &traj.states[0];
    assert!(first.y < 1e-6, "Y at the origin is {}", first.y);
    let last = traj.last().unwrap();
    assert_relative_eq!(last.x.unwrap() - last.z, 2.0 - params.n, epsilon = 1e-3);
}

#[test]
fn exact_power_pair_is_a_fixed_point() {
    let spec = ProblemSpec::power(3, 0.0, 0.0, 0.5, 1.0, Domain::EntireSpace);
    let c = predicted_constants(&pinned()).unwrap();
    let sol = common::power_pair(c.u_prefactor_consistent, c.u_exponent, c.v_prefactor, c.v_exponent, -2.0, 4.0, 50);
    let traj = to_dynamical(&sol, &spec).unwrap();
    let e2 = xi2(&pinned()).unwrap();
    for st in &traj.states {
        assert_relative_eq!(st.x.unwrap(), c.u_exponent, max_relative = 1e-12);
        assert_relative_eq!(st.y, c.v_exponent, max_relative = 1e-12);
        assert!(common::sup_dist(&st.point(), &e2) < 1e-10);
    }
}

#[test]
fn radial_runs_stay_in_the_box() {
    for params in [pinned(), DynParams::new(5.0, 0.5, 0.5, 0.2, 1.5).unwrap(), DynParams::new(2.0, 1.0, 2.0, 0.3, 2.0).unwrap()] {
        let (_, traj) = whole_space_run(&params, 1e4);
        let (lo, hi) = (xi1(&params), xi2(&params).unwrap());
        // the W lower bound is the W-component of xi1
        assert_relative_eq!(lo[2], params.n + params.s * (params.a + 1.0) + params.b);
        for st in &traj.states {
            let x = st.point();
            for i in 0..3 {
                assert!(x[i] >= lo[i] - 1e-6 && x[i] <= hi[i] + 1e-6, "{params:?} t={} {x:?}", st.t);
            }
        }
    }
}

#[test]
fn corner_test_passes_for_moderate_exponents() {
    let mut checked = 0;
    for n in 2..=6 {
        for a in [0.0, 0.5, 2.0] {
            for b in [0.0, 1.0, 3.0] {
                for p in [0.1, 0.3, 0.5, 0.9] {
                    for s in [1.0, 1.05, 1.9] {
                        if p * s >= 1.0 || p > 2.0 || s > 2.0 {
                            continue;
                        }
                        let params = DynParams::new(n as f64, a, b, p, s).unwrap();
                        let rep = check_hirsch_conditions(&params).unwrap();
                        assert!(rep.divergence_negative && rep.divergence_condition, "{params:?}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn char_poly_matches_determinant(y in 0.01f64..50.0, z in 0.01f64..50.0, w in 0.01f64..50.0, p in 0.01f64..3.0, s in 1.0f64..4.0) {
        let m = [[-y, 0.0, y], [p * z, -z, 0.0], [0.0, s * w, -w]];
        let cp = char_poly(&m, p * s);
        let (alpha, beta, c) = common::char_poly_by_interpolation(&m);
        let scale = (y + z + w).powi(3);
        prop_assert!((cp.alpha - alpha).abs() <= 1e-10 * scale);
        prop_assert!((cp.beta - beta).abs() <= 1e-10 * scale);
        prop_assert!((cp.constant - c).abs() <= 1e-10 * scale);
    }

    #[test]
    fn equilibria_are_stable_and_consistent(params in admissible()) {
        let (e1, e2) = equilibria(&params).unwrap();
        for e in [e1.point, e2.point] {
            let f = vector_field(&e, &params);
            let scale = e.iter().fold(1.0f64, |m, x| m.max(x.abs())).powi(2);
            prop_assert!(f.iter().all(|c| c.abs() <= 1e-12 * scale), "{f:?}");
        }
        let x = e2.point;
        prop_assert!((x[0] - (x[2] - (params.n - 2.0))).abs() <= 1e-12 * x[2]);
        let m = jacobian(&params, &x);
        let fd = common::fd_jacobian(&params, &x, 1e-5);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((m[i][j] - fd[i][j]).abs() <= 1e-6 * (1.0 + m[i][j].abs()));
            }
        }
        let rep = is_asymptotically_stable(&params).unwrap();
        let gamma = x[0] * x[1] * x[2];
        prop_assert!(rep.alpha * rep.beta >= 9.0 * gamma * (1.0 - 1e-12));
        prop_assert!(rep.routh_margin > 0.0);
        prop_assert!(rep.stable);
    }

    #[test]
    fn field_is_cooperative(params in admissible(), y in 0.0f64..100.0, z in 0.0f64..100.0, w in 0.0f64..100.0) {
        let m = jacobian(&params, &[y, z, w]);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(i == j || m[i][j] >= 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_preserves_order(params in admissible(), f in prop::array::uniform3(0.0f64..1.0), d in prop::array::uniform3(0.0f64..0.5)) {
        let (lo, hi) = (xi1(&params), xi2(&params).unwrap());
        let a: Point = std::array::from_fn(|i| lo[i] + f[i] * (hi[i] - lo[i]));
        let b: Point = std::array::from_fn(|i| a[i] + d[i] * (hi[i] - lo[i]));
        let cfg = FlowConfig { sample_dt: Some(0.25), ..FlowConfig::default() };
        let ta = flow_with(&params, &a, (0.0, 20.0), &cfg).unwrap();
        let tb = flow_with(&params, &b, (0.0, 20.0), &cfg).unwrap();
        prop_assert_eq!(ta.states.len(), tb.states.len());
        for (x, y) in ta.states.iter().zip(&tb.states) {
            prop_assert_eq!(x.t, y.t);
            let (px, py) = (x.point(), y.point());
            for i in 0..3 {
                prop_assert!(px[i] <= py[i] + 1e-9 * py[i].abs().max(1.0), "t={} {:?} {:?}", x.t, px, py);
            }
        }
    }
}
