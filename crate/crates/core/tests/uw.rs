use std::time::Instant;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rwre_core::func::ProfileFunction;
use rwre_core::rng::stream;
use rwre_core::trap::*;
use rwre_core::uw::*;
use rwre_core::Error;

const E_INV: f64 = 0.367_879_441_171_442_33;

fn two_atoms() -> (TrapEnvironment, ProfileFunction) {
    let w = TrapEnvironment::new(vec![Atom { x: 0.0, y: 1.0 }, Atom { x: 1.0, y: 1.0 }], -1.0, 2.0, 0.0).unwrap();
    (w, ProfileFunction::hat(-0.5, 0.0, 0.5, 1.0).unwrap())
}

fn poisson_env(kappa: f64, eps: f64, seed: u64) -> TrapEnvironment {
    let p = PoissonTrapParams { lambda: 1.0, kappa, lo: -1.0, hi: 1.0, y_floor: eps };
    sample_poisson_traps(&p, &mut stream(seed, &[0])).unwrap()
}

fn fifty_atoms(seed: u64) -> TrapEnvironment {
    let p = PoissonTrapParams { lambda: 1.0, kappa: 0.7, lo: -1.0, hi: 1.0, y_floor: 0.01 };
    sample_poisson_traps_with_count(&p, 50, &mut stream(seed, &[0])).unwrap()
}

fn parabola() -> ProfileFunction {
    ProfileFunction::parabola(0.0, 1.0, 0.25).unwrap()
}

#[test]
fn two_atom_closed_form() {
    let (w, u) = two_atoms();
    let times = [0.0, 0.5, 1.0, 2.0];
    let sol = solve_uw_ode(&w, &u, &times, SolveOptions::default()).unwrap();
    for (j, &t) in times.iter().enumerate() {
        assert!((sol.value(0, j) - (-t).exp()).abs() < 1e-12);
        assert!((sol.value(1, j) - t * (-t).exp()).abs() < 1e-12);
    }
    assert!((sol.value(1, 2) - E_INV).abs() < 1e-8);
    // ∂_t v_2 = (1 − t) e^{−t} vanishes at t = 1
    assert!(duw_dt(&sol, 1, 2).abs() < 1e-12);
    assert_relative_eq!(duw_dt(&sol, 1, 1), 0.5 * (-0.5f64).exp(), max_relative = 1e-10);
}

#[test]
fn two_atom_solve_is_fast() {
    let (w, u) = two_atoms();
    let best = (0..20)
        .map(|_| {
            let t0 = Instant::now();
            let sol = solve_uw_ode(&w, &u, &[1.0], SolveOptions::default()).unwrap();
            std::hint::black_box(sol);
            t0.elapsed()
        })
        .min()
        .unwrap();
    assert!(best.as_secs_f64() < 1e-3, "{best:?}");
}

#[test]
fn three_atom_matrix_exponential() {
    let w = TrapEnvironment::new(
        vec![Atom { x: 0.0, y: 0.5 }, Atom { x: 1.0, y: 1.0 }, Atom { x: 2.0, y: 2.0 }],
        -1.0,
        3.0,
        0.0,
    )
    .unwrap();
    let u = ProfileFunction::piecewise_linear(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.5), (2.0, 0.25), (3.0, 0.0)]).unwrap();
    let expected = [
        [6.065306597126334e-01, 5.616705148944738e-01, 2.841796572919473e-01],
        [1.353352832366131e-01, 4.164838785205504e-01, 3.525443672479383e-01],
        [2.478752176666358e-03, 7.220185037512956e-02, 2.422467083840348e-01],
    ];
    let times = [0.25, 1.0, 3.0];
    let sol = solve_uw_ode(&w, &u, &times, SolveOptions::default()).unwrap();
    let conv = solve_uw_convolution(&w, &u, 3.0, 1200).unwrap();
    for (j, row) in expected.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            assert!((sol.value(k, j) - v).abs() < 1e-12, "ode k={k} j={j}");
        }
    }
    // convolution grid has t_i = 3 i / 1200
    for (j, &t) in times.iter().enumerate() {
        let i = (t / 3.0 * 1200.0).round() as usize;
        for (k, &v) in expected[j].iter().enumerate() {
            assert!((conv.value(k, i) - v).abs() < 1e-7, "conv k={k} t={t}");
        }
    }
}

#[test]
fn zero_profile() {
    let w = fifty_atoms(1);
    let sol = solve_uw_ode(&w, &ProfileFunction::zero(), &[0.0, 1.0], SolveOptions::default()).unwrap();
    assert!(sol.values.iter().all(|&v| v == 0.0));
}

#[test]
fn initial_time_reproduces_u() {
    let w = fifty_atoms(2);
    let u = parabola();
    let sol = solve_uw_ode(&w, &u, &[0.0], SolveOptions::default()).unwrap();
    for (k, a) in w.atoms().iter().enumerate() {
        assert_eq!(sol.value(k, 0), u.eval(a.x));
    }
}

#[test]
fn support_must_start_in_window() {
    let w = fifty_atoms(3);
    let u = ProfileFunction::hat(-2.0, 0.0, 0.5, 1.0).unwrap();
    assert!(matches!(solve_uw_ode(&w, &u, &[1.0], SolveOptions::default()), Err(Error::SupportNotCovered)));
}

#[test]
fn stiffness_guard() {
    let w = TrapEnvironment::new(vec![Atom { x: 0.0, y: 1e-12 }, Atom { x: 1.0, y: 10.0 }], -1.0, 2.0, 0.0).unwrap();
    let u = ProfileFunction::hat(-0.5, 0.0, 0.5, 1.0).unwrap();
    assert!(matches!(solve_uw_ode(&w, &u, &[1.0], SolveOptions::default()), Err(Error::StiffnessWarning { .. })));
    let sol = solve_uw_ode(&w, &u, &[1.0], SolveOptions { allow_stiff: true }).unwrap();
    assert!(sol.value(0, 0) < 1e-300 && sol.value(1, 0).abs() < 1e-11);
}

#[test]
fn stiff_system_against_exact_exponential() {
    let depths = [1e-9, 0.5, 1e-8, 2.0];
    let w = TrapEnvironment::new(
        depths.iter().enumerate().map(|(k, &y)| Atom { x: k as f64, y }).collect(),
        -1.0,
        4.0,
        0.0,
    )
    .unwrap();
    let u = ProfileFunction::piecewise_linear(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.5), (2.0, 0.25), (3.0, 0.75), (4.0, 0.0)])
        .unwrap();
    let expected = [
        [0.0, 0.183_939_721_321_480_04, 0.183_939_725_000_274_54, 0.652_587_478_290_398_4],
        [0.0, 0.067_667_641_888_976_9, 0.067_667_643_242_329_78, 0.533_430_558_657_096_7],
    ];
    let sol = solve_uw_ode(&w, &u, &[0.5, 1.0], SolveOptions { allow_stiff: true }).unwrap();
    assert_eq!(sol.method, UwMethod::Convolution);
    for (j, row) in expected.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            assert!((sol.value(k, j) - v).abs() < 1e-9, "k={k} j={j}: {}", sol.value(k, j));
        }
    }
    assert!(sol.error_bound < 1e-8);
}

#[test]
fn figure_one_frames() {
    let w = poisson_env(0.7, 0.001, 1);
    let u = parabola();
    assert_relative_eq!(u.total_variation(), 0.5, max_relative = 1e-14);
    let times = [0.0, 0.25, 0.5, 0.75, 1.0];
    let sol = solve_uw_ode(&w, &u, &times, SolveOptions { allow_stiff: true }).unwrap();
    for j in 0..times.len() {
        assert!(sol.total_variation(j) <= 0.5 + 1e-12, "frame {j}");
        // constant between atoms, so every jump sits on an atom
        let mid = 0.5 * (w.atoms()[10].x + w.atoms()[11].x);
        assert_eq!(sol.eval(mid, j), sol.value(10, j));
    }
    // mass moves right while decaying
    let mass = |j: usize| -> f64 { (0..w.len()).map(|k| sol.value(k, j) * w.atoms()[k].y).sum() };
    let centre = |j: usize| -> f64 { (0..w.len()).map(|k| sol.value(k, j) * w.atoms()[k].y * w.atoms()[k].x).sum::<f64>() / mass(j) };
    assert!(centre(4) > centre(0));
    let sup = |j: usize| sol.column(j).into_iter().fold(0.0, f64::max);
    assert!(sup(4) < sup(0));
}

#[test]
fn total_variation_of_samples() {
    assert_eq!(total_variation(&[2.0, 2.0, 2.0]), 0.0);
    assert_eq!(total_variation(&[0.0, 0.25, 0.0]), 0.5);
}

#[test]
fn derivative_matches_finite_difference() {
    let w = fifty_atoms(4);
    let u = parabola();
    let (t, h) = (0.5, 1e-4);
    let sol = solve_uw_ode(&w, &u, &[t - h, t, t + h], SolveOptions::default()).unwrap();
    for k in 0..w.len() {
        let fd = (sol.value(k, 2) - sol.value(k, 0)) / (2.0 * h);
        assert!((fd - duw_dt(&sol, k, 1)).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn convolution_agrees_with_uniformization() {
    let w = fifty_atoms(5);
    let u = parabola();
    let conv = solve_uw_convolution(&w, &u, 1.0, 2000).unwrap();
    let sol = solve_uw_ode(&w, &u, &conv.times, SolveOptions::default()).unwrap();
    let gap = conv.values.iter().zip(&sol.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(gap < 1e-6, "{gap}");
}

#[test]
fn pairing_identity() {
    let (w, u) = two_atoms();
    let g = ProfileFunction::hat(0.5, 1.0, 1.5, 1.0).unwrap();
    let p = dual_pairing_check(&w, &u, &g, 0.0).unwrap();
    assert_eq!(p.lhs, p.rhs);
    let p = dual_pairing_check(&w, &u, &g, 1.0).unwrap();
    assert!((p.lhs - E_INV).abs() < 1e-10);
    assert!(p.gap < 1e-7);

    let w = fifty_atoms(6);
    let g = ProfileFunction::hat(-0.4, 0.3, 0.9, 1.0).unwrap();
    let p = dual_pairing_check(&w, &parabola(), &g, 0.5).unwrap();
    assert!(p.gap < 1e-6, "{p:?}");
}

#[test]
fn circ_profile_drops_the_atom() {
    let w = fifty_atoms(7);
    let u = parabola();
    let k = 30;
    let times = [0.0, 0.3];
    let circ = solve_uw_circ(&w, &u, k, &times).unwrap();
    let star = solve_uw_ode(&w, &u, &times, SolveOptions::default()).unwrap();
    assert_eq!(circ[0], star.value(k - 1, 0));
    assert!(circ[1] != star.value(k, 1));
}

#[test]
fn monte_carlo_deterministic_start() {
    let w = fifty_atoms(8);
    let u = parabola();
    let x = w.atoms()[25].x + 1e-3;
    let e = estimate_uw_mc(&w, &u, 0.0, x, 100, 1).unwrap();
    assert_eq!(e.mean, u.eval(w.atoms()[25].x));
    assert_eq!(e.stderr, 0.0);
}

#[test]
fn monte_carlo_two_atoms() {
    let (w, u) = two_atoms();
    let e = estimate_uw_mc(&w, &u, 1.0, 1.0, 100_000, 9).unwrap();
    assert!((e.mean - E_INV).abs() < 3.0 * e.stderr, "{e:?}");
}

#[test]
fn monte_carlo_grid_agrees_with_ode() {
    let w = fifty_atoms(10);
    let u = parabola();
    let times = [0.25, 0.5, 1.0];
    let mc = estimate_uw_mc_grid(&w, &u, &times, 20_000, 3).unwrap();
    let sol = solve_uw_ode(&w, &u, &times, SolveOptions::default()).unwrap();
    let mut worst = 0.0f64;
    for k in 0..w.len() {
        for j in 0..times.len() {
            let se = mc.stderr_at(k, j).unwrap();
            let d = (mc.value(k, j) - sol.value(k, j)).abs();
            if se > 0.0 {
                worst = worst.max(d / se);
            } else {
                // every replica agreed: the ODE value can differ by at most
                // a move probability below ~3 / reps
                assert!(d < 3.0 / 20_000.0 * 0.25, "k={k} j={j} d={d}");
            }
        }
    }
    // 150 cells, so allow the max to exceed 3 but not 4.5
    assert!(worst < 4.5, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bv_bound_and_range(seed in any::<u64>(), t in 0.0f64..3.0) {
        let w = poisson_env(0.5, 0.01, seed);
        let u = parabola();
        let sol = solve_uw_ode(&w, &u, &[t], SolveOptions::default()).unwrap();
        prop_assert!(sol.total_variation(0) <= 0.5 + 1e-10);
        prop_assert!(sol.values.iter().all(|&v| (-1e-15..=0.25 + 1e-12).contains(&v)));
    }

    #[test]
    fn truncation_changes_little(seed in any::<u64>()) {
        // dropping shallow atoms perturbs u_W by at most what a walker loses
        // passing through them
        let w = poisson_env(0.5, 1e-4, seed);
        let u = ProfileFunction::plateau(-0.5, 0.5, 0.2, 1.0).unwrap();
        let t = truncate_env(&w, 1e-2);
        prop_assume!(!t.is_empty());
        let a = solve_uw_ode(&w, &u, &[0.5], SolveOptions { allow_stiff: true }).unwrap();
        let b = solve_uw_ode(&t, &u, &[0.5], SolveOptions::default()).unwrap();
        let removed = w.sigma_total() - t.sigma_total();
        for (k, at) in t.atoms().iter().enumerate() {
            let i = w.atoms().iter().position(|x| x.x == at.x).unwrap();
            // u is 5-Lipschitz; shallow atoms shift the backward clock by at most their mass
            prop_assert!((a.value(i, 0) - b.value(k, 0)).abs() <= 5.0 * removed + 1.0 * removed.sqrt() + 1e-9);
        }
    }

    #[test]
    fn monotone_in_initial_data(seed in any::<u64>(), c in 0.1f64..1.0) {
        let w = poisson_env(0.7, 0.01, seed);
        let u = parabola();
        let v = ProfileFunction::parabola(0.0, 1.0, 0.25 * c).unwrap();
        let a = solve_uw_ode(&w, &u, &[0.7], SolveOptions::default()).unwrap();
        let b = solve_uw_ode(&w, &v, &[0.7], SolveOptions::default()).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!(y <= &(x + 1e-15));
        }
    }
}
