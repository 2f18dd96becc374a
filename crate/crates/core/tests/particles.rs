use approx::assert_relative_eq;
use proptest::prelude::*;
use rwre_core::env::{g_profile, sample_environment, EnvDistribution, Law, SampleOptions, SeriesOptions};
use rwre_core::func::{PiecewiseLinear, ProfileFunction, TestFunction};
use rwre_core::math::{poisson, Moments};
use rwre_core::particles::*;
use rwre_core::rng::stream;
use rwre_core::trap::*;
use rwre_core::Error;

fn chain(depths: &[f64]) -> TrapEnvironment {
    let atoms = depths.iter().enumerate().map(|(k, &y)| Atom { x: k as f64, y }).collect();
    TrapEnvironment::new(atoms, -1.0, depths.len() as f64, 0.0).unwrap()
}

fn box_phi(t: f64, a: f64, b: f64) -> TestFunction {
    TestFunction::new(
        PiecewiseLinear::plateau(0.0, t, 1e-9, 1.0).unwrap(),
        PiecewiseLinear::plateau(a, b, 1e-9, 1.0).unwrap(),
    )
}

#[test]
fn zero_profile_gives_empty_configuration() {
    let w = chain(&[1.0, 2.0]);
    let c = init_configuration(&InitialCondition::Trap { w: &w, a_n: 10.0 }, &ProfileFunction::zero(), &mut stream(1, &[0]))
        .unwrap();
    assert_eq!(c.total(), 0);
    assert!(trap_integral_direct(&w, &c, &box_phi(1.0, -1.0, 3.0), 10.0, 1, ExitPolicy::Fail).unwrap().value == 0.0);
}

#[test]
fn locally_stationary_means_on_constant_environment() {
    let d = EnvDistribution::constant(0.75).unwrap();
    let env = sample_environment(&d, Law::P, -100, 400, 1, SampleOptions::default()).unwrap();
    let u = ProfileFunction::plateau(-50.0, 50.0, 1.0, 1.0).unwrap();
    let cond = InitialCondition::RwreLocal { env: &env, n: 1.0, opts: SeriesOptions::default() };
    let (offset, means) = initial_means(&cond, &u).unwrap();
    assert_eq!(offset, -100);
    for x in -49..=49 {
        assert_relative_eq!(means[(x + 100) as usize], 2.0, max_relative = 1e-10);
    }
}

#[test]
fn locally_stationary_needs_buffer() {
    let d = EnvDistribution::constant(0.75).unwrap();
    let env = sample_environment(&d, Law::P, -100, 20, 1, SampleOptions::default()).unwrap();
    let u = ProfileFunction::plateau(-10.0, 20.0, 1.0, 1.0).unwrap();
    let cond = InitialCondition::RwreLocal { env: &env, n: 1.0, opts: SeriesOptions::default() };
    assert!(matches!(initial_means(&cond, &u), Err(Error::BufferExhausted { .. })));
}

#[test]
fn trap_initial_total_is_poisson() {
    let p = PoissonTrapParams { lambda: 1.0, kappa: 0.7, lo: -1.0, hi: 1.0, y_floor: 0.01 };
    let w = sample_poisson_traps(&p, &mut stream(2, &[0])).unwrap();
    let u = ProfileFunction::parabola(0.0, 1.0, 0.25).unwrap();
    let a_n = 50.0;
    let cond = InitialCondition::Trap { w: &w, a_n };
    let expect: f64 = w.atoms().iter().map(|a| a_n * u.eval(a.x) * a.y).sum();
    let mut rng = stream(2, &[1]);
    let m: Moments = (0..1000).map(|_| init_configuration(&cond, &u, &mut rng).unwrap().total() as f64).collect();
    assert!((m.mean - expect).abs() < 3.0 * m.stderr());
}

#[test]
fn single_particle_holding_time() {
    let w = chain(&[0.8, 1.0]);
    let t = 0.5;
    let mut stay = Moments::new();
    for seed in 0..20_000 {
        let (c, _) = trap_configuration_at(&w, &ParticleConfiguration::new(0, vec![1, 0]), t, seed, ExitPolicy::Tally).unwrap();
        stay.push(c.counts()[0] as f64);
    }
    let p = (-t / 0.8f64).exp();
    assert!((stay.mean - p).abs() < 3.0 * stay.stderr());
}

#[test]
fn exits_fail_or_tally() {
    let w = chain(&[0.01, 0.01]);
    let c = ParticleConfiguration::new(0, vec![5, 5]);
    assert!(matches!(evolve_trap_system(&w, &c, 10.0, 1, ExitPolicy::Fail), Err(Error::WindowExit { .. })));
    let traj = evolve_trap_system(&w, &c, 10.0, 1, ExitPolicy::Tally).unwrap();
    assert_eq!(traj.exits, 10);
    assert_eq!(traj.configuration_at(10.0).total(), 0);
}

#[test]
fn frozen_configuration_factorizes() {
    let w = chain(&[1e9, 1e9, 1e9]);
    let c = ParticleConfiguration::new(0, vec![3, 0, 2]);
    let psi = PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
    let chi = PiecewiseLinear::new(vec![(-0.5, 0.0), (0.0, 2.0), (2.0, 1.0), (3.0, 0.0)]).unwrap();
    let phi = TestFunction::new(psi.clone(), chi.clone());
    let v = trap_integral_direct(&w, &c, &phi, 4.0, 7, ExitPolicy::Fail).unwrap();
    let expect = psi.integral(0.0, 1.0) * (3.0 * chi.eval(0.0) + 2.0 * chi.eval(2.0)) / 4.0;
    assert_relative_eq!(v.value, expect, max_relative = 1e-12);
}

#[test]
fn integral_matches_path_occupation() {
    let w = chain(&[0.3, 0.5, 0.2, 0.7]);
    let c = ParticleConfiguration::new(0, vec![2, 1, 0, 1]);
    let (t_end, a_n) = (1.5, 3.0);
    let phi = box_phi(t_end, 0.5, 2.5);
    for seed in 0..50 {
        let traj = evolve_trap_system(&w, &c, t_end + 1e-9, seed, ExitPolicy::Tally).unwrap();
        let via_traj = trap_space_time_integral(&w, &traj, &phi, a_n).value;
        let direct = trap_integral_direct(&w, &c, &phi, a_n, seed, ExitPolicy::Tally).unwrap().value;
        assert_relative_eq!(via_traj, direct, max_relative = 1e-12, epsilon = 1e-15);

        // occupation of atoms 1 and 2 (the box) reconstructed from the jumps
        let mut start: Vec<usize> = Vec::new();
        for (k, &n) in c.counts().iter().enumerate() {
            start.extend(std::iter::repeat_n(k, n as usize));
        }
        let mut occ = 0.0;
        for (p, &k0) in start.iter().enumerate() {
            let mut at = k0;
            let mut since = 0.0;
            for e in traj.events.iter().filter(|e| e.particle as usize == p) {
                if (1..=2).contains(&at) {
                    occ += phi.time.integral(since, e.time);
                }
                at += 1;
                since = e.time;
            }
            if (1..=2).contains(&at) {
                occ += phi.time.integral(since, traj.horizon);
            }
        }
        assert_relative_eq!(via_traj, occ / a_n, max_relative = 1e-9, epsilon = 1e-12);
    }
}

#[test]
fn stationary_marginals() {
    let depths: Vec<f64> = (0..12).map(|k| 0.2 + 0.1 * k as f64).collect();
    let w = chain(&depths);
    let alpha = 3.0;
    let mut stats = vec![Moments::new(); w.len()];
    for r in 0..1000u64 {
        let mut rng = stream(3, &[r]);
        let c = ParticleConfiguration::new(0, depths.iter().map(|&y| poisson(&mut rng, alpha * y)).collect());
        let (c, _) = trap_configuration_at(&w, &c, 1.0, 1000 + r, ExitPolicy::Tally).unwrap();
        for (m, &n) in stats.iter_mut().zip(c.counts()) {
            m.push(n as f64);
        }
    }
    // interior: far enough from the left edge that nothing is missing at t = 1
    for k in 8..w.len() {
        let want = alpha * depths[k];
        assert!((stats[k].mean - want).abs() < 4.0 * stats[k].stderr(), "k={k}");
        let disp = stats[k].variance() / stats[k].mean;
        assert!((0.8..1.2).contains(&disp), "k={k} {disp}");
    }
}

#[test]
fn rwre_conservation_and_speed() {
    let d = EnvDistribution::constant(0.75).unwrap();
    let env = sample_environment(&d, Law::P, -200, 300, 1, SampleOptions::default()).unwrap();
    let c = ParticleConfiguration::new(-200, {
        let mut v = vec![0u64; 501];
        v[200] = 400;
        v
    });
    let traj = evolve_rwre_system(&env, &c, &[0, 100, 400, 1000], 5).unwrap();
    for (s, &e) in traj.snapshots.iter().zip(&traj.exits) {
        assert_eq!(s.config.total() + e, 400);
    }
    assert!(traj.exits[3] > 0);
    let pos: Moments = traj.snapshots[2].config.nonzero().flat_map(|(x, n)| std::iter::repeat_n(x as f64, n as usize)).collect();
    assert!((pos.mean - 200.0).abs() < 3.0 * pos.stderr());
    assert!(evolve_rwre_system(&env, &c, &[5, 1], 5).is_err());
}

#[test]
fn single_walk_speed() {
    let d = EnvDistribution::constant(0.75).unwrap();
    let env = sample_environment(&d, Law::P, -1000, 10_001, 1, SampleOptions::default()).unwrap();
    let mut m = Moments::new();
    for r in 0..200u64 {
        let x = rwre_core::walk::position_after(&env, 0, 10_000, &mut stream(9, &[r])).unwrap();
        m.push(x as f64);
    }
    assert!((m.mean - 5000.0).abs() < 3.0 * m.stderr(), "{} ± {}", m.mean, m.stderr());
}

#[test]
fn step_weights_integrate_psi() {
    let psi = PiecewiseLinear::new(vec![(0.0, 0.0), (0.3, 1.0), (0.7, 0.2), (1.0, 0.0)]).unwrap();
    let w = step_weights(&psi, 0.013);
    assert_relative_eq!(w.iter().sum::<f64>(), psi.integral(0.0, 1.0), max_relative = 1e-12);
    assert!(step_weights(&PiecewiseLinear::zero(), 0.1).is_empty());
}

#[test]
fn quenched_mean_integral_matches_particles() {
    let s = rwre_core::env::two_point_rho_for_kappa(2.0, 0.5).unwrap();
    let d = EnvDistribution::from_rho(&[(2.0, 0.5), (s, 0.5)]).unwrap();
    let n = 30.0;
    let env = sample_environment(&d, Law::P, -400, 800, 4, SampleOptions::default()).unwrap();
    // g is heavy-tailed, so a low level keeps the particle count moderate
    let u = ProfileFunction::plateau(0.0, 1.0, 0.2, 0.01).unwrap();
    let phi = TestFunction::new(
        PiecewiseLinear::new(vec![(0.0, 0.0), (0.2, 1.0), (0.5, 0.0)]).unwrap(),
        PiecewiseLinear::new(vec![(0.0, 0.0), (0.5, 1.0), (1.5, 0.0)]).unwrap(),
    );
    let cond = InitialCondition::RwreLocal { env: &env, n, opts: SeriesOptions::default() };
    let (offset, means) = initial_means(&cond, &u).unwrap();
    let exact = rwre_mean_integral(&env, offset, &means, &phi, n, 0.5).unwrap();
    assert_relative_eq!(exact.initial_mass, means.iter().sum::<f64>(), max_relative = 1e-12);
    let mut m = Moments::new();
    for r in 0..400u64 {
        let c = init_configuration(&cond, &u, &mut stream(5, &[r])).unwrap();
        m.push(rwre_space_time_integral(&env, &c, &phi, n, 0.5, 77 + r).unwrap().value);
    }
    assert!((m.mean - exact.integral.value).abs() < 4.0 * m.stderr(), "{} ± {} vs {}", m.mean, m.stderr(), exact.integral.value);
    let g = g_profile(&env, SeriesOptions::default());
    assert!(g[400].unwrap() >= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shared_clocks_keep_order(seed in any::<u64>(), x1 in -1.0f64..1.0, dx in 0.0f64..1.0, t in 0.0f64..3.0) {
        let p = PoissonTrapParams { lambda: 1.0, kappa: 0.7, lo: -1.0, hi: 2.0, y_floor: 0.01 };
        let mut rng = stream(seed, &[0]);
        let w = sample_poisson_traps(&p, &mut rng).unwrap();
        prop_assume!(!w.is_empty());
        let ht = draw_holding_times(&w, &mut rng).unwrap();
        if let (Ok(a), Ok(b)) = (z_forward(&w, &ht, t, x1), z_forward(&w, &ht, t, x1 + dx)) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn integral_bound(seed in any::<u64>(), a_n in 1.0f64..100.0) {
        let w = chain(&[0.3, 0.2, 0.6, 0.4, 0.9]);
        let c = ParticleConfiguration::new(0, vec![3, 0, 4, 1, 2]);
        let phi = TestFunction::new(
            PiecewiseLinear::new(vec![(0.0, 0.0), (0.4, 2.0), (1.2, 0.0)]).unwrap(),
            PiecewiseLinear::new(vec![(-1.0, 0.0), (1.0, 1.5), (5.0, 0.0)]).unwrap(),
        );
        let v = trap_integral_direct(&w, &c, &phi, a_n, seed, ExitPolicy::Tally).unwrap();
        prop_assert!(v.value.abs() <= phi.sup_norm() * c.total() as f64 * phi.horizon() / a_n + 1e-12);
    }
}
