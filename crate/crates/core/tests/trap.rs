use approx::assert_relative_eq;
use proptest::prelude::*;
use rwre_core::math::Moments;
use rwre_core::rng::stream;
use rwre_core::trap::*;
use rwre_core::Error;

fn atoms(list: &[(f64, f64)]) -> Vec<Atom> {
    list.iter().map(|&(x, y)| Atom { x, y }).collect()
}

fn params(kappa: f64, eps: f64) -> PoissonTrapParams {
    PoissonTrapParams { lambda: 1.0, kappa, lo: -1.0, hi: 1.0, y_floor: eps }
}

#[test]
fn expected_atom_count() {
    assert_relative_eq!(params(0.5, 0.01).mean_count(), 40.0, max_relative = 1e-12);
    let mut rng = stream(5, &[1]);
    let m: Moments = (0..2000)
        .map(|_| sample_poisson_traps(&params(0.5, 0.01), &mut rng).unwrap().len() as f64)
        .collect();
    assert!((m.mean - 40.0).abs() < 3.0 * m.stderr());
}

#[test]
fn figure_one_environment_is_valid() {
    let w = sample_poisson_traps(&params(0.7, 0.001), &mut stream(1, &[0])).unwrap();
    let r = validate_env(w.atoms(), -1.0, 1.0, 0.001);
    assert!(r.is_valid());
    assert!(w.atoms().iter().all(|a| a.y >= 0.001 && a.x >= -1.0 && a.x <= 1.0));
}

#[test]
fn large_floor_gives_empty_environment() {
    let p = PoissonTrapParams { lambda: 1e-6, kappa: 0.5, lo: 0.0, hi: 1.0, y_floor: 1e6 };
    let w = sample_poisson_traps(&p, &mut stream(1, &[0])).unwrap();
    assert!(w.is_empty());
    assert!(draw_holding_times(&w, &mut stream(1, &[1])).is_err());
}

#[test]
fn mean_sigma_of_unit_interval() {
    // E σ([0,1]) = λ ε^{1−κ}/(1−κ) = 0.2
    let p = params(0.5, 0.01);
    let mut rng = stream(8, &[2]);
    let m: Moments = (0..10_000)
        .map(|_| sigma_mass(&sample_poisson_traps(&p, &mut rng).unwrap(), 0.0, 1.0))
        .collect();
    assert!((m.mean - 0.2).abs() < 3.0 * m.stderr(), "{} ± {}", m.mean, m.stderr());
}

#[test]
fn sigma_mass_cases() {
    let w = TrapEnvironment::new(atoms(&[(0.1, 1.0), (0.5, 2.0), (0.9, 4.0)]), 0.0, 1.0, 0.0).unwrap();
    assert_eq!(sigma_mass(&w, 0.3, 0.3), 0.0);
    assert_eq!(sigma_mass(&w, 0.0, 1.0), 7.0);
    // half-open (a, b]
    assert_eq!(sigma_mass(&w, 0.1, 0.5), 2.0);
    assert_eq!(sigma_mass(&w, 0.09, 0.5), 3.0);
}

#[test]
fn loader_rejects_bad_atoms() {
    assert!(TrapEnvironment::new(atoms(&[(0.5, 1.0), (0.2, 1.0)]), 0.0, 1.0, 0.0).is_err());
    assert!(TrapEnvironment::new(atoms(&[(0.5, 1.0), (0.5, 1.0)]), 0.0, 1.0, 0.0).is_err());
    assert!(TrapEnvironment::new(atoms(&[(0.5, 0.0)]), 0.0, 1.0, 0.0).is_err());
    assert!(TrapEnvironment::new(atoms(&[(1.5, 1.0)]), 0.0, 1.0, 0.0).is_err());
    let r = validate_env(&atoms(&[(0.5, 1.0), (0.5, 1.0)]), 0.0, 1.0, 0.1);
    assert_eq!(r.duplicate_positions, 1);
    assert!(!r.is_valid());
    let r = validate_env(&atoms(&[(0.1, 1e-3), (0.2, 1e-3), (0.3, 5.0)]), 0.0, 1.0, 0.1);
    assert!(r.is_valid());
    assert_relative_eq!(r.small_trap_mass_per_length, 2e-3);
}

#[test]
fn truncation() {
    let w = sample_poisson_traps(&params(0.5, 0.001), &mut stream(3, &[0])).unwrap();
    assert_eq!(truncate_env(&w, 0.0).atoms(), w.atoms());
    let top = w.depths().fold(0.0, f64::max);
    assert!(truncate_env(&w, top * 2.0).is_empty());
    let t = truncate_env(&w, 0.05);
    let removed: f64 = w.atoms().iter().filter(|a| a.y < 0.05).map(|a| a.y).sum();
    assert_relative_eq!(w.sigma_total() - t.sigma_total(), removed, max_relative = 1e-10);
}

#[test]
fn forward_two_atom_hand_case() {
    let w = TrapEnvironment::from_atoms(atoms(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)])).unwrap();
    let ht = HoldingTimes::from_zeta(&w, vec![3.0, 1.0, 1.0]).unwrap();
    assert_eq!(ht.tau(0), 3.0);
    assert_eq!(z_forward(&w, &ht, 0.0, -0.5).unwrap(), 0);
    assert_eq!(z_forward(&w, &ht, 0.0, 0.5).unwrap(), 1);
    assert_eq!(z_forward(&w, &ht, 2.0, 0.0).unwrap(), 0);
    assert_eq!(z_forward(&w, &ht, 3.5, 0.0).unwrap(), 1);
    assert!(matches!(z_forward(&w, &ht, 10.0, 0.0), Err(Error::WindowExit { .. })));
}

#[test]
fn backward_hand_case() {
    let w = TrapEnvironment::from_atoms(atoms(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)])).unwrap();
    let ht = HoldingTimes::from_zeta(&w, vec![1.0, 2.0, 0.5]).unwrap();
    assert_eq!(z_backward(&w, &ht, 0.0, 1.5, BackwardMode::Star).unwrap(), 1);
    assert_eq!(z_backward(&w, &ht, 0.0, 2.0, BackwardMode::Star).unwrap(), 2);
    assert_eq!(z_backward(&w, &ht, 1.0, 2.0, BackwardMode::Star).unwrap(), 1);
    // circ starts after the holding time at x itself
    assert_eq!(z_backward(&w, &ht, 0.0, 2.0, BackwardMode::Circ).unwrap(), 1);
    assert_eq!(z_backward(&w, &ht, 2.1, 2.0, BackwardMode::Circ).unwrap(), 0);
    assert!(z_backward(&w, &ht, 0.0, -1.0, BackwardMode::Star).is_err());
}

#[test]
fn holding_time_moments() {
    let w = sample_poisson_traps(&params(0.5, 0.01), &mut stream(4, &[0])).unwrap();
    let sigma = w.sigma_total();
    let var: f64 = w.depths().map(|y| y * y).sum();
    assert!(var <= sigma * sigma);
    let mut rng = stream(4, &[1]);
    let m: Moments = (0..10_000)
        .map(|_| draw_holding_times(&w, &mut rng).unwrap().tau_range(0, w.len()))
        .collect();
    assert!((m.mean - sigma).abs() < 3.0 * m.stderr());
    assert_relative_eq!(m.variance(), var, max_relative = 0.1);
}

#[test]
fn holding_times_are_reproducible() {
    let w = sample_poisson_traps(&params(0.5, 0.01), &mut stream(4, &[0])).unwrap();
    let a = draw_holding_times(&w, &mut stream(11, &[1])).unwrap();
    let b = draw_holding_times(&w, &mut stream(11, &[1])).unwrap();
    assert_eq!(a, b);
}

fn env_and_times(seed: u64) -> (TrapEnvironment, HoldingTimes) {
    let p = PoissonTrapParams { lambda: 1.0, kappa: 0.7, lo: -1.0, hi: 1.0, y_floor: 0.01 };
    let mut rng = stream(seed, &[0]);
    let w = sample_poisson_traps_with_count(&p, 40, &mut rng).unwrap();
    let ht = draw_holding_times(&w, &mut rng).unwrap();
    (w, ht)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strong_markov(seed in any::<u64>(), iz in 0usize..40, ix in 0usize..40, t in 0.0f64..2.0) {
        let (w, ht) = env_and_times(seed);
        let (i, j) = (iz.min(ix), iz.max(ix));
        let z = w.atoms()[i].x;
        let x = w.atoms()[j].x;
        let shift = ht.tau_range(i, j);
        let a = z_forward(&w, &ht, t, x);
        let b = z_forward(&w, &ht, t + shift, z);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn backward_monotone(seed in any::<u64>(), x in -1.0f64..1.0, dx in 0.0f64..0.5) {
        let (w, ht) = env_and_times(seed);
        let mut prev = usize::MAX;
        for s in 0..40 {
            let t = s as f64 * 0.05;
            match z_backward(&w, &ht, t, x, BackwardMode::Star) {
                Ok(k) => {
                    prop_assert!(k <= prev);
                    prev = k;
                    if let Ok(k2) = z_backward(&w, &ht, t, x + dx, BackwardMode::Star) {
                        prop_assert!(k2 >= k);
                    }
                }
                Err(_) => prev = 0,
            }
        }
    }

    #[test]
    fn circ_equals_star_off_atoms(seed in any::<u64>(), x in -1.0f64..1.0, t in 0.0f64..1.0) {
        let (w, ht) = env_and_times(seed);
        prop_assume!(w.atoms().iter().all(|a| a.x != x));
        let a = z_backward(&w, &ht, t, x, BackwardMode::Star).ok();
        let b = z_backward(&w, &ht, t, x, BackwardMode::Circ).ok();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn forward_monotone(seed in any::<u64>(), x in -1.0f64..1.0) {
        let (w, ht) = env_and_times(seed);
        let mut prev = 0;
        for s in 0..40 {
            if let Ok(k) = z_forward(&w, &ht, s as f64 * 0.05, x) {
                prop_assert!(k >= prev);
                prop_assert!(w.atoms()[k].x >= x);
                prev = k;
            }
        }
    }
}
