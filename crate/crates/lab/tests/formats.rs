use proptest::prelude::*;
use rwre_core::env::{sample_environment, EnvDistribution, Environment, LadderStats, Law, SampleOptions, SeriesOptions};
use rwre_core::particles::ParticleConfiguration;
use rwre_core::trap::{Atom, TrapEnvironment};
use rwre_core::uw::{solve_uw_ode, SolveOptions};
use rwre_core::func::ProfileFunction;
use rwre_lab::formats::*;
use rwre_lab::LabError;

fn dist() -> EnvDistribution {
    EnvDistribution::from_rho(&[(2.0, 0.5), (0.25, 0.5)]).unwrap()
}

#[test]
fn float_format_round_trips() {
    for v in [0.0, 1.0, -2.5, 1e-7, 3.0e20, 0.1 + 0.2, f64::MIN_POSITIVE, 12345.678] {
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
    assert_eq!(fmt_f64(1e-7), "1e-7");
    assert_eq!(fmt_f64(0.25), "0.25");
}

#[test]
fn sampled_environment_round_trips() {
    let d = dist();
    let env = sample_environment(&d, Law::Q, -50, 200, 9, SampleOptions::default()).unwrap();
    let rec = EnvRecord::new(env, &d);
    assert_eq!(rec.env.seed(), Some(9));
    let csv = env_csv(&rec).unwrap();
    assert!(String::from_utf8_lossy(&csv).starts_with("law,Q\nseed,9\nx_min,-50\nx_max,200\n"));
    assert_eq!(parse_env_csv(&csv).unwrap(), rec);
    assert_eq!(parse_env_binary(&env_binary(&rec)).unwrap(), rec);
}

#[test]
fn environment_files_are_detected_by_content() {
    let d = dist();
    let rec = EnvRecord::new(Environment::from_omega(-1, vec![0.6, 0.7, 0.2], Law::P).unwrap(), &d);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("e.csv"), dir.path().join("e.bin"));
    write_file(&a, &env_csv(&rec).unwrap()).unwrap();
    write_file(&b, &env_binary(&rec)).unwrap();
    assert_eq!(load_env(&a).unwrap(), rec);
    assert_eq!(load_env(&b).unwrap(), rec);
}

#[test]
fn corrupt_environments_are_rejected() {
    let rec = EnvRecord::new(Environment::from_omega(0, vec![0.6, 0.7], Law::P).unwrap(), &dist());
    let bin = env_binary(&rec);
    assert!(parse_env_binary(&bin[..bin.len() - 3]).is_err());
    let text = String::from_utf8(env_csv(&rec).unwrap()).unwrap();
    assert!(parse_env_csv(text.replace("x_max,1", "x_max,2").as_bytes()).is_err());
    assert!(parse_env_csv(text.replace("1,0.7", "2,0.7").as_bytes()).is_err());
    assert!(parse_env_csv(text.replace("law,P", "law,R").as_bytes()).is_err());
}

#[test]
fn ladder_table_has_the_documented_columns() {
    let d = dist();
    let env = sample_environment(&d, Law::Q, -100, 400, 3, SampleOptions::default()).unwrap();
    let ladders = LadderStats::compute(&env, SeriesOptions::default());
    let text = String::from_utf8(ladder_csv(&ladders).unwrap()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,nu_k,beta_k,M_k"));
    let first = lines.find(|l| l.starts_with("0,")).unwrap();
    assert!(first.starts_with("0,0,"));
    assert_eq!(text.lines().count(), ladders.entries().len() + 1);
}

#[test]
fn trap_loader_checks_ordering() {
    let ok = parse_traps(b"x,y\n0.1,0.5\n0.4,2\n", None).unwrap();
    assert_eq!(ok.atoms(), &[Atom { x: 0.1, y: 0.5 }, Atom { x: 0.4, y: 2.0 }]);
    let err = parse_traps(b"x,y\n0.4,0.5\n0.1,2\n", None).unwrap_err();
    assert!(matches!(err, LabError::Format(ref m) if m.contains("row 3")), "{err}");
    assert!(parse_traps(b"x,y\n0.4,0.5\n0.4,2\n", None).is_err());
    assert!(parse_traps(b"y,x\n0.4,0.5\n", None).is_err());
    assert!(parse_traps(b"x,y\n0.4,-1\n", None).is_err());
    assert!(parse_traps(b"x,y\n0.4,1\n", Some((0.5, 1.0))).is_err());
    assert_eq!(parse_traps(b"x,y\n0.4,1\n", Some((0.0, 1.0))).unwrap().window(), (0.0, 1.0));
}

#[test]
fn empty_outputs_are_header_only() {
    let w = TrapEnvironment::new(vec![], 0.0, 1.0, 0.0).unwrap();
    assert_eq!(traps_csv(&w).unwrap(), b"x,y\n");
    assert_eq!(snapshot_csv(&ParticleConfiguration::zeros(0, 4)).unwrap(), b"site,count\n");
    assert_eq!(integrals_csv(&[]).unwrap(), b"n,seed,phi_id,value,exit_fraction\n");
}

#[test]
fn uw_grid_and_frames() {
    let w = TrapEnvironment::new(vec![Atom { x: 0.0, y: 1.0 }, Atom { x: 1.0, y: 1.0 }], -1.0, 2.0, 0.0).unwrap();
    let u = ProfileFunction::hat(-0.5, 0.0, 0.5, 1.0).unwrap();
    let sol = solve_uw_ode(&w, &u, &[0.0, 0.5, 1.0], SolveOptions::default()).unwrap();
    let bytes = uw_csv(&sol).unwrap();
    assert!(bytes.starts_with(b"x,y,t=0,t=0.5,t=1\n"));
    let t = parse_uw_csv(&bytes).unwrap();
    assert_eq!((&t.positions, &t.depths, &t.times), (&sol.positions, &sol.depths, &sol.times));
    assert_eq!(t.values, sol.values);
    assert_eq!(frame_name(0.25), "frame_t0.25.csv");
    let frame = String::from_utf8(frame_csv(&sol, 2).unwrap()).unwrap();
    assert_eq!(frame.lines().next(), Some("x,y,u_w"));
    assert_eq!(frame.lines().count(), 3);
}

#[test]
fn integral_row_keeps_metadata() {
    let row = IntegralRow { n: 200.0, seed: 42, phi_id: "hat".into(), value: 0.125, exit_fraction: 0.0 };
    assert_eq!(integral_csv(&row).unwrap(), b"n,seed,phi_id,value,exit_fraction\n200,42,hat,0.125,0\n");
}

proptest! {
    #[test]
    fn environments_round_trip(omega in prop::collection::vec(0.01f64..0.99, 1..60), shift in 0usize..60, seed in any::<Option<u64>>()) {
        let x_min = -((shift % omega.len()) as i64);
        let mut env = Environment::from_omega(x_min, omega, Law::P).unwrap();
        if let Some(s) = seed {
            env = env.with_seed(s);
        }
        let rec = EnvRecord { env, support: vec![(0.3, 0.25), (0.8, 0.75)] };
        prop_assert_eq!(parse_env_csv(&env_csv(&rec).unwrap()).unwrap(), rec.clone());
        prop_assert_eq!(parse_env_binary(&env_binary(&rec)).unwrap(), rec);
    }

    #[test]
    fn traps_round_trip(mut xs in prop::collection::vec(-10.0f64..10.0, 1..40), ys in prop::collection::vec(1e-9f64..1e3, 40)) {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let atoms: Vec<Atom> = xs.iter().zip(&ys).map(|(&x, &y)| Atom { x, y }).collect();
        let w = TrapEnvironment::new(atoms, -10.0, 10.0, 0.0).unwrap();
        let back = parse_traps(&traps_csv(&w).unwrap(), Some((-10.0, 10.0))).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn snapshots_round_trip(offset in -100i64..100, counts in prop::collection::vec(0u64..5, 0..50)) {
        let c = ParticleConfiguration::new(offset, counts);
        let back = parse_snapshot(&snapshot_csv(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c.nonzero().collect::<Vec<_>>());
    }
}
