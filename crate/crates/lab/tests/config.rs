use std::path::PathBuf;

use rwre_lab::config::*;
use rwre_lab::{LabError, Overrides};

fn parse(text: &str) -> Result<ExperimentConfig, LabError> {
    ExperimentConfig::from_json(text, &Overrides::default())
}

fn error_path(text: &str) -> String {
    match parse(text) {
        Err(LabError::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_config_resolves_defaults() {
    let cfg = parse(r#"{"experiment": "figure1"}"#).unwrap();
    assert_eq!(cfg.experiment, ExperimentId::Figure1);
    assert_eq!(cfg.seed, 1);
    assert!(cfg.workers >= 1);
    assert_eq!(cfg.output_dir, PathBuf::from("results/figure1"));
    assert_eq!(cfg.params, Params::Figure1(Figure1Params::default()));
}

#[test]
fn every_experiment_has_valid_defaults() {
    for id in ExperimentId::ALL {
        let cfg = parse(&format!(r#"{{"experiment": "{}", "seed": 7}}"#, id.name())).unwrap();
        assert_eq!(cfg.experiment, id);
        cfg.validate().unwrap();
        assert_eq!(ExperimentConfig::defaults(id).params, cfg.params);
    }
}

#[test]
fn partial_params_keep_remaining_defaults() {
    let cfg = parse(r#"{"experiment": "duality", "params": {"t": 0.25, "particles": {"reps": 50}}}"#).unwrap();
    let Params::Duality(p) = cfg.params else { panic!() };
    assert_eq!(p.t, 0.25);
    assert_eq!(p.particles.reps, 50);
    assert_eq!(p.reps, DualityParams::default().reps);
    assert_eq!(p.particles.scale, 100.0);
}

#[test]
fn unknown_keys_are_rejected_with_their_path() {
    assert_eq!(error_path(r#"{"experiment": "figure1", "sede": 1}"#), "sede");
    assert_eq!(error_path(r#"{"experiment": "figure1", "params": {"tims": [0.0]}}"#), "params.tims");
    assert_eq!(
        error_path(r#"{"experiment": "figure1", "params": {"traps": {"poisson": {"lambda": 1, "kapa": 0.5, "lo": 0, "hi": 1, "eps": 0.1}}}}"#),
        "params.traps.poisson.kapa"
    );
    assert_eq!(error_path(r#"{"experiment": "tails", "params": {"quenched": {"walk": 5}}}"#), "params.quenched.walk");
}

#[test]
fn type_errors_carry_the_path() {
    assert_eq!(error_path(r#"{"experiment": "speed", "params": {"ballistic": {"steps": "many"}}}"#), "params.ballistic.steps");
    assert_eq!(error_path(r#"{"experiment": "nope"}"#), "experiment");
    assert_eq!(error_path(r#"{"seed": 3}"#), ".");
    assert_eq!(error_path(r#"{"experiment": "figure1", "params": {"u": {"cubic": {}}}}"#), "params.u");
}

#[test]
fn semantic_errors_carry_the_path() {
    assert_eq!(
        error_path(r#"{"experiment": "figure1", "params": {"traps": {"poisson": {"lambda": 1, "kappa": 1.5, "lo": 0, "hi": 1, "eps": 0.1}}}}"#),
        "params.traps.poisson.kappa"
    );
    assert_eq!(error_path(r#"{"experiment": "figure1", "params": {"times": [1.0, 0.5]}}"#), "params.times");
    assert_eq!(error_path(r#"{"experiment": "hydro_traps", "params": {"truncation": [0.1]}}"#), "params.truncation");
    assert_eq!(error_path(r#"{"experiment": "tails", "params": {"dists": [{"rho": {"support": [[2.0, 1.0]]}}]}}"#), "params.dists[0]");
    assert_eq!(error_path(r#"{"experiment": "figure1", "workers": 0}"#), "workers");
    assert_eq!(error_path("{not json"), ".");
}

#[test]
fn overrides_win_over_the_file() {
    let text = r#"{"experiment": "speed", "workers": 3, "output_dir": "out/a"}"#;
    let cfg = parse(text).unwrap();
    assert_eq!((cfg.workers, cfg.output_dir.clone()), (3, PathBuf::from("out/a")));
    let o = Overrides { output_dir: Some("out/b".into()), workers: Some(1) };
    let cfg = ExperimentConfig::from_json(text, &o).unwrap();
    assert_eq!((cfg.workers, cfg.output_dir), (1, PathBuf::from("out/b")));
}

#[test]
fn resolved_config_round_trips_through_json() {
    for id in ExperimentId::ALL {
        let cfg = ExperimentConfig::defaults(id);
        let again = parse(&cfg.to_json().to_string()).unwrap();
        assert_eq!(again, cfg);
    }
}

#[test]
fn manifests_are_accepted_as_configs() {
    let cfg = parse(r#"{"experiment": "stationarity", "seed": 11, "workers": 1}"#).unwrap();
    let manifest = serde_json::json!({ "format": "rwre-lab-result", "experiment": "stationarity", "config": cfg.to_json() });
    assert_eq!(parse(&manifest.to_string()).unwrap(), cfg);
}

#[test]
fn trap_specs_build_environments() {
    let spec = TrapSpec::poisson(0.7, -1.0, 1.0, 0.01, Some(50));
    let a = spec.build(5, 0).unwrap();
    assert_eq!(a.len(), 50);
    assert_eq!(a, spec.build(5, 0).unwrap());
    assert_ne!(a, spec.build(5, 1).unwrap());
    let listed = TrapSpec::Atoms { atoms: vec![(0.2, 1.0), (0.6, 0.5)], lo: 0.0, hi: 1.0 };
    assert_eq!(listed.build(0, 0).unwrap().window(), (0.0, 1.0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    std::fs::write(&path, "x,y\n0.2,1\n0.6,0.5\n").unwrap();
    let file = TrapSpec::File { path, window: Some((0.0, 1.0)) };
    assert_eq!(file.build(0, 0).unwrap(), listed.build(0, 0).unwrap());
}
