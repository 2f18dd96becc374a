//! Acceptance run: one PASS/FAIL line per criterion. Runs the experiments at
//! their default (full) settings, so expect several minutes in total.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rwre_core::func::ProfileFunction;
use rwre_core::trap::{Atom, TrapEnvironment};
use rwre_core::uw::{solve_uw_ode, SolveOptions};
use rwre_lab::config::{ExperimentConfig, ExperimentId};
use rwre_lab::result::{summary_line, Criterion, ExperimentOutput};

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_criteria(out: &ExperimentOutput, prefixes: &[&str]) -> Outcome {
    let picked: Vec<&Criterion> =
        out.criteria.iter().filter(|c| prefixes.iter().any(|p| c.name.starts_with(p))).collect();
    let passed = !picked.is_empty() && picked.iter().all(|c| c.passed);
    let detail = picked.iter().map(|c| summary_line(c)).collect::<Vec<_>>().join("; ");
    Outcome { passed, detail }
}

fn run_experiment(id: ExperimentId, dir: &Path, workers: usize) -> (ExperimentOutput, Duration) {
    let mut cfg = ExperimentConfig::defaults(id);
    cfg.output_dir = dir.join(id.name());
    cfg.workers = workers;
    let t0 = Instant::now();
    let (_, out) = rwre_lab::run(&cfg).unwrap_or_else(|e| panic!("{} failed: {e}", id.name()));
    (out, t0.elapsed())
}

fn closed_form() -> Outcome {
    let w = TrapEnvironment::new(vec![Atom { x: 0.0, y: 1.0 }, Atom { x: 1.0, y: 1.0 }], -1.0, 2.0, 0.0).unwrap();
    let u = ProfileFunction::hat(-0.5, 0.0, 0.5, 1.0).unwrap();
    let mut best = Duration::MAX;
    let mut err = f64::INFINITY;
    for _ in 0..20 {
        let t0 = Instant::now();
        let sol = solve_uw_ode(&w, &u, &[1.0], SolveOptions::default()).unwrap();
        best = best.min(t0.elapsed());
        err = (sol.value(1, 0) - (-1.0f64).exp()).abs();
    }
    Outcome { passed: err <= 1e-8 && best < Duration::from_millis(1), detail: format!("|v2(1) - 1/e| = {err:e}, best of 20 solves {best:?}") }
}

fn csv_files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else if path.extension().is_some_and(|e| e == "csv") {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

fn cli_run(config: &Path, out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_rwre-lab"))
        .args(["run", config.to_str().unwrap(), "--output-dir", out.to_str().unwrap(), "--workers", "1"])
        .env_remove("RWRE_LAB_OUTPUT_DIR")
        .env_remove("RWRE_LAB_WORKERS")
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "run {} failed", config.display());
}

fn determinism(dir: &Path) -> Outcome {
    let mut mismatches = Vec::new();
    let mut files = 0;
    let configs = [
        ("hydro_traps", r#"{"experiment": "hydro_traps", "seed": 5}"#),
        ("stationarity", r#"{"experiment": "stationarity", "seed": 5, "params": {"reps": 2000}}"#),
        ("duality", r#"{"experiment": "duality", "seed": 5, "params": {"reps": 2000, "particles": {"reps": 500}}}"#),
    ];
    for (id, text) in configs {
        let config = dir.join(format!("{id}.json"));
        std::fs::write(&config, text).unwrap();
        let (a, b, c) = (dir.join(format!("{id}-a")), dir.join(format!("{id}-b")), dir.join(format!("{id}-c")));
        cli_run(&config, &a);
        cli_run(&config, &b);
        cli_run(&a.join("manifest.json"), &c);
        let first = csv_files(&a);
        files += first.len();
        for other in [&b, &c] {
            if csv_files(other) != first {
                mismatches.push(other.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    }
    Outcome {
        passed: mismatches.is_empty() && files > 0,
        detail: format!("{files} CSV files compared across repeated and manifest re-runs, mismatched runs: {mismatches:?}"),
    }
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut lines = Vec::new();
    let mut report = |n: usize, name: &str, o: Outcome| {
        let line = format!("{} {n:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        println!("{line}");
        lines.push(o.passed);
    };

    report(1, "closed-form two-atom solution", closed_form());

    let (uw, took) = run_experiment(ExperimentId::UwCrosscheck, dir, 4);
    let mut o = from_criteria(&uw, &["uw.mc_vs_ode"]);
    o.passed &= took < Duration::from_secs(60);
    o.detail = format!("{}; runtime {took:.1?} (limit 60 s)", o.detail);
    report(2, "Monte Carlo against the forward solver", o);

    let (fig, _) = run_experiment(ExperimentId::Figure1, dir, 1);
    let frames = std::fs::read_dir(dir.join("figure1/frames")).map(|d| d.count()).unwrap_or(0);
    let mut o = from_criteria(&fig, &["figure1."]);
    o.passed &= frames == 5;
    o.detail = format!("{frames} frames; {}", o.detail);
    report(3, "figure frames", o);

    let (dual, _) = run_experiment(ExperimentId::Duality, dir, 1);
    report(4, "forward/backward duality", from_criteria(&dual, &["duality.max_pair_z"]));
    report(5, "particle duality", from_criteria(&dual, &["duality.particle", "duality.dispersion"]));

    let (stat, _) = run_experiment(ExperimentId::Stationarity, dir, 1);
    report(6, "stationarity", from_criteria(&stat, &["stationarity."]));

    let (tails, _) = run_experiment(ExperimentId::Tails, dir, 1);
    report(7, "quenched formulas", from_criteria(&tails, &["tails.quenched", "tails.row", "tails.column"]));
    report(8, "tail laws", from_criteria(&tails, &["tails.hill", "tails.nu"]));

    let (stable, _) = run_experiment(ExperimentId::StableLimits, dir, 1);
    report(9, "stable limits", from_criteria(&stable, &["stable."]));

    let (ht, _) = run_experiment(ExperimentId::HydroTraps, dir, 1);
    let (hr, _) = run_experiment(ExperimentId::HydroRwre, dir, 1);
    let a = from_criteria(&ht, &["hydro_traps.exceedance"]);
    let b = from_criteria(&hr, &["hydro_rwre.ks"]);
    report(10, "hydrodynamic trends", Outcome { passed: a.passed && b.passed, detail: format!("{}; {}", a.detail, b.detail) });

    report(11, "determinism", determinism(dir));

    let failed = lines.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
