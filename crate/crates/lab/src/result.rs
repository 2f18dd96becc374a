//! Result directories: `manifest.json`, `summary.csv` and the per-cell files
//! of one run.
//!
//! Files are first written to `<dir>.partial` and renamed into place once
//! everything is on disk, so a failed run never leaves a half-written result.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::formats::{fmt_f64, write_file, Table};

pub const MANIFEST_FORMAT: &str = "rwre-lab-result";
pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.csv";

/// One acceptance check: the measured value against its threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub measured: f64,
    pub comparison: String,
    pub threshold: String,
    pub passed: bool,
}

impl Criterion {
    pub fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, "<=", fmt_f64(threshold), measured <= threshold)
    }

    pub fn below(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, "<", fmt_f64(threshold), measured < threshold)
    }

    pub fn at_least(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, ">=", fmt_f64(threshold), measured >= threshold)
    }

    pub fn above(name: &str, measured: f64, threshold: f64) -> Self {
        Self::new(name, measured, ">", fmt_f64(threshold), measured > threshold)
    }

    /// lo <= measured <= hi
    pub fn within(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, measured, "in", format!("[{}, {}]", fmt_f64(lo), fmt_f64(hi)), lo <= measured && measured <= hi)
    }

    /// A check whose measured value is a count of violations.
    pub fn none(name: &str, violations: usize) -> Self {
        Self::new(name, violations as f64, "==", "0".into(), violations == 0)
    }

    fn new(name: &str, measured: f64, comparison: &str, threshold: String, passed: bool) -> Self {
        Self { name: name.into(), measured, comparison: comparison.into(), threshold, passed: passed && !measured.is_nan() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Path relative to the result directory.
    pub path: String,
    pub bytes: Vec<u8>,
}

/// Everything one experiment produces before it is persisted.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub artifacts: Vec<Artifact>,
    pub criteria: Vec<Criterion>,
    /// Named sub-seeds derived from the master seed.
    pub seeds: BTreeMap<String, u64>,
    /// Fitted or derived parameters worth recording next to the config.
    pub fitted: BTreeMap<String, serde_json::Value>,
}

impl ExperimentOutput {
    pub fn file(&mut self, path: impl Into<String>, bytes: Vec<u8>) {
        self.artifacts.push(Artifact { path: path.into(), bytes });
    }

    pub fn check(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    pub fn seed(&mut self, name: &str, seed: u64) -> u64 {
        self.seeds.insert(name.into(), seed);
        seed
    }

    pub fn fit(&mut self, name: &str, value: impl Serialize) {
        self.fitted.insert(name.into(), serde_json::to_value(value).expect("fitted value serializes"));
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub experiment: String,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub fitted: BTreeMap<String, serde_json::Value>,
    pub versions: BTreeMap<String, String>,
    pub files: Vec<String>,
    pub passed: bool,
}

pub fn summary_csv(criteria: &[Criterion]) -> Result<Vec<u8>> {
    let mut t = Table::new(&["criterion", "measured", "comparison", "threshold", "passed"])?;
    for c in criteria {
        t.row([c.name.clone(), fmt_f64(c.measured), c.comparison.clone(), c.threshold.clone(), c.passed.to_string()])?;
    }
    t.into_bytes()
}

fn partial_dir(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_else(|| "result".into());
    name.push(".partial");
    out.with_file_name(name)
}

fn remove_dir(dir: &Path) -> Result<()> {
    match std::fs::remove_dir_all(dir) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(LabError::io(dir, e)),
    }
}

/// Persist `output` under `cfg.output_dir`, replacing any previous result.
pub fn write_result(cfg: &ExperimentConfig, output: &ExperimentOutput) -> Result<PathBuf> {
    let out = cfg.output_dir.clone();
    let tmp = partial_dir(&out);
    remove_dir(&tmp)?;
    let written = write_into(&tmp, cfg, output).and_then(|()| {
        remove_dir(&out)?;
        std::fs::rename(&tmp, &out).map_err(|e| LabError::io(&out, e))
    });
    if let Err(e) = written {
        let _ = std::fs::remove_dir_all(&tmp);
        return Err(e);
    }
    Ok(out)
}

fn write_into(dir: &Path, cfg: &ExperimentConfig, output: &ExperimentOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut files = Vec::new();
    for a in &output.artifacts {
        let rel = Path::new(&a.path);
        if rel.is_absolute() || rel.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
            return Err(LabError::Format(format!("artifact path {} escapes the result directory", a.path)));
        }
        write_file(&dir.join(rel), &a.bytes)?;
        files.push(a.path.clone());
    }
    write_file(&dir.join(SUMMARY), &summary_csv(&output.criteria)?)?;
    files.push(SUMMARY.into());
    let versions = BTreeMap::from([
        ("rwre-core".to_string(), rwre_core::VERSION.to_string()),
        ("rwre-lab".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ]);
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        experiment: cfg.experiment.name().into(),
        config: cfg.to_json(),
        seeds: output.seeds.clone(),
        fitted: output.fitted.clone(),
        versions,
        files,
        passed: output.passed(),
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    write_file(&dir.join(MANIFEST), &json)
}

/// Criteria recorded in a result directory.
pub fn read_summary(dir: &Path) -> Result<Vec<Criterion>> {
    let path = dir.join(SUMMARY);
    let bytes = std::fs::read(&path).map_err(|e| LabError::io(&path, e))?;
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.len() != 5 {
            return Err(LabError::Format(format!("{}: expected 5 columns", path.display())));
        }
        out.push(Criterion {
            name: row[0].to_string(),
            measured: row[1].parse().map_err(|_| LabError::Format(format!("bad measured value {:?}", &row[1])))?,
            comparison: row[2].to_string(),
            threshold: row[3].to_string(),
            passed: match &row[4] {
                "true" => true,
                "false" => false,
                other => return Err(LabError::Format(format!("bad passed flag {other:?}"))),
            },
        });
    }
    Ok(out)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = std::fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// `PASS`/`FAIL` line for one criterion.
pub fn summary_line(c: &Criterion) -> String {
    format!(
        "{} {}: measured {} {} {}",
        if c.passed { "PASS" } else { "FAIL" },
        c.name,
        fmt_f64(c.measured),
        c.comparison,
        c.threshold
    )
}
