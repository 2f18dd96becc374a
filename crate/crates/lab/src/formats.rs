//! On-disk formats: environments (CSV and binary), ladder tables, trap
//! environments, u_W grids and frames, particle snapshots and integrals.
//!
//! Writers return bytes so results can be assembled before anything touches
//! the disk. Floats are written in shortest round-trip form.

use std::io::{Read, Write};
use std::path::Path;

use rwre_core::env::{EnvDistribution, Environment, LadderStats, Law};
use rwre_core::particles::ParticleConfiguration;
use rwre_core::trap::{Atom, TrapEnvironment};
use rwre_core::uw::UwSolution;

use crate::error::{LabError, Result};

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && v.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| LabError::Format(format!("{what}: not a number: {s:?}")))
}

fn parse_i64(s: &str, what: &str) -> Result<i64> {
    s.trim().parse().map_err(|_| LabError::Format(format!("{what}: not an integer: {s:?}")))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| LabError::io(path, e))
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| LabError::Format(e.to_string()))
}

fn law_name(law: Law) -> &'static str {
    match law {
        Law::P => "P",
        Law::Q => "Q",
    }
}

fn parse_law(s: &str) -> Result<Law> {
    match s.trim() {
        "P" => Ok(Law::P),
        "Q" => Ok(Law::Q),
        other => Err(LabError::Format(format!("unknown law {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// environments

/// An environment window together with the single-site law it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvRecord {
    pub env: Environment,
    /// (ω, probability) pairs.
    pub support: Vec<(f64, f64)>,
}

impl EnvRecord {
    pub fn new(env: Environment, dist: &EnvDistribution) -> Self {
        Self { env, support: dist.support().iter().map(|p| (p.omega, p.prob)).collect() }
    }
}

fn join(xs: impl Iterator<Item = f64>) -> String {
    xs.map(fmt_f64).collect::<Vec<_>>().join(";")
}

/// Key/value header rows (`law`, `seed`, `x_min`, `x_max`, `support_omega`,
/// `support_prob`), then `x,omega` rows.
pub fn env_csv(rec: &EnvRecord) -> Result<Vec<u8>> {
    let env = &rec.env;
    let mut w = writer();
    w.write_record(["law", law_name(env.law())])?;
    w.write_record(["seed".to_string(), env.seed().map(|s| s.to_string()).unwrap_or_default()])?;
    w.write_record(["x_min".to_string(), env.x_min().to_string()])?;
    w.write_record(["x_max".to_string(), env.x_max().to_string()])?;
    w.write_record(["support_omega".to_string(), join(rec.support.iter().map(|p| p.0))])?;
    w.write_record(["support_prob".to_string(), join(rec.support.iter().map(|p| p.1))])?;
    w.write_record(["x", "omega"])?;
    for (i, &o) in env.omegas().iter().enumerate() {
        w.write_record([(env.x_min() + i as i64).to_string(), fmt_f64(o)])?;
    }
    finish(w)
}

pub fn parse_env_csv(bytes: &[u8]) -> Result<EnvRecord> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(bytes);
    let rows: Vec<csv::StringRecord> = r.records().collect::<std::result::Result<_, _>>()?;
    let header = |i: usize, key: &str| -> Result<String> {
        match rows.get(i) {
            Some(row) if row.get(0) == Some(key) => Ok(row.get(1).unwrap_or("").to_string()),
            _ => Err(LabError::Format(format!("environment header row {} must be `{key}`", i + 1))),
        }
    };
    let law = parse_law(&header(0, "law")?)?;
    let seed = match header(1, "seed")?.trim() {
        "" => None,
        s => Some(s.parse::<u64>().map_err(|_| LabError::Format(format!("bad seed {s:?}")))?),
    };
    let x_min = parse_i64(&header(2, "x_min")?, "x_min")?;
    let x_max = parse_i64(&header(3, "x_max")?, "x_max")?;
    let split = |s: String, what: &str| -> Result<Vec<f64>> {
        s.split(';').filter(|p| !p.is_empty()).map(|p| parse_f64(p, what)).collect()
    };
    let omegas = split(header(4, "support_omega")?, "support_omega")?;
    let probs = split(header(5, "support_prob")?, "support_prob")?;
    if omegas.len() != probs.len() {
        return Err(LabError::Format("support_omega and support_prob differ in length".into()));
    }
    if rows.get(6).map(|r| (r.get(0), r.get(1))) != Some((Some("x"), Some("omega"))) {
        return Err(LabError::Format("expected the `x,omega` column header".into()));
    }
    let mut omega = Vec::with_capacity(rows.len().saturating_sub(7));
    for (i, row) in rows[7..].iter().enumerate() {
        let x = parse_i64(row.get(0).unwrap_or(""), "x")?;
        if x != x_min + i as i64 {
            return Err(LabError::Format(format!("site {x} out of sequence, expected {}", x_min + i as i64)));
        }
        omega.push(parse_f64(row.get(1).unwrap_or(""), "omega")?);
    }
    if x_min + omega.len() as i64 - 1 != x_max {
        return Err(LabError::Format(format!("{} sites do not fill [{x_min}, {x_max}]", omega.len())));
    }
    build_env(x_min, omega, law, seed, omegas.into_iter().zip(probs).collect())
}

fn build_env(x_min: i64, omega: Vec<f64>, law: Law, seed: Option<u64>, support: Vec<(f64, f64)>) -> Result<EnvRecord> {
    let mut env = Environment::from_omega(x_min, omega, law)?;
    if let Some(s) = seed {
        env = env.with_seed(s);
    }
    Ok(EnvRecord { env, support })
}

const ENV_MAGIC: &[u8; 8] = b"RWREENV1";

/// Little-endian binary: magic, law byte (0 = P, 1 = Q), seed flag byte,
/// seed u64, x_min i64, support count u32 with (ω, p) f64 pairs, site count
/// u64 with the ω values.
pub fn env_binary(rec: &EnvRecord) -> Vec<u8> {
    let env = &rec.env;
    let mut out = Vec::with_capacity(48 + 16 * rec.support.len() + 8 * env.len());
    out.extend_from_slice(ENV_MAGIC);
    out.push(match env.law() {
        Law::P => 0,
        Law::Q => 1,
    });
    out.push(env.seed().is_some() as u8);
    out.extend_from_slice(&env.seed().unwrap_or(0).to_le_bytes());
    out.extend_from_slice(&env.x_min().to_le_bytes());
    out.extend_from_slice(&(rec.support.len() as u32).to_le_bytes());
    for &(o, p) in &rec.support {
        out.extend_from_slice(&o.to_le_bytes());
        out.extend_from_slice(&p.to_le_bytes());
    }
    out.extend_from_slice(&(env.len() as u64).to_le_bytes());
    for &o in env.omegas() {
        out.extend_from_slice(&o.to_le_bytes());
    }
    out
}

pub fn parse_env_binary(mut bytes: &[u8]) -> Result<EnvRecord> {
    fn take<const N: usize>(r: &mut &[u8]) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        r.read_exact(&mut buf).map_err(|_| LabError::Format("truncated environment file".into()))?;
        Ok(buf)
    }
    if &take::<8>(&mut bytes)? != ENV_MAGIC {
        return Err(LabError::Format("not an environment file".into()));
    }
    let law = match take::<1>(&mut bytes)?[0] {
        0 => Law::P,
        1 => Law::Q,
        b => return Err(LabError::Format(format!("unknown law byte {b}"))),
    };
    let has_seed = take::<1>(&mut bytes)?[0] != 0;
    let seed = u64::from_le_bytes(take(&mut bytes)?);
    let x_min = i64::from_le_bytes(take(&mut bytes)?);
    let k = u32::from_le_bytes(take(&mut bytes)?) as usize;
    let mut support = Vec::with_capacity(k.min(1024));
    for _ in 0..k {
        support.push((f64::from_le_bytes(take(&mut bytes)?), f64::from_le_bytes(take(&mut bytes)?)));
    }
    let n = u64::from_le_bytes(take(&mut bytes)?) as usize;
    if bytes.len() != 8 * n {
        return Err(LabError::Format(format!("expected {n} sites, found {} bytes", bytes.len())));
    }
    let omega = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    build_env(x_min, omega, law, has_seed.then_some(seed), support)
}

pub fn load_env(path: &Path) -> Result<EnvRecord> {
    let bytes = read_file(path)?;
    if bytes.starts_with(ENV_MAGIC) {
        parse_env_binary(&bytes)
    } else {
        parse_env_csv(&bytes)
    }
}

/// Columns k, nu_k, beta_k, M_k; incomplete blocks leave beta_k and M_k empty.
pub fn ladder_csv(ladders: &LadderStats) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["k", "nu_k", "beta_k", "M_k"])?;
    for e in ladders.entries() {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        w.write_record([e.k.to_string(), e.nu.to_string(), opt(e.beta), opt(e.max_increase)])?;
    }
    finish(w)
}

// ---------------------------------------------------------------------------
// trap environments

pub fn traps_csv(w: &TrapEnvironment) -> Result<Vec<u8>> {
    let mut out = writer();
    out.write_record(["x", "y"])?;
    for a in w.atoms() {
        out.write_record([fmt_f64(a.x), fmt_f64(a.y)])?;
    }
    finish(out)
}

/// Parse x,y rows. Positions must be strictly increasing; the window
/// defaults to the span of the atoms.
pub fn parse_traps(bytes: &[u8], window: Option<(f64, f64)>) -> Result<TrapEnvironment> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(LabError::Format("trap CSV must have the columns x,y".into()));
    }
    let mut atoms: Vec<Atom> = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let x = parse_f64(&row[0], "x")?;
        let y = parse_f64(&row[1], "y")?;
        if let Some(prev) = atoms.last() {
            if !(x > prev.x) {
                return Err(LabError::Format(format!("row {}: x = {x} is not above the previous {}", i + 2, prev.x)));
            }
        }
        atoms.push(Atom { x, y });
    }
    Ok(match window {
        Some((lo, hi)) => TrapEnvironment::new(atoms, lo, hi, 0.0)?,
        None => TrapEnvironment::from_atoms(atoms)?,
    })
}

pub fn load_traps(path: &Path, window: Option<(f64, f64)>) -> Result<TrapEnvironment> {
    parse_traps(&read_file(path)?, window).map_err(|e| match e {
        LabError::Format(m) => LabError::Format(format!("{}: {m}", path.display())),
        e => e,
    })
}

// ---------------------------------------------------------------------------
// u_W

fn time_label(t: f64) -> String {
    format!("t={}", fmt_f64(t))
}

/// One row per atom: x, y, then u_W at each grid time.
pub fn uw_csv(sol: &UwSolution) -> Result<Vec<u8>> {
    grid_csv(sol, &sol.values)
}

/// Same layout as [`uw_csv`] with the Monte Carlo standard errors.
pub fn uw_stderr_csv(sol: &UwSolution) -> Result<Option<Vec<u8>>> {
    sol.stderr.as_ref().map(|se| grid_csv(sol, se)).transpose()
}

fn grid_csv(sol: &UwSolution, values: &[f64]) -> Result<Vec<u8>> {
    let mut w = writer();
    let mut head = vec!["x".to_string(), "y".to_string()];
    head.extend(sol.times.iter().map(|&t| time_label(t)));
    w.write_record(&head)?;
    let nt = sol.times.len();
    for k in 0..sol.positions.len() {
        let mut row = vec![fmt_f64(sol.positions[k]), fmt_f64(sol.depths[k])];
        row.extend(values[k * nt..(k + 1) * nt].iter().map(|&v| fmt_f64(v)));
        w.write_record(&row)?;
    }
    finish(w)
}

/// Contents of a u_W CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct UwTable {
    pub positions: Vec<f64>,
    pub depths: Vec<f64>,
    pub times: Vec<f64>,
    /// Row-major: one row of `times.len()` values per atom.
    pub values: Vec<f64>,
}

/// Inverse of [`uw_csv`].
pub fn parse_uw_csv(bytes: &[u8]) -> Result<UwTable> {
    let mut r = csv::ReaderBuilder::new().from_reader(bytes);
    let headers = r.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(LabError::Format("u_W CSV must start with the columns x,y".into()));
    }
    let times = headers
        .iter()
        .skip(2)
        .map(|h| h.strip_prefix("t=").ok_or_else(|| LabError::Format(format!("bad time column {h:?}"))).and_then(|t| parse_f64(t, "time")))
        .collect::<Result<Vec<_>>>()?;
    let (mut xs, mut ys, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    for row in r.records() {
        let row = row?;
        xs.push(parse_f64(&row[0], "x")?);
        ys.push(parse_f64(&row[1], "y")?);
        for v in row.iter().skip(2) {
            vals.push(parse_f64(v, "u_w")?);
        }
    }
    Ok(UwTable { positions: xs, depths: ys, times, values: vals })
}

/// Name of the frame file for time `t`.
pub fn frame_name(t: f64) -> String {
    format!("frame_t{t:.2}.csv")
}

/// Columns x, y, u_w: the step function u_W(t, ·) by its value at each atom.
pub fn frame_csv(sol: &UwSolution, j: usize) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["x", "y", "u_w"])?;
    for k in 0..sol.positions.len() {
        w.write_record([fmt_f64(sol.positions[k]), fmt_f64(sol.depths[k]), fmt_f64(sol.value(k, j))])?;
    }
    finish(w)
}

// ---------------------------------------------------------------------------
// particles

/// Sparse snapshot: nonzero (site, count) pairs.
pub fn snapshot_csv(config: &ParticleConfiguration) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["site", "count"])?;
    for (s, c) in config.nonzero() {
        w.write_record([s.to_string(), c.to_string()])?;
    }
    finish(w)
}

/// Inverse of [`snapshot_csv`]; sites must be strictly increasing.
pub fn parse_snapshot(bytes: &[u8]) -> Result<Vec<(i64, u64)>> {
    let mut r = csv::ReaderBuilder::new().from_reader(bytes);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["site", "count"] {
        return Err(LabError::Format("snapshot CSV must have the columns site,count".into()));
    }
    let mut out: Vec<(i64, u64)> = Vec::new();
    for row in r.records() {
        let row = row?;
        let s = parse_i64(&row[0], "site")?;
        let c = row[1].trim().parse().map_err(|_| LabError::Format(format!("bad count {:?}", &row[1])))?;
        if out.last().is_some_and(|&(p, _)| p >= s) {
            return Err(LabError::Format(format!("site {s} out of order")));
        }
        out.push((s, c));
    }
    Ok(out)
}

/// One space-time integral with the metadata that identifies it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralRow {
    pub n: f64,
    pub seed: u64,
    pub phi_id: String,
    pub value: f64,
    pub exit_fraction: f64,
}

pub fn integral_csv(row: &IntegralRow) -> Result<Vec<u8>> {
    integrals_csv(std::slice::from_ref(row))
}

/// Header n, seed, phi_id, value, exit_fraction; one row per integral.
pub fn integrals_csv(rows: &[IntegralRow]) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(["n", "seed", "phi_id", "value", "exit_fraction"])?;
    for r in rows {
        w.write_record([fmt_f64(r.n), r.seed.to_string(), r.phi_id.clone(), fmt_f64(r.value), fmt_f64(r.exit_fraction)])?;
    }
    finish(w)
}

// ---------------------------------------------------------------------------
// generic tables

/// Small CSV table builder for per-cell outputs.
pub struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self> {
        let mut w = writer();
        w.write_record(header)?;
        Ok(Self { w })
    }

    pub fn row<I, S>(&mut self, cells: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(cells)?;
        Ok(())
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        finish(self.w)
    }
}

/// Write bytes to `path`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    f.write_all(bytes).map_err(|e| LabError::io(path, e))
}
