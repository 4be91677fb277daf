//! Command implementations behind the `koenigs` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use koenigs_core::analysis::{
    backward_generator_limsup, euclidean_sufficient_test, forward_certificate, hayman_wu_audit, regularity_classify,
    shift_classify,
};
use koenigs_core::audit::{criterion_with_note, run_audit, run_example, AuditConfig, Metadata, Suite, TruncationMeta};
use koenigs_core::semigroup::{OrbitSample, Semigroup, Start};
use koenigs_core::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::{Scenario, SemigroupSource};

/// Header of every orbit CSV.
pub const TRACE_HEADER: &str = "t,re,im,w_re,w_im,g_abs,delta_disk,delta_omega";

/// A rejected request: bad flags, scenario or grid.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

/// Exit code for a failed command: 2 for invalid input, 3 for numerical failure.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<std::io::Error>().is_some()
        {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<koenigs_core::Error>() {
            use koenigs_core::Error as E;
            return match e {
                E::Parameter(_) | E::Horizon { .. } | E::Domain(_) | E::Unsupported(_) | E::Composition(_) => 2,
                E::Evaluation(_) | E::Inversion { .. } | E::CrossValidation { .. } => 3,
            };
        }
    }
    3
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub truncation: Option<f64>,
    pub tmax: Option<f64>,
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn load_scenario(common: &Common) -> Result<Scenario> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| usage("this command needs --config PATH pointing at a scenario file"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sc = Scenario::parse(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
    if let Some(t) = common.tmax {
        sc.tmax = Some(t);
    }
    if let Some(n) = common.truncation {
        sc.set_truncation(n);
    }
    if sc.starts.is_empty() {
        return Err(usage("scenario lists no starting points"));
    }
    Ok(sc)
}

fn scenario_metadata(kind: &str, sc: &Scenario, seed: u64) -> Metadata {
    let slit_pairs = match &sc.semigroup {
        SemigroupSource::Anchored { slit_pairs, example } => match example {
            koenigs_core::scenarios::Anchored::SlitStrip => {
                Some(slit_pairs.unwrap_or(koenigs_core::domains::DEFAULT_SLIT_PAIRS))
            }
            _ => None,
        },
        _ => None,
    };
    Metadata::new(
        kind,
        sc,
        seed,
        TruncationMeta {
            slit_pairs,
            channel: sc.channel_truncation(),
            tmax: sc.tmax,
        },
        sc.heuristic,
    )
}

fn out_dir(common: &Common, sc: Option<&Scenario>) -> Option<PathBuf> {
    common.out.clone().or_else(|| sc.and_then(|s| s.outputs.dir.clone()))
}

fn build(sc: &Scenario) -> Result<Semigroup> {
    sc.build().context("building the semigroup")
}

/// Disk point for a scenario start.
fn disk_start(sg: &Semigroup, start: Start) -> Result<Complex64> {
    match start {
        Start::Disk(z) => {
            if !(z.norm() < 1.0) {
                return Err(usage(format!("starting point {z} is not in the unit disk")));
            }
            Ok(z)
        }
        Start::Koenigs(w) => {
            if !sg.omega().contains(w) {
                return Err(usage(format!("starting point {w} is not in the Koenigs domain")));
            }
            Ok(sg.generator_at_image(w, None)?.0)
        }
    }
}

fn csv_rows(samples: &[OrbitSample]) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for p in samples {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.t,
            p.z.re,
            p.z.im,
            p.w.re,
            p.w.im,
            p.g.norm(),
            p.delta_disk,
            p.delta_omega
        );
    }
    s
}

/// One CSV per (start, direction) plus a JSON manifest.
pub fn run_trace(common: &Common) -> Result<Vec<PathBuf>> {
    let sc = load_scenario(common)?;
    let sg = build(&sc)?;
    if sg.koenigs().is_none() {
        return Err(usage("tracing needs a Koenigs map; this semigroup is known only through its domain"));
    }
    if sc.grids.forward.is_empty() && sc.grids.backward.is_empty() {
        return Err(usage("scenario has neither a forward nor a backward grid"));
    }
    let dir = out_dir(common, Some(&sc)).unwrap_or_else(|| PathBuf::from("."));
    let mut outputs = Vec::new();
    for (i, &p) in sc.starts.iter().enumerate() {
        let start = sc.start(p);
        let z = disk_start(&sg, start)?;
        if !sc.grids.forward.is_empty() {
            let orbit = sg
                .forward_orbit(z, &sc.grids.forward)
                .with_context(|| format!("forward orbit of start {i} ({z})"))?;
            outputs.push((format!("trace_p{i}_forward.csv"), csv_rows(&orbit)));
        }
        if !sc.grids.backward.is_empty() {
            let horizon = sg.backward_horizon(Start::Disk(z))?;
            if let Some(&t) = sc.grids.backward.iter().find(|&&t| t >= horizon.value) {
                return Err(usage(format!(
                    "backward grid reaches t = {t} but the backward horizon of start {i} ({z}) is T_z = {}",
                    horizon.value
                )));
            }
            let orbit = sg
                .backward_orbit(z, &sc.grids.backward)
                .with_context(|| format!("backward orbit of start {i} ({z})"))?;
            outputs.push((format!("trace_p{i}_backward.csv"), csv_rows(&orbit)));
        }
    }
    let files: Vec<&str> = outputs.iter().map(|o| o.0.as_str()).collect();
    let manifest = json!({
        "metadata": scenario_metadata("trace", &sc, common.seed.unwrap_or(koenigs_core::audit::DEFAULT_SEED)),
        "files": files,
    });
    let mut written = Vec::new();
    for (name, body) in &outputs {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    let path = dir.join("trace.json");
    write_atomic(&path, to_json(&manifest).as_bytes())?;
    written.push(path);
    Ok(written)
}

/// Per-start criterion reports and any other requested analyses.
pub fn criterion_report(common: &Common) -> Result<(Value, Vec<(String, String)>, Option<PathBuf>)> {
    let sc = load_scenario(common)?;
    let sg = build(&sc)?;
    let h = sc.heuristic;
    let mut results = Vec::new();
    let mut csvs = Vec::new();
    for (i, &p) in sc.starts.iter().enumerate() {
        let start = sc.start(p);
        if let Start::Disk(z) = start {
            disk_start(&sg, Start::Disk(z))?;
        } else if !sg.omega().contains(p) {
            return Err(usage(format!("starting point {p} is not in the Koenigs domain")));
        }
        let mut entry = serde_json::Map::new();
        entry.insert("start".into(), json!(p));
        if sc.analyses.criterion {
            let mut r = criterion_with_note(&sg, start, &h).with_context(|| format!("criterion for start {i}"))?;
            r.truncation.channel = sc.channel_truncation();
            csvs.push((format!("criterion_{i}.csv"), r.to_csv()));
            entry.insert("criterion".into(), json!(r));
        }
        if sc.analyses.generator_limsup {
            entry.insert("generator_limsup".into(), json!(backward_generator_limsup(&sg, start, &h)?));
        }
        if sc.analyses.regularity {
            entry.insert("regularity".into(), json!(regularity_classify(&sg, start, &h)?));
        }
        if sc.analyses.euclidean {
            entry.insert("euclidean_test".into(), json!(euclidean_sufficient_test(&sg, start, &h)?));
        }
        if sc.analyses.forward_certificate || sc.analyses.hayman_wu || sc.analyses.shift {
            let z = disk_start(&sg, start)?;
            if sc.analyses.forward_certificate {
                entry.insert("forward_certificate".into(), json!(forward_certificate(&sg, z)?));
            }
            if sc.analyses.hayman_wu {
                entry.insert("hayman_wu".into(), json!(hayman_wu_audit(&sg, z)?));
            }
            if sc.analyses.shift {
                entry.insert("shift".into(), json!(shift_classify(&sg, z, &h)?));
            }
        }
        results.push(Value::Object(entry));
    }
    let report = json!({
        "metadata": scenario_metadata("criterion", &sc, common.seed.unwrap_or(koenigs_core::audit::DEFAULT_SEED)),
        "name": sc.name,
        "results": results,
    });
    Ok((report, csvs, out_dir(common, Some(&sc))))
}

/// Writes the criterion report (and CSVs) under `--out`, or prints the JSON.
pub fn run_criterion(common: &Common) -> Result<String> {
    let (report, csvs, dir) = criterion_report(common)?;
    let body = to_json(&report);
    if let Some(dir) = dir {
        write_atomic(&dir.join("criterion.json"), body.as_bytes())?;
        for (name, csv) in &csvs {
            write_atomic(&dir.join(name), csv.as_bytes())?;
        }
        return Ok(String::new());
    }
    Ok(body)
}

fn audit_config(common: &Common) -> Result<AuditConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing audit config {}", path.display()))?
        }
        None => AuditConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.tmax {
        if !(t > 0.0) {
            return Err(usage("--tmax must be positive"));
        }
        cfg.tmax = Some(t);
    }
    Ok(cfg)
}

fn slit_pairs_flag(n: f64) -> Result<u32> {
    if n.fract() != 0.0 || !(1.0..=60.0).contains(&n) {
        return Err(usage(format!("slit-pair truncation must be an integer in 1..=60, got {n}")));
    }
    Ok(n as u32)
}

/// Example report: `(json, summary)`.
pub fn run_examples(common: &Common, id: u8) -> Result<(String, String)> {
    if !(1..=3).contains(&id) {
        return Err(usage(format!("--id must be 1, 2 or 3, got {id}")));
    }
    let mut cfg = audit_config(common)?;
    if let Some(n) = common.truncation {
        if id == 2 {
            cfg.channel_truncation = n;
        } else {
            cfg.slit_pairs = slit_pairs_flag(n)?;
        }
    }
    let rep = run_example(id, &cfg)?;
    let body = to_json(&rep);
    let summary = rep.summary();
    if let Some(dir) = &common.out {
        write_atomic(&dir.join(format!("example_{id}.json")), body.as_bytes())?;
        write_atomic(&dir.join(format!("example_{id}.txt")), summary.as_bytes())?;
    }
    Ok((body, summary))
}

/// Audit report JSON and whether every check passed.
pub fn run_audit_command(common: &Common, suite: &str) -> Result<(String, bool)> {
    let suite: Suite = suite.parse().map_err(|e: koenigs_core::Error| usage(e.to_string()))?;
    let mut cfg = audit_config(common)?;
    if let Some(n) = common.truncation {
        cfg.slit_pairs = slit_pairs_flag(n)?;
    }
    let rep = run_audit(suite, &cfg)?;
    let body = to_json(&rep);
    if let Some(dir) = &common.out {
        write_atomic(&dir.join(format!("audit_{suite}.json")), body.as_bytes())?;
    }
    Ok((body, rep.pass))
}

/// `PASS`/`FAIL` line per check.
pub fn audit_summary(body: &str) -> String {
    let v: Value = serde_json::from_str(body).unwrap_or(Value::Null);
    let mut s = String::new();
    if let Some(checks) = v.get("checks").and_then(Value::as_array) {
        for c in checks {
            let pass = c.get("pass").and_then(Value::as_bool).unwrap_or(false);
            let _ = writeln!(
                s,
                "[{}] {} ({}/{})",
                if pass { "PASS" } else { "FAIL" },
                c.get("id").and_then(Value::as_str).unwrap_or("?"),
                c.get("passed").unwrap_or(&Value::Null),
                c.get("total").unwrap_or(&Value::Null),
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use koenigs_core::Error;

    #[test]
    fn exit_codes_follow_error_kind() {
        let horizon = anyhow!(Error::Horizon { t: 2.0, horizon: 1.0 }).context("tracing");
        assert_eq!(exit_code(&horizon), 2);
        assert_eq!(exit_code(&usage("bad grid")), 2);
        let inv = anyhow!(Error::Inversion {
            message: "stalled".into(),
            residual: 1e-3
        });
        assert_eq!(exit_code(&inv), 3);
        assert_eq!(exit_code(&anyhow!(Error::CrossValidation { deviation: 1e-3, t: 4.0 })), 3);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("koenigs-write-{}", std::process::id()));
        let path = dir.join("x.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert!(!dir.join("x.json.tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
