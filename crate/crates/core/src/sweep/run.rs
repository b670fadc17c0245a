//! Executing runs and sweeps and writing their artifacts.
//!
//! Output layout under `out`:
//!
//! ```text
//! manifest.json      config snapshot, version, hashes, wall time
//! grid.csv           one row per sweep point
//! summary.json       single runs only
//! traces/*.csv       time series
//! plots/*.svg        figures
//! journal.jsonl      completed sweep points, for --resume
//! checkpoints/       MPS checkpoints of unfinished continuum points
//! ```
//!
//! Everything except `manifest.json`, the journal and checkpoints is a pure
//! function of the configuration.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SweepConfig};
use super::output::{
    grid_csv, read_grid_csv, read_trace_csv, sha256_file, sha256_hex, trace_csv, write_atomic,
    PointRecord, PointStatus,
};
use crate::discrete;
use crate::error::{Error, Result};
use crate::mps::TcmpsRun;
use crate::plot;
use crate::result::{Diagnostics, RunResult};

pub const MANIFEST: &str = "manifest.json";
pub const GRID: &str = "grid.csv";
pub const SUMMARY: &str = "summary.json";
pub const JOURNAL: &str = "journal.jsonl";
pub const TRACES: &str = "traces";
pub const PLOTS: &str = "plots";
pub const CHECKPOINTS: &str = "checkpoints";

/// Sweeps with at most this many points also get one time-series plot per
/// point.
pub const MAX_TRACE_PLOTS: usize = 16;

/// Run one configuration. With `checkpoint` set, continuum runs resume from
/// that file if it exists and refresh it every `checkpoint_every` steps; the
/// file is removed once the run completes.
pub fn execute(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<RunResult> {
    cfg.validate()?;
    match cfg {
        RunConfig::Discrete { params, integrator } => discrete::evolve(params, integrator),
        RunConfig::Continuum {
            params,
            mps,
            checkpoint_every,
            ..
        } => {
            let chain = params.build_chain()?;
            let mut run = match checkpoint {
                Some(p) if p.exists() => TcmpsRun::resume(p, params, &chain, mps)?,
                _ => TcmpsRun::new(params, &chain, mps)?,
            };
            match (checkpoint, *checkpoint_every) {
                (Some(p), every) if every > 0 => {
                    while !run.is_done() {
                        run.advance(every)?;
                        if !run.is_done() {
                            run.save_checkpoint(p)?;
                        }
                    }
                    let result = run.finish()?;
                    if p.exists() {
                        std::fs::remove_file(p)?;
                    }
                    Ok(result)
                }
                _ => run.finish(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ManifestConfig {
    Single { config: RunConfig },
    Sweep { config: SweepConfig },
}

/// Provenance record written next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    #[serde(flatten)]
    pub config: ManifestConfig,
    /// SHA-256 of the canonical JSON of the configuration.
    pub config_hash: String,
    /// SHA-256 over the sorted `(path, sha256)` list of outputs.
    pub determinism_hash: String,
    pub wall_time_seconds: f64,
    /// Output path (relative to the output directory) to SHA-256.
    pub outputs: BTreeMap<String, String>,
    pub points: usize,
    pub failed: usize,
}

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

fn config_hash(cfg: &ManifestConfig) -> Result<String> {
    Ok(sha256_hex(serde_json::to_string(cfg)?.as_bytes()))
}

fn collect_outputs(out: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for top in [GRID, SUMMARY] {
        let p = out.join(top);
        if p.is_file() {
            map.insert(top.to_string(), sha256_file(&p)?);
        }
    }
    for dir in [TRACES, PLOTS] {
        let d = out.join(dir);
        if !d.is_dir() {
            continue;
        }
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_file() {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                if name.ends_with(".csv") || name.ends_with(".svg") {
                    map.insert(format!("{dir}/{name}"), sha256_file(&p)?);
                }
            }
        }
    }
    Ok(map)
}

fn write_manifest(
    out: &Path,
    config: ManifestConfig,
    started: Instant,
    points: usize,
    failed: usize,
) -> Result<Manifest> {
    let outputs = collect_outputs(out)?;
    let listing: String = outputs.iter().map(|(k, v)| format!("{k} {v}\n")).collect();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(&config)?,
        config,
        determinism_hash: sha256_hex(listing.as_bytes()),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        outputs,
        points,
        failed,
    };
    write_atomic(
        out.join(MANIFEST),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Summary {
    model: String,
    #[serde(rename = "F")]
    f: f64,
    #[serde(rename = "F1")]
    f1: f64,
    t_end: f64,
    samples: usize,
    diagnostics: Diagnostics,
}

/// Run one configuration and write `traces/run.csv`, `summary.json`,
/// `plots/run.svg` and the manifest.
pub fn run_single(cfg: &RunConfig, out: impl AsRef<Path>) -> Result<(RunResult, Manifest)> {
    let out = out.as_ref();
    let started = Instant::now();
    std::fs::create_dir_all(out.join(TRACES))?;
    std::fs::create_dir_all(out.join(PLOTS))?;
    let ckpt = out.join(CHECKPOINTS).join("run.ckpt");
    if matches!(cfg, RunConfig::Continuum { checkpoint_every, .. } if *checkpoint_every > 0) {
        std::fs::create_dir_all(out.join(CHECKPOINTS))?;
    }
    let result = execute(cfg, Some(&ckpt))?;
    write_atomic(out.join(TRACES).join("run.csv"), trace_csv(&result)?)?;
    let summary = Summary {
        model: cfg.model().to_string(),
        f: result.final_fidelity(),
        f1: result.final_f1(),
        t_end: result.times.last().copied().unwrap_or(f64::NAN),
        samples: result.len(),
        diagnostics: result.diagnostics.clone(),
    };
    write_atomic(
        out.join(SUMMARY),
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    emit_plots(out)?;
    let manifest = write_manifest(
        out,
        ManifestConfig::Single {
            config: cfg.clone(),
        },
        started,
        1,
        0,
    )?;
    Ok((result, manifest))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub out: PathBuf,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    /// Continue from the journal in `out` instead of starting over.
    pub resume: bool,
    /// Stop after this many newly computed points, leaving the sweep
    /// incomplete as if it had been cancelled.
    pub limit: Option<usize>,
}

impl SweepOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        SweepOptions {
            out: out.into(),
            jobs: 0,
            resume: false,
            limit: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JournalHeader {
    config_hash: String,
}

fn trace_name(index: usize) -> String {
    format!("point_{index:04}.csv")
}

fn read_journal(path: &Path, hash: &str) -> Result<BTreeMap<usize, PointRecord>> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header: JournalHeader = match lines.next() {
        Some(l) => serde_json::from_str(&l?)
            .map_err(|_| Error::Checkpoint("journal header unreadable".into()))?,
        None => return Ok(BTreeMap::new()),
    };
    if header.config_hash != hash {
        return Err(Error::Checkpoint(
            "journal belongs to a different configuration".into(),
        ));
    }
    let mut done = BTreeMap::new();
    for line in lines {
        // a torn final line from an interrupted write is ignored
        if let Ok(rec) = serde_json::from_str::<PointRecord>(&line?) {
            done.insert(rec.index, rec);
        }
    }
    Ok(done)
}

fn run_point(sweep: &SweepConfig, index: usize, ckpt_dir: &Path) -> (PointRecord, Option<String>) {
    let coords = sweep.coords(index);
    let failed = |coords: Vec<f64>, e: String| PointRecord {
        index,
        coords,
        status: PointStatus::Failed,
        f: None,
        f1: None,
        diagnostics: None,
        error: Some(e),
    };
    let cfg = match sweep.point(index) {
        Ok(c) => c,
        Err(e) => return (failed(coords, e.to_string()), None),
    };
    let ckpt = ckpt_dir.join(format!("point_{index:04}.ckpt"));
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        execute(&cfg, Some(&ckpt)).and_then(|r| trace_csv(&r).map(|csv| (r, csv)))
    }));
    match outcome {
        Ok(Ok((r, csv))) => (
            PointRecord {
                index,
                coords,
                status: PointStatus::Ok,
                f: Some(r.final_fidelity()),
                f1: Some(r.final_f1()),
                diagnostics: Some(r.diagnostics),
                error: None,
            },
            Some(csv),
        ),
        Ok(Err(e)) => (failed(coords, e.to_string()), None),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (failed(coords, format!("panic: {msg}")), None)
        }
    }
}

/// Result of [`run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Completed points in index order.
    pub records: Vec<PointRecord>,
    /// `None` while the sweep is incomplete.
    pub manifest: Option<Manifest>,
}

impl SweepOutcome {
    pub fn is_complete(&self) -> bool {
        self.manifest.is_some()
    }
}

/// Run every point of `sweep` in parallel. Point failures are recorded and
/// do not stop the sweep.
pub fn run_sweep(sweep: &SweepConfig, opts: &SweepOptions) -> Result<SweepOutcome> {
    sweep.validate()?;
    let out = &opts.out;
    let started = Instant::now();
    for d in [TRACES, PLOTS, CHECKPOINTS] {
        std::fs::create_dir_all(out.join(d))?;
    }
    let mcfg = ManifestConfig::Sweep {
        config: sweep.clone(),
    };
    let hash = config_hash(&mcfg)?;
    let journal_path = out.join(JOURNAL);
    let mut done = if opts.resume && journal_path.exists() {
        read_journal(&journal_path, &hash)?
    } else {
        BTreeMap::new()
    };
    // drop journal entries whose trace went missing
    done.retain(|&i, r| {
        r.status == PointStatus::Failed || out.join(TRACES).join(trace_name(i)).exists()
    });
    {
        let mut j = std::fs::File::create(&journal_path)?;
        writeln!(
            j,
            "{}",
            serde_json::to_string(&JournalHeader {
                config_hash: hash.clone()
            })?
        )?;
        for r in done.values() {
            writeln!(j, "{}", serde_json::to_string(r)?)?;
        }
        j.sync_all()?;
    }
    let mut pending: Vec<usize> = (0..sweep.len()).filter(|i| !done.contains_key(i)).collect();
    if let Some(limit) = opts.limit {
        pending.truncate(limit);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    let ckpt_dir = out.join(CHECKPOINTS);
    let (tx, rx) = mpsc::channel::<(PointRecord, Option<String>)>();
    let mut journal = std::fs::OpenOptions::new()
        .append(true)
        .open(&journal_path)?;
    let written: Result<()> = std::thread::scope(|s| {
        s.spawn(|| {
            pool.install(|| {
                pending.par_iter().for_each_with(tx, |tx, &i| {
                    let _ = tx.send(run_point(sweep, i, &ckpt_dir));
                });
            });
        });
        // single writer: traces first, then the journal line that vouches for them
        for (rec, csv) in rx {
            if let Some(csv) = csv {
                write_atomic(out.join(TRACES).join(trace_name(rec.index)), csv)?;
            }
            writeln!(journal, "{}", serde_json::to_string(&rec)?)?;
            journal.flush()?;
            done.insert(rec.index, rec);
        }
        Ok(())
    });
    written?;

    let records: Vec<PointRecord> = done.into_values().collect();
    if records.len() < sweep.len() {
        return Ok(SweepOutcome {
            records,
            manifest: None,
        });
    }
    let labels: Vec<&str> = sweep.axes.iter().map(|a| a.label()).collect();
    write_atomic(out.join(GRID), grid_csv(&labels, &records)?)?;
    emit_plots(out)?;
    let failed = records
        .iter()
        .filter(|r| r.status == PointStatus::Failed)
        .count();
    let manifest = write_manifest(out, mcfg, started, records.len(), failed)?;
    Ok(SweepOutcome {
        records,
        manifest: Some(manifest),
    })
}

/// (Re)generate `plots/*.svg` from the CSV files in `out`.
///
/// Sweeps get a heatmap (two axes) or a line plot (one axis) of the final
/// fidelity, plus per-point time series for small sweeps; single runs get
/// their time series.
pub fn emit_plots(out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out.as_ref();
    let plots = out.join(PLOTS);
    std::fs::create_dir_all(&plots)?;
    let mut written = Vec::new();
    let mut save = |name: String, svg: String| -> Result<()> {
        let p = plots.join(name);
        write_atomic(&p, svg)?;
        written.push(p);
        Ok(())
    };
    let grid = out.join(GRID);
    if !grid.exists() {
        let trace = out.join(TRACES).join("run.csv");
        if !trace.exists() {
            return Err(Error::Empty("no grid.csv or traces/run.csv to plot"));
        }
        save(
            "run.svg".into(),
            plot::trace_plot(&read_trace_csv(&trace)?, "F1 and F2 vs t")?,
        )?;
        return Ok(written);
    }
    let (labels, records) = read_grid_csv(&grid)?;
    if records.is_empty() {
        return Err(Error::Empty("grid.csv has no rows"));
    }
    match labels.len() {
        1 => {
            let xs: Vec<f64> = records.iter().map(|r| r.coords[0]).collect();
            let svg = plot::line_plot(
                &xs,
                &[
                    ("F", records.iter().map(|r| r.f).collect()),
                    ("F1", records.iter().map(|r| r.f1).collect()),
                ],
                &labels[0],
                "final population",
                &format!("F vs {}", labels[0]),
            )?;
            save("line.svg".into(), svg)?;
        }
        2 => {
            let mut xs: Vec<f64> = records.iter().map(|r| r.coords[0]).collect();
            let mut ys: Vec<f64> = records.iter().map(|r| r.coords[1]).collect();
            for v in [&mut xs, &mut ys] {
                v.sort_by(f64::total_cmp);
                v.dedup();
            }
            let mut values = vec![vec![None; xs.len()]; ys.len()];
            for r in &records {
                let ix = xs.iter().position(|&x| x == r.coords[0]).unwrap();
                let iy = ys.iter().position(|&y| y == r.coords[1]).unwrap();
                values[iy][ix] = r.f;
            }
            let svg = plot::heatmap(
                &xs,
                &ys,
                &values,
                &labels[0],
                &labels[1],
                &format!("F over {} and {}", labels[0], labels[1]),
            )?;
            save("heatmap.svg".into(), svg)?;
        }
        _ => {}
    }
    if records.len() <= MAX_TRACE_PLOTS {
        for r in records.iter().filter(|r| r.status == PointStatus::Ok) {
            let trace = out.join(TRACES).join(trace_name(r.index));
            let coords: Vec<String> = labels
                .iter()
                .zip(&r.coords)
                .map(|(l, x)| format!("{l} = {}", super::output::fmt_sig(*x)))
                .collect();
            let svg = plot::trace_plot(&read_trace_csv(&trace)?, &coords.join(", "))?;
            save(format!("trace_{:04}.svg", r.index), svg)?;
        }
    }
    Ok(written)
}

/// Outcome of re-running a manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    /// Outputs whose hash differs from the manifest, or that are missing.
    pub mismatches: Vec<String>,
    pub checked: usize,
}

impl ReplayReport {
    pub fn is_identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-run the configuration stored in `manifest` into `out` and compare every
/// output byte for byte (via SHA-256).
pub fn replay(manifest: &Manifest, out: impl AsRef<Path>, jobs: usize) -> Result<ReplayReport> {
    let out = out.as_ref();
    let fresh = match &manifest.config {
        ManifestConfig::Single { config } => run_single(config, out)?.1,
        ManifestConfig::Sweep { config } => {
            let opts = SweepOptions {
                jobs,
                ..SweepOptions::new(out)
            };
            run_sweep(config, &opts)?
                .manifest
                .ok_or(Error::Empty("replayed sweep did not complete"))?
        }
    };
    let mut mismatches = Vec::new();
    for (path, hash) in &manifest.outputs {
        if fresh.outputs.get(path) != Some(hash) {
            mismatches.push(path.clone());
        }
    }
    for path in fresh.outputs.keys() {
        if !manifest.outputs.contains_key(path) {
            mismatches.push(path.clone());
        }
    }
    Ok(ReplayReport {
        mismatches,
        checked: manifest.outputs.len(),
    })
}
