use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thermal_stirap::error::{Error, Result};
use thermal_stirap::sweep::{
    emit_plots, replay, run_single, run_sweep, Manifest, ManifestConfig, Model, Preset, RunConfig,
    SweepFile, SweepOptions,
};

#[derive(Parser)]
#[command(name = "stirap", version, about = "Thermal STIRAP simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Five-site density-matrix model (one run, or a fig2 preset sweep)
    Discrete(Common),
    /// Chain-mapped MPS model (one run, or the fig3 preset sweep)
    Continuum(Common),
    /// Parameter sweep from a sweep file or a preset
    Sweep(Common),
    /// Regenerate plots from the CSV files in --out
    Plot(Common),
    /// Check a config file, or replay the manifest in --out and compare hashes
    Validate(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(
        ["fig2a", "fig2b", "fig2c", "fig2d", "fig3"]))]
    preset: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Continue an interrupted sweep in --out
    #[arg(long)]
    resume: bool,
    /// Reduced continuum resolution
    #[arg(long)]
    ci_scale: bool,
}

impl Common {
    fn preset(&self) -> Result<Option<Preset>> {
        self.preset.as_deref().map(str::parse).transpose()
    }

    fn sweep_file(&self) -> Result<SweepFile> {
        match &self.config {
            Some(p) => SweepFile::from_path(p),
            None => Ok(SweepFile::default()),
        }
    }

    fn out(&self, file: Option<&str>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| file.map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn sweep(args: &Common, file: SweepFile, preset: Option<Preset>) -> Result<()> {
    let cfg = file.resolve(preset, args.ci_scale)?;
    let opts = SweepOptions {
        out: args.out(file.out.as_deref()),
        jobs: args.jobs.or(file.jobs).unwrap_or(0),
        resume: args.resume || file.resume.unwrap_or(false),
        limit: None,
    };
    eprintln!(
        "sweep {}: {} points into {}",
        cfg.name,
        cfg.len(),
        opts.out.display()
    );
    let outcome = run_sweep(&cfg, &opts)?;
    let m = outcome
        .manifest
        .ok_or(Error::Empty("sweep did not complete"))?;
    println!(
        "{} points, {} failed, {:.1} s, outputs in {}",
        m.points,
        m.failed,
        m.wall_time_seconds,
        opts.out.display()
    );
    Ok(())
}

fn model_run(args: &Common, model: Model) -> Result<()> {
    if let Some(preset) = args.preset()? {
        let expected = if preset == Preset::Fig3 {
            Model::Continuum
        } else {
            Model::Discrete
        };
        if expected != model {
            return Err(Error::invalid(
                "preset",
                format!("{preset} is a {expected} preset"),
            ));
        }
        return sweep(args, args.sweep_file()?, Some(preset));
    }
    let cfg = match &args.config {
        Some(p) => RunConfig::from_path(p, Some(model), args.ci_scale)?,
        None => RunConfig::default_for(model, args.ci_scale),
    };
    if cfg.model() != model {
        return Err(Error::invalid("model", format!("expected {model}")));
    }
    let out = args.out(None);
    let (result, manifest) = run_single(&cfg, &out)?;
    println!(
        "F = {:.6}  F1 = {:.6}  ({} samples, {:.1} s, outputs in {})",
        result.final_fidelity(),
        result.final_f1(),
        result.len(),
        manifest.wall_time_seconds,
        out.display()
    );
    Ok(())
}

fn validate(args: &Common) -> Result<()> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let table: toml::Table = text.parse().map_err(Error::from)?;
        if table.contains_key("axes") || table.contains_key("preset") {
            let cfg = SweepFile::from_toml_str(&text)?.resolve(args.preset()?, args.ci_scale)?;
            println!("ok: sweep {} with {} points", cfg.name, cfg.len());
        } else {
            let cfg = RunConfig::from_table(table, None, args.ci_scale)?;
            println!("ok: {} run\n{}", cfg.model(), cfg.to_toml_string()?);
        }
        return Ok(());
    }
    let out = args
        .out
        .clone()
        .ok_or_else(|| Error::invalid("config", "give --config or --out"))?;
    let manifest = Manifest::read(out.join("manifest.json"))?;
    let scratch = std::env::temp_dir().join(format!("stirap-replay-{}", std::process::id()));
    let report = replay(&manifest, &scratch, args.jobs.unwrap_or(0));
    let _ = std::fs::remove_dir_all(&scratch);
    let report = report?;
    let kind = match manifest.config {
        ManifestConfig::Single { .. } => "run",
        ManifestConfig::Sweep { .. } => "sweep",
    };
    if report.is_identical() {
        println!("ok: {kind} replay matches all {} outputs", report.checked);
        Ok(())
    } else {
        Err(Error::invalid(
            "manifest",
            format!("replay differs in {}", report.mismatches.join(", ")),
        ))
    }
}

fn plot(args: &Common) -> Result<()> {
    let out = args.out(None);
    for p in emit_plots(&out)? {
        println!(
            "{}",
            p.strip_prefix(&out).unwrap_or(Path::new(&p)).display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Discrete(a) => model_run(a, Model::Discrete),
        Command::Continuum(a) => model_run(a, Model::Continuum),
        Command::Sweep(a) => a.preset().and_then(|p| {
            let file = a.sweep_file()?;
            sweep(a, file, p)
        }),
        Command::Plot(a) => plot(a),
        Command::Validate(a) => validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
