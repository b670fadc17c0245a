//! A coarse temperature by pulse-amplitude sweep written to disk, with
//! grid.csv, traces, a heatmap and a manifest.
//!
//! cargo run --release --example sweep_fig2b -- [out_dir]

use thermal_stirap::sweep::{run_sweep, Preset, SweepOptions};

fn main() -> thermal_stirap::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("sweep_fig2b")
            .display()
            .to_string()
    });
    let sweep = Preset::Fig2b.sweep(4, false);
    let outcome = run_sweep(&sweep, &SweepOptions::new(&out))?;
    for r in &outcome.records {
        println!(
            "T = {:>6.2}  Omega = {:>5.2}  F = {:.4}",
            r.coords[0],
            r.coords[1],
            r.f.unwrap_or(f64::NAN)
        );
    }
    if let Some(m) = outcome.manifest {
        println!(
            "{} outputs in {out}, hash {}",
            m.outputs.len(),
            m.determinism_hash
        );
    }
    Ok(())
}
