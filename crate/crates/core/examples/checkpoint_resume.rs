//! Stop an MPS run halfway, save a checkpoint, resume it and compare with an
//! uninterrupted run.
//!
//! cargo run --release --example checkpoint_resume

use thermal_stirap::mps::{evolve_tcmps, ContinuumModelParams, EvolveConfig, TcmpsRun};

fn main() -> thermal_stirap::Result<()> {
    let params = ContinuumModelParams::ci_scale(0.2);
    let cfg = EvolveConfig::ci_scale();
    let chain = params.build_chain()?;
    let path = std::env::temp_dir().join("checkpoint_resume_example.ckpt");

    let mut run = TcmpsRun::new(&params, &chain, &cfg)?;
    let half = run.grid().steps / 2;
    run.advance(half)?;
    run.save_checkpoint(&path)?;
    drop(run);

    let resumed = TcmpsRun::resume(&path, &params, &chain, &cfg)?.finish()?;
    let straight = evolve_tcmps(&params, &chain, &cfg)?;
    std::fs::remove_file(&path)?;
    println!(
        "resumed F = {:.12}, uninterrupted F = {:.12}, identical traces: {}",
        resumed.final_fidelity(),
        straight.final_fidelity(),
        resumed == straight
    );
    Ok(())
}
