//! Chain-mapped MPS evolution at reduced resolution, checked at T = 0
//! against the exact single-excitation solution.
//!
//! cargo run --release --example continuum_mps -- [temperature]

use thermal_stirap::mps::{evolve_tcmps, single_excitation, ContinuumModelParams, EvolveConfig};

fn main() -> thermal_stirap::Result<()> {
    let temperature: f64 = std::env::args()
        .nth(1)
        .map_or(0.0, |s| s.parse().expect("temperature"));
    let params = ContinuumModelParams::ci_scale(temperature);
    let cfg = EvolveConfig::ci_scale();
    let chain = params.build_chain()?;
    let r = evolve_tcmps(&params, &chain, &cfg)?;
    let d = &r.diagnostics;
    println!(
        "T = {temperature}: F = {:.6}, F1 = {:.6}, max bond {}, max step discarded {:.2e}",
        r.final_fidelity(),
        r.final_f1(),
        d.max_bond_dim.unwrap_or(0),
        d.max_step_discarded_weight.unwrap_or(0.0)
    );
    if temperature == 0.0 {
        let exact = single_excitation(&params, cfg.dt / 10.0, cfg.t_max, 10)?;
        println!(
            "single-excitation reference: F = {:.6}",
            exact.final_fidelity()
        );
    }
    Ok(())
}
