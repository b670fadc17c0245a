//! Final fidelity of the five-site model at a few temperatures.
//!
//! cargo run --release --example discrete_run

use thermal_stirap::discrete::{evolve, DiscreteModelParams, IntegratorConfig};

fn main() -> thermal_stirap::Result<()> {
    let cfg = IntegratorConfig {
        stride: 100,
        ..Default::default()
    };
    println!("{:>6} {:>10} {:>10} {:>12}", "T", "F", "F1", "trace drift");
    for t in [0.0, 0.5, 2.0, 10.0, 20.0] {
        let params = DiscreteModelParams {
            temperature: t,
            ..Default::default()
        };
        let r = evolve(&params, &cfg)?;
        println!(
            "{t:>6.1} {:>10.6} {:>10.6} {:>12.2e}",
            r.final_fidelity(),
            r.final_f1(),
            r.diagnostics.trace_drift.unwrap_or(0.0)
        );
    }
    Ok(())
}
