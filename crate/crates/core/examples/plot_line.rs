//! Compute F against g at two temperatures and draw a line plot SVG.
//!
//! cargo run --release --example plot_line -- [out.svg]

use thermal_stirap::discrete::{evolve, DiscreteModelParams, IntegratorConfig};
use thermal_stirap::plot::line_plot;

fn main() -> thermal_stirap::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "f_vs_g.svg".into());
    let cfg = IntegratorConfig {
        stride: 1000,
        ..Default::default()
    };
    let gs: Vec<f64> = (1..=8).map(|k| k as f64).collect();
    let mut series = Vec::new();
    for t in [0.0, 10.0] {
        let f = gs
            .iter()
            .map(|&g| {
                let p = DiscreteModelParams {
                    g,
                    temperature: t,
                    ..Default::default()
                };
                evolve(&p, &cfg).ok().map(|r| r.final_fidelity())
            })
            .collect::<Vec<_>>();
        series.push((if t == 0.0 { "T = 0" } else { "T = 10" }, f));
    }
    std::fs::write(
        &out,
        line_plot(&gs, &series, "g", "F", "final fidelity vs coupling")?,
    )?;
    println!("wrote {out}");
    Ok(())
}
