//! The thermal spin is diagonal, so the density-matrix run must equal the
//! weighted average of the two pure-state runs.
//!
//! cargo run --release --example mixture_check

use thermal_stirap::discrete::{evolve, mixture_oracle, DiscreteModelParams, IntegratorConfig};

fn main() -> thermal_stirap::Result<()> {
    let cfg = IntegratorConfig {
        stride: 50,
        ..Default::default()
    };
    for t in [0.3, 1.0, 5.0] {
        let params = DiscreteModelParams {
            temperature: t,
            ..Default::default()
        };
        let rho = evolve(&params, &cfg)?;
        let mix = mixture_oracle(&params, &cfg)?;
        let worst = rho
            .f2
            .iter()
            .zip(&mix.f2)
            .chain(rho.f1.iter().zip(&mix.f1))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("T = {t:<4} max |density matrix - mixture| = {worst:.2e}");
    }
    Ok(())
}
