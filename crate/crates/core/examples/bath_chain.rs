//! Discretize the sqrt spectral density, thermofield-double it and map each
//! family onto a chain. Writes the chain coefficients as JSON.
//!
//! cargo run --release --example bath_chain -- [temperature] [out.json]

use thermal_stirap::bath::{chain_map, discretize, thermofield, SpectralDensity};

fn main() -> thermal_stirap::Result<()> {
    let mut args = std::env::args().skip(1);
    let temperature: f64 = args.next().map_or(0.5, |s| s.parse().expect("temperature"));
    let out = args.next();

    let spectral = SpectralDensity::sqrt(2.0);
    let star = discretize(&spectral, 0.05)?;
    let doubled = thermofield(&star, temperature)?;
    let chains = chain_map(&doubled, 12)?;
    println!(
        "{} star modes, sum g^2 = {:.6} (integral {:.6})",
        star.len(),
        star.total_weight(),
        spectral.integral()
    );
    for family in 1..=2 {
        let c = chains.chain(family);
        println!("family {}: head coupling {:.6}", family, c.head_coupling());
        for (j, (a, b)) in c.alpha.iter().zip(c.hoppings()).enumerate() {
            println!("  site {j:>2}  alpha {a:>10.6}  beta {b:>10.6}");
        }
    }
    if let Some(path) = out {
        chains.write_json(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}
