//! Plain Uzawa (β = 0) next to the β-stabilized update on one cavity.
//!
//! cargo run --release --example uzawa_vs_stabilized -- 20

use uzawa_cavity::iterate::{run, IterationConfig};
use uzawa_cavity::stokes::{build_mac_stokes, LidProfile};

fn main() -> uzawa_cavity::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let sys = build_mac_stokes(n, LidProfile::Regularized)?;
    println!("{n}x{n} cavity, alpha2 = 1.5");
    for beta in [0.0, 0.05, 0.1, 0.2, 0.5] {
        let hist = run(sys.problem(), &IterationConfig::new(1.5, beta), None)?;
        println!(
            "beta={beta:<5} {:>14} after {:>3} iterations, |div u| = {:.3e}",
            format!("{:?}", hist.outcome),
            hist.iterations,
            hist.final_div_norm().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
