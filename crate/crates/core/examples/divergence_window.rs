//! Scans α² across 2/M for β = 0, with the lid data and with a random forcing.
//!
//! The lid-driven solution has no component along the Schur modes with
//! eigenvalue 1, so for α² slightly above 2/M the lid run still converges
//! before roundoff feeds the unstable modes. A random forcing excites them.

use uzawa_cavity::iterate::{run, IterationConfig};
use uzawa_cavity::numcore::SplitMix64;
use uzawa_cavity::stokes::{build_mac_stokes, LidProfile};
use uzawa_cavity::Extreme;

fn main() -> uzawa_cavity::Result<()> {
    let sys = build_mac_stokes(20, LidProfile::Regularized)?;
    let lid = sys.problem();
    let big_m = lid.estimate_extreme_eigen(Extreme::Max, 1e-8, 5000, 1)?.value;
    let noisy = lid.clone().with_rhs(SplitMix64::new(3).fill_signed(lid.n_u()))?;
    println!("M_est = {big_m:.6}, 2/M = {:.4}", 2.0 / big_m);
    for scale in [1.6, 1.8, 1.95, 2.05, 2.2, 2.5] {
        let alpha2 = scale / big_m;
        let a = run(lid, &IterationConfig::new(alpha2, 0.0), None)?;
        let b = run(&noisy, &IterationConfig::new(alpha2, 0.0), None)?;
        println!(
            "alpha2 = {scale:.2}/M  lid: {:?} ({})  random: {:?} ({})",
            a.outcome, a.iterations, b.outcome, b.iterations
        );
    }
    Ok(())
}
