//! One Richardson sweep in place of the exact velocity solve.

use uzawa_cavity::iterate::{richardson_default_omega, run, IterationConfig, Step1};
use uzawa_cavity::oracle::direct_solve;
use uzawa_cavity::stokes::{build_mac_stokes, LidProfile};

fn main() -> uzawa_cavity::Result<()> {
    let sys = build_mac_stokes(4, LidProfile::Regularized)?;
    let prob = sys.problem();
    let omega = richardson_default_omega(prob)?;
    let (u_star, _) = direct_solve(prob)?;
    println!("default omega = {omega:.5}");
    for alpha2 in [0.01, 0.1, 0.3] {
        let mut cfg = IterationConfig::new(alpha2, 0.05);
        cfg.step1 = Step1::Richardson { omega: None };
        cfg.tol = 1e-10;
        cfg.max_outer = 50_000;
        let hist = run(prob, &cfg, None)?;
        let err = hist.u.iter().zip(&u_star).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("alpha2={alpha2:<5} {:?} after {} iterations, max|u - u*| = {err:.2e}", hist.outcome, hist.iterations);
    }
    Ok(())
}
