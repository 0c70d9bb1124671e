//! Samples (β, α²) under the sufficient condition β + α² < 1/M and tracks the
//! error energy against the direct solution on a 4×4 cavity.

use uzawa_cavity::iterate::{check_sufficient_condition, run, IterationConfig};
use uzawa_cavity::numcore::SplitMix64;
use uzawa_cavity::oracle::{companion_spectral_radius, direct_solve, schur_spectrum};
use uzawa_cavity::stokes::{build_mac_stokes, LidProfile};

fn main() -> uzawa_cavity::Result<()> {
    let sys = build_mac_stokes(4, LidProfile::Regularized)?;
    let prob = sys.problem();
    let spec = schur_spectrum(prob)?;
    let big_m = spec[spec.len() - 1];
    let (_, p_star) = direct_solve(prob)?;
    let mut rng = SplitMix64::new(5);
    let mut shown = 0;
    while shown < 8 {
        let (beta, alpha2) = (rng.next_f64() / big_m, rng.next_f64() / big_m);
        if !check_sufficient_condition(alpha2, beta, big_m) {
            continue;
        }
        shown += 1;
        let rho = companion_spectral_radius(&spec, alpha2, beta)?;
        let mut cfg = IterationConfig::new(alpha2, beta);
        cfg.tol = 1e-10;
        cfg.max_outer = 100_000;
        let hist = run(prob, &cfg, Some(&p_star))?;
        let e: Vec<f64> = hist.records.iter().filter_map(|r| r.energy).collect();
        let worst = e.windows(2).map(|w| (w[1] - w[0]) / e[0]).fold(f64::NEG_INFINITY, f64::max);
        println!(
            "beta={beta:.4} alpha2={alpha2:.4} rho={rho:.5} iterations={:>5} E: {:.3e} -> {:.3e}, max rel step {worst:+.1e}",
            hist.iterations,
            e[0],
            e[e.len() - 1]
        );
    }
    Ok(())
}
