//! Power-iteration estimates of m and M against the dense eigenvalues.

use uzawa_cavity::oracle::schur_spectrum;
use uzawa_cavity::stokes::{build_mac_stokes, LidProfile};
use uzawa_cavity::Extreme;

fn main() -> uzawa_cavity::Result<()> {
    println!("{:>4} {:>12} {:>12} {:>12} {:>12} {:>6}", "n", "m_est", "m_dense", "M_est", "M_dense", "iters");
    for n in [4usize, 6, 8, 12, 16] {
        let sys = build_mac_stokes(n, LidProfile::Regularized)?;
        let prob = sys.problem();
        let lo = prob.estimate_extreme_eigen(Extreme::Min, 1e-8, 20_000, 1)?;
        let hi = prob.estimate_extreme_eigen(Extreme::Max, 1e-8, 20_000, 1)?;
        let dense = if n <= 12 { Some(schur_spectrum(prob)?) } else { None };
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.8}"));
        println!(
            "{n:>4} {:>12.8} {:>12} {:>12.8} {:>12} {:>6}",
            lo.value,
            show(dense.as_ref().map(|s| s[0])),
            hi.value,
            show(dense.as_ref().map(|s| s[s.len() - 1])),
            lo.iterations
        );
    }
    Ok(())
}
