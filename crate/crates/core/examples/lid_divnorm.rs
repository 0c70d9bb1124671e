//! Divergence-norm traces for the regularized and unit lids.
//!
//! cargo run --release --example lid_divnorm > divnorm.csv

use uzawa_cavity::cli::{cmd_divnorm, RunConfig};

fn main() {
    let mut cfg = RunConfig::default();
    cfg.mesh_n = 40;
    cfg.beta = 0.05;
    let out = cmd_divnorm(&cfg);
    print!("{}", out.csv.unwrap_or_default());
    eprintln!("{}", out.report);
}
