//! Iteration counts over meshes and β, printed as a table.

use uzawa_cavity::cli::{sweep, RunConfig};

fn main() -> uzawa_cavity::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.mesh_list = vec![10, 20, 40];
    cfg.beta_list = vec![0.0, 1e-4, 1e-2, 0.1];

    print!("{:>8}", "beta");
    for m in &cfg.mesh_list {
        print!("{:>8}", format!("{m}x{m}"));
    }
    println!();
    let rows = sweep(&cfg).into_iter().collect::<uzawa_cavity::Result<Vec<_>>>()?;
    for &beta in &cfg.beta_list {
        print!("{beta:>8}");
        for &m in &cfg.mesh_list {
            let r = rows.iter().find(|r| r.mesh_n == m && r.beta == beta).unwrap();
            let mark = if r.converged { "" } else { "*" };
            print!("{:>8}", format!("{}{mark}", r.iterations));
        }
        println!();
    }
    Ok(())
}
