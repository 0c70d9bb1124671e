//! Staggered (MAC) finite differences for `−Δu + ∇p = 0` on the unit square,
//! driven by a sliding top lid.
//!
//! Layout for `N` cells per side, `h = 1/N`:
//!
//! ```text
//!   x-velocity  u(i, j) at (i·h, (j+½)·h),   i = 1..N−1, j = 0..N−1
//!   y-velocity  v(i, j) at ((i+½)·h, j·h),   i = 0..N−1, j = 1..N−1
//!   pressure    p(i, j) at ((i+½)·h, (j+½)·h)
//! ```
//!
//! Wall-normal velocities sit on the boundary and are zero, so they are not
//! unknowns. Tangential wall data enters through the ghost value
//! `2g − interior`, which adds one diagonal unit to the 5-point stencil and
//! moves `2g/h²` to the right-hand side.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numcore::{norm_h, SparseMatrix};
use crate::saddle::SaddleProblem;

/// Tangential velocity prescribed on the lid `y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LidProfile {
    /// `g(x) = 4x(1−x)`, vanishing at the corners.
    Regularized,
    /// `g(x) = 1`, discontinuous at the top corners.
    Unit,
}

impl LidProfile {
    pub fn eval(self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("lid abscissa {x} outside [0, 1]")));
        }
        Ok(match self {
            LidProfile::Regularized => 4.0 * x * (1.0 - x),
            LidProfile::Unit => 1.0,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            LidProfile::Regularized => "regularized",
            LidProfile::Unit => "unit",
        }
    }
}

impl fmt::Display for LidProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LidProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regularized" => Ok(LidProfile::Regularized),
            "unit" => Ok(LidProfile::Unit),
            other => Err(Error::invalid(format!("unknown lid profile `{other}` (expected regularized|unit)"))),
        }
    }
}

pub fn lid_profile_eval(profile: LidProfile, x: f64) -> Result<f64> {
    profile.eval(x)
}

/// Assembled cavity problem.
#[derive(Debug, Clone)]
pub struct StokesSystem {
    n_cells: usize,
    lid: LidProfile,
    problem: SaddleProblem,
}

/// Index helpers for the staggered unknowns.
#[derive(Debug, Clone, Copy)]
pub struct MacLayout {
    pub n: usize,
}

impl MacLayout {
    pub fn n_ux(self) -> usize {
        (self.n - 1) * self.n
    }

    pub fn n_uy(self) -> usize {
        self.n * (self.n - 1)
    }

    pub fn n_u(self) -> usize {
        self.n_ux() + self.n_uy()
    }

    pub fn n_p(self) -> usize {
        self.n * self.n
    }

    /// x-velocity on the vertical face `i ∈ 1..N`, row `j ∈ 0..N`.
    pub fn ux(self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i < self.n && j < self.n);
        j * (self.n - 1) + (i - 1)
    }

    /// y-velocity on the horizontal face `j ∈ 1..N`, column `i ∈ 0..N`.
    pub fn uy(self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j >= 1 && j < self.n);
        self.n_ux() + (j - 1) * self.n + i
    }

    pub fn p(self, i: usize, j: usize) -> usize {
        j * self.n + i
    }
}

pub fn build_mac_stokes(n_cells: usize, lid: LidProfile) -> Result<StokesSystem> {
    if n_cells < 3 {
        return Err(Error::invalid(format!("need at least 3 cells per side, got {n_cells}")));
    }
    let n = n_cells;
    let lay = MacLayout { n };
    let h = 1.0 / n as f64;
    let inv_h2 = 1.0 / (h * h);

    let mut a_trip = Vec::with_capacity(5 * lay.n_u());
    let mut f = vec![0.0; lay.n_u()];

    // x-velocity: left/right neighbours at i = 0, N are wall-normal (zero);
    // bottom/top neighbours beyond the walls are ghosts.
    for j in 0..n {
        for i in 1..n {
            let row = lay.ux(i, j);
            let mut diag = 4.0;
            if i > 1 {
                a_trip.push((row, lay.ux(i - 1, j), -inv_h2));
            }
            if i + 1 < n {
                a_trip.push((row, lay.ux(i + 1, j), -inv_h2));
            }
            if j > 0 {
                a_trip.push((row, lay.ux(i, j - 1), -inv_h2));
            } else {
                diag += 1.0;
            }
            if j + 1 < n {
                a_trip.push((row, lay.ux(i, j + 1), -inv_h2));
            } else {
                diag += 1.0;
                f[row] += 2.0 * lid.eval(i as f64 * h)? * inv_h2;
            }
            a_trip.push((row, row, diag * inv_h2));
        }
    }

    // y-velocity: bottom/top neighbours are wall-normal; side walls are ghosts with g = 0.
    for j in 1..n {
        for i in 0..n {
            let row = lay.uy(i, j);
            let mut diag = 4.0;
            if i > 0 {
                a_trip.push((row, lay.uy(i - 1, j), -inv_h2));
            } else {
                diag += 1.0;
            }
            if i + 1 < n {
                a_trip.push((row, lay.uy(i + 1, j), -inv_h2));
            } else {
                diag += 1.0;
            }
            if j > 1 {
                a_trip.push((row, lay.uy(i, j - 1), -inv_h2));
            }
            if j + 1 < n {
                a_trip.push((row, lay.uy(i, j + 1), -inv_h2));
            }
            a_trip.push((row, row, diag * inv_h2));
        }
    }

    // B = −div at cell centres; faces on the walls carry no unknown.
    let inv_h = 1.0 / h;
    let mut b_trip = Vec::with_capacity(4 * lay.n_p());
    for j in 0..n {
        for i in 0..n {
            let row = lay.p(i, j);
            if i + 1 < n {
                b_trip.push((row, lay.ux(i + 1, j), -inv_h));
            }
            if i > 0 {
                b_trip.push((row, lay.ux(i, j), inv_h));
            }
            if j + 1 < n {
                b_trip.push((row, lay.uy(i, j + 1), -inv_h));
            }
            if j > 0 {
                b_trip.push((row, lay.uy(i, j), inv_h));
            }
        }
    }

    let a = SparseMatrix::from_triplets(lay.n_u(), lay.n_u(), &a_trip)?;
    let b = SparseMatrix::from_triplets(lay.n_p(), lay.n_u(), &b_trip)?;
    // Both spaces carry the same h² weight, so the weighted adjoint of B is
    // its plain transpose: the face gradient (p_right − p_left)/h.
    let bt = b.transpose();
    let problem = SaddleProblem::new(a, b, bt, f, h)?;
    Ok(StokesSystem { n_cells, lid, problem })
}

impl StokesSystem {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.problem.h()
    }

    pub fn lid(&self) -> LidProfile {
        self.lid
    }

    pub fn layout(&self) -> MacLayout {
        MacLayout { n: self.n_cells }
    }

    pub fn problem(&self) -> &SaddleProblem {
        &self.problem
    }

    pub fn into_problem(self) -> SaddleProblem {
        self.problem
    }

    pub fn a(&self) -> &SparseMatrix {
        self.problem.a()
    }

    pub fn b(&self) -> &SparseMatrix {
        self.problem.b()
    }

    pub fn bt(&self) -> &SparseMatrix {
        self.problem.bt()
    }

    pub fn f_lifted(&self) -> &[f64] {
        self.problem.f()
    }

    /// `‖B u‖_h`, the discrete L² norm of the divergence.
    pub fn divergence_norm(&self, u: &[f64]) -> Result<f64> {
        let div = self.problem.apply_b(u)?;
        norm_h(&div, self.h())
    }

    /// Velocity sampled from a stream function `ψ` given on the `(N+1)²` cell
    /// corners: `u = ∂ψ/∂y`, `v = −∂ψ/∂x`. With `ψ = 0` on the boundary the
    /// result is discretely divergence free.
    pub fn curl_of_stream(&self, psi: impl Fn(usize, usize) -> f64) -> Vec<f64> {
        let lay = self.layout();
        let n = lay.n;
        let h = self.h();
        let mut u = vec![0.0; lay.n_u()];
        for j in 0..n {
            for i in 1..n {
                u[lay.ux(i, j)] = (psi(i, j + 1) - psi(i, j)) / h;
            }
        }
        for j in 1..n {
            for i in 0..n {
                u[lay.uy(i, j)] = -(psi(i + 1, j) - psi(i, j)) / h;
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{mean, SplitMix64};

    #[test]
    fn lid_values() {
        assert_eq!(lid_profile_eval(LidProfile::Regularized, 0.5).unwrap(), 1.0);
        assert_eq!(lid_profile_eval(LidProfile::Regularized, 0.0).unwrap(), 0.0);
        assert_eq!(lid_profile_eval(LidProfile::Regularized, 1.0).unwrap(), 0.0);
        assert_eq!(lid_profile_eval(LidProfile::Unit, 0.25).unwrap(), 1.0);
        assert!(lid_profile_eval(LidProfile::Unit, 1.5).is_err());
        assert!(lid_profile_eval(LidProfile::Regularized, -0.1).is_err());
        assert_eq!("unit".parse::<LidProfile>().unwrap(), LidProfile::Unit);
        assert!("smooth".parse::<LidProfile>().is_err());
    }

    #[test]
    fn dimensions_n3() {
        let sys = build_mac_stokes(3, LidProfile::Regularized).unwrap();
        assert_eq!(sys.problem().n_u(), 12);
        assert_eq!(sys.problem().n_p(), 9);
        assert!(build_mac_stokes(2, LidProfile::Unit).is_err());
    }

    #[test]
    fn a_is_symmetric() {
        let sys = build_mac_stokes(5, LidProfile::Unit).unwrap();
        let a = sys.a();
        for r in 0..a.rows() {
            for (c, v) in a.row(r) {
                assert_eq!(v, a.get(c, r));
            }
        }
    }

    #[test]
    fn lifted_rhs_only_on_top_row() {
        let sys = build_mac_stokes(4, LidProfile::Regularized).unwrap();
        let lay = sys.layout();
        let f = sys.f_lifted();
        let h = sys.h();
        for j in 0..4 {
            for i in 1..4 {
                let expect = if j == 3 { 2.0 * 4.0 * i as f64 * h * (1.0 - i as f64 * h) / (h * h) } else { 0.0 };
                assert!((f[lay.ux(i, j)] - expect).abs() < 1e-12);
            }
        }
        assert!(f[lay.n_ux()..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn divergence_compatibility() {
        for n in 3..=7 {
            let sys = build_mac_stokes(n, LidProfile::Unit).unwrap();
            let mut rng = SplitMix64::new(n as u64);
            let u = rng.fill_signed(sys.problem().n_u());
            let div = sys.problem().apply_b(&u).unwrap();
            let scale = div.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(mean(&div).abs() <= 1e-13 * scale.max(1.0), "n={n}");
        }
    }

    #[test]
    fn divergence_free_stream_function() {
        let sys = build_mac_stokes(8, LidProfile::Regularized).unwrap();
        let n = 8;
        let h = sys.h();
        let psi = |i: usize, j: usize| {
            if i == 0 || j == 0 || i == n || j == n {
                0.0
            } else {
                let (x, y) = (i as f64 * h, j as f64 * h);
                (std::f64::consts::PI * x).sin().powi(2) * (2.0 * y).sin() * (3.0 + x * y)
            }
        };
        let u = sys.curl_of_stream(psi);
        assert!(u.iter().any(|v| v.abs() > 0.1));
        assert!(sys.divergence_norm(&u).unwrap() <= 1e-13);
        assert_eq!(sys.divergence_norm(&vec![0.0; u.len()]).unwrap(), 0.0);
    }

    #[test]
    fn gradient_annihilates_constants() {
        let sys = build_mac_stokes(6, LidProfile::Unit).unwrap();
        let g = sys.problem().apply_bt(&vec![2.5; 36]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }
}
