//! Abstract saddle-point problem `A u + Bᵀ p = f`, `B u = 0` and its pressure
//! Schur complement `S = B A⁻¹ Bᵀ` restricted to zero-mean pressures.

use crate::error::{Error, Result};
use crate::numcore::{cg_solve, dot_unchecked, norm2, project_zero_mean, project_zero_mean_in_place, SparseMatrix, SplitMix64};

/// Settings for the conjugate-gradient solves with `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolve {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for InnerSolve {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SaddleProblem {
    a: SparseMatrix,
    b: SparseMatrix,
    bt: SparseMatrix,
    f: Vec<f64>,
    h: f64,
    inner: InnerSolve,
}

impl SaddleProblem {
    /// `a` is `n_u × n_u`, `b` is `n_p × n_u`, `bt` is `n_u × n_p`, `f` has length `n_u`.
    pub fn new(a: SparseMatrix, b: SparseMatrix, bt: SparseMatrix, f: Vec<f64>, h: f64) -> Result<Self> {
        let n_u = a.rows();
        let n_p = b.rows();
        if a.cols() != n_u {
            return Err(Error::invalid("A must be square"));
        }
        if b.cols() != n_u || bt.rows() != n_u || bt.cols() != n_p {
            return Err(Error::invalid(format!(
                "inconsistent shapes: A {}x{}, B {}x{}, Bt {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                bt.rows(),
                bt.cols()
            )));
        }
        if f.len() != n_u {
            return Err(Error::invalid(format!("f has length {}, expected {n_u}", f.len())));
        }
        if n_u == 0 || n_p == 0 {
            return Err(Error::invalid("empty velocity or pressure space"));
        }
        if !(h > 0.0) {
            return Err(Error::invalid(format!("mesh scale must be positive, got {h}")));
        }
        Ok(Self { a, b, bt, f, h, inner: InnerSolve::default() })
    }

    pub fn with_inner(mut self, inner: InnerSolve) -> Self {
        self.inner = inner;
        self
    }

    pub fn with_rhs(mut self, f: Vec<f64>) -> Result<Self> {
        if f.len() != self.n_u() {
            return Err(Error::invalid("right-hand side length does not match velocity space"));
        }
        self.f = f;
        Ok(self)
    }

    pub fn n_u(&self) -> usize {
        self.a.rows()
    }

    pub fn n_p(&self) -> usize {
        self.b.rows()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn inner(&self) -> InnerSolve {
        self.inner
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn bt(&self) -> &SparseMatrix {
        &self.bt
    }

    pub fn apply_a(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.a.spmv(u)
    }

    pub fn apply_b(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.b.spmv(u)
    }

    pub fn apply_bt(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.bt.spmv(p)
    }

    /// Mesh-weighted inner product `h² Σ xᵢyᵢ` used on both spaces.
    pub fn inner_product(&self, x: &[f64], y: &[f64]) -> f64 {
        self.h * self.h * dot_unchecked(x, y)
    }

    /// Solves `A x = rhs` by CG from a zero start; non-convergence is an error.
    pub fn solve_a(&self, rhs: &[f64], inner: InnerSolve) -> Result<Vec<f64>> {
        if rhs.len() != self.n_u() {
            return Err(Error::invalid("solve_a: right-hand side has wrong length"));
        }
        let zero = vec![0.0; rhs.len()];
        let out = cg_solve(|x, y| self.a.spmv_into(x, y), rhs, &zero, inner.tol, inner.max_iter)?;
        if !out.converged {
            return Err(Error::InnerSolverFailure {
                iterations: out.iterations,
                rel_residual: out.rel_residual,
            });
        }
        Ok(out.x)
    }

    /// `S q = P₀ B A⁻¹ Bᵀ P₀ q`.
    pub fn schur_apply(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.n_p() {
            return Err(Error::invalid(format!(
                "schur_apply: pressure has length {}, expected {}",
                q.len(),
                self.n_p()
            )));
        }
        let q0 = project_zero_mean(q);
        let rhs = self.bt.spmv(&q0)?;
        let x = self.solve_a(&rhs, self.inner)?;
        let mut out = self.b.spmv(&x)?;
        project_zero_mean_in_place(&mut out);
        Ok(out)
    }

    /// `(S q, q) / (q, q)`.
    pub fn rayleigh(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.n_p() {
            return Err(Error::invalid("rayleigh: pressure has wrong length"));
        }
        let q0 = project_zero_mean(q);
        let qq = self.inner_product(&q0, &q0);
        if qq == 0.0 {
            return Err(Error::invalid("rayleigh quotient of a zero (or constant) vector"));
        }
        let sq = self.schur_apply(&q0)?;
        Ok(self.inner_product(&sq, &q0) / qq)
    }

    /// Largest deviation `|(Bu, q) − (u, Bᵀq)| / (‖u‖‖q‖)` over `trials` random pairs.
    pub fn adjoint_defect(&self, trials: usize, seed: u64) -> f64 {
        let mut rng = SplitMix64::new(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let u = rng.fill_signed(self.n_u());
            let q = rng.fill_signed(self.n_p());
            let lhs = self.inner_product(&self.b.spmv(&u).unwrap(), &q);
            let rhs = self.inner_product(&u, &self.bt.spmv(&q).unwrap());
            let scale = self.inner_product(&u, &u).sqrt() * self.inner_product(&q, &q).sqrt();
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        worst
    }

    pub fn estimate_extreme_eigen(
        &self,
        which: Extreme,
        tol: f64,
        max_iter: usize,
        seed: u64,
    ) -> Result<SpectralEstimate> {
        if !(tol > 0.0) {
            return Err(Error::invalid(format!("eigen tolerance must be positive, got {tol}")));
        }
        match which {
            Extreme::Max => self.power_iteration(None, tol, max_iter, seed),
            Extreme::Min => {
                let top = self.power_iteration(None, tol, max_iter, seed)?;
                let shift = 1.01 * top.value;
                let mut low = self.power_iteration(Some(shift), tol, max_iter, seed)?;
                low.iterations += top.iterations;
                low.converged &= top.converged;
                Ok(low)
            }
        }
    }

    /// Power iteration on `S` (or on `shift·I − S`) over zero-mean vectors.
    fn power_iteration(
        &self,
        shift: Option<f64>,
        tol: f64,
        max_iter: usize,
        seed: u64,
    ) -> Result<SpectralEstimate> {
        let which = if shift.is_some() { Extreme::Min } else { Extreme::Max };
        let mut rng = SplitMix64::new(seed);
        let mut q = project_zero_mean(&rng.fill_signed(self.n_p()));
        let n = norm2(&q);
        q.iter_mut().for_each(|v| *v /= n);

        let mut estimate = SpectralEstimate { value: 0.0, which, iterations: 0, residual: f64::INFINITY, converged: false };
        for it in 1..=max_iter {
            let sq = self.schur_apply(&q)?;
            // Rayleigh quotient of S itself, also in the shifted phase. q has unit
            // Euclidean norm and the mesh weights cancel.
            let lambda = dot_unchecked(&sq, &q);
            let residual = sq.iter().zip(&q).map(|(s, x)| (s - lambda * x).powi(2)).sum::<f64>().sqrt();
            let value = lambda;
            estimate = SpectralEstimate { value, which, iterations: it, residual, converged: false };
            if residual <= tol * value.abs() {
                estimate.converged = value > 0.0;
                break;
            }

            let mut next: Vec<f64> = match shift {
                Some(s) => q.iter().zip(&sq).map(|(x, y)| s * x - y).collect(),
                None => sq,
            };
            project_zero_mean_in_place(&mut next);
            let nn = norm2(&next);
            if nn == 0.0 {
                break;
            }
            next.iter_mut().for_each(|v| *v /= nn);
            q = next;
        }
        Ok(estimate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Max,
    Min,
}

/// Estimated extreme Rayleigh quotient of the Schur complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub which: Extreme,
    pub iterations: usize,
    /// `‖S q − value·q‖ / ‖q‖` at termination.
    pub residual: f64,
    pub converged: bool,
}
