//! Two-parameter Uzawa pressure iteration
//!
//! ```text
//! step 1:  A u⁽ⁿ⁺¹⁾ = f − Bᵀ p⁽ⁿ⁾
//! step 2:  p⁽ⁿ⁺¹⁾ = p⁽ⁿ⁾ + β B(u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾) + α² B u⁽ⁿ⁺¹⁾
//! ```
//!
//! with `B = −div`. For `β = 0` this is the classical Uzawa iteration.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numcore::{axpy, dot_unchecked, norm2, norm_h, project_zero_mean_in_place, sub, SplitMix64};
use crate::saddle::{InnerSolve, SaddleProblem};

/// Increment norm above which a run is declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// How the velocity update is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step1 {
    /// Solve `A u = f − Bᵀp` with inner CG.
    Exact,
    /// One Richardson sweep `u + ω(f − A u − Bᵀp)`; `None` picks `ω = 1/λ_max(A)`.
    Richardson { omega: Option<f64> },
}

impl Step1 {
    pub fn name(&self) -> &'static str {
        match self {
            Step1::Exact => "exact",
            Step1::Richardson { .. } => "richardson",
        }
    }
}

impl fmt::Display for Step1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Step1 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Step1::Exact),
            "richardson" => Ok(Step1::Richardson { omega: None }),
            other => Err(Error::invalid(format!("unknown step1 variant `{other}` (expected exact|richardson)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    pub alpha2: f64,
    pub beta: f64,
    pub tol: f64,
    pub max_outer: usize,
    pub step1: Step1,
    pub inner: InnerSolve,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            alpha2: 1.5,
            beta: 0.0,
            tol: 1e-6,
            max_outer: 500,
            step1: Step1::Exact,
            inner: InnerSolve::default(),
        }
    }
}

impl IterationConfig {
    pub fn new(alpha2: f64, beta: f64) -> Self {
        Self { alpha2, beta, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha2 > 0.0) || !self.alpha2.is_finite() {
            return Err(Error::invalid(format!("alpha2 must be positive, got {}", self.alpha2)));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid(format!("beta must be non-negative, got {}", self.beta)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.inner.tol > 0.0) || self.inner.max_iter == 0 {
            return Err(Error::invalid("inner solver needs a positive tolerance and iteration cap"));
        }
        if let Step1::Richardson { omega: Some(w) } = self.step1 {
            if !(w > 0.0) {
                return Err(Error::invalid(format!("richardson omega must be positive, got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// `‖u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾‖_h`
    pub u_increment: f64,
    /// `‖p⁽ⁿ⁺¹⁾ − p⁽ⁿ⁾‖_h`
    pub p_increment: f64,
    /// `‖B u⁽ⁿ⁺¹⁾‖_h`
    pub div_norm: f64,
    /// `‖B(u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾)‖_h`
    pub div_increment: f64,
    /// Energy `E` of the pressure error after this step, when tracked.
    pub energy: Option<f64>,
}

impl IterationRecord {
    pub fn max_increment(&self) -> f64 {
        self.u_increment.max(self.p_increment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationHistory {
    pub iterations: usize,
    pub outcome: Outcome,
    pub records: Vec<IterationRecord>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

impl IterationHistory {
    pub fn converged(&self) -> bool {
        self.outcome == Outcome::Converged
    }

    pub fn diverged(&self) -> bool {
        self.outcome == Outcome::Diverged
    }

    pub fn final_div_norm(&self) -> Option<f64> {
        self.records.last().map(|r| r.div_norm)
    }
}

/// `u⁽ⁿ⁺¹⁾ = A⁻¹(f − Bᵀ pₙ)`.
pub fn step1_exact(prob: &SaddleProblem, p_n: &[f64], inner: InnerSolve) -> Result<Vec<f64>> {
    let mut rhs = prob.apply_bt(p_n)?;
    for (r, f) in rhs.iter_mut().zip(prob.f()) {
        *r = f - *r;
    }
    prob.solve_a(&rhs, inner)
}

/// `u⁽ⁿ⁺¹⁾ = uₙ + ω (f − A uₙ − Bᵀ pₙ)`.
pub fn step1_richardson(prob: &SaddleProblem, u_n: &[f64], p_n: &[f64], omega: f64) -> Result<Vec<f64>> {
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("richardson omega must be positive, got {omega}")));
    }
    let au = prob.apply_a(u_n)?;
    let btp = prob.apply_bt(p_n)?;
    let mut out = u_n.to_vec();
    for (k, o) in out.iter_mut().enumerate() {
        let r = prob.f()[k] - au[k] - btp[k];
        *o += omega * r;
    }
    Ok(out)
}

/// `P₀(pₙ + β B(u⁽ⁿ⁺¹⁾ − uₙ) + α² B u⁽ⁿ⁺¹⁾)`.
pub fn step2_pressure_update(
    prob: &SaddleProblem,
    p_n: &[f64],
    u_np1: &[f64],
    u_n: &[f64],
    alpha2: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if p_n.len() != prob.n_p() || u_np1.len() != prob.n_u() || u_n.len() != prob.n_u() {
        return Err(Error::invalid("step2: dimension mismatch"));
    }
    let bu = prob.apply_b(u_np1)?;
    let mut p = p_n.to_vec();
    if beta != 0.0 {
        let bdu = prob.apply_b(&sub(u_np1, u_n))?;
        axpy(beta, &bdu, &mut p);
    }
    axpy(alpha2, &bu, &mut p);
    project_zero_mean_in_place(&mut p);
    Ok(p)
}

/// Sufficient condition for convergence: `β ≥ 0` and `β + α² < 1/M`.
pub fn check_sufficient_condition(alpha2: f64, beta: f64, m_max: f64) -> bool {
    m_max > 0.0 && beta >= 0.0 && beta + alpha2 < 1.0 / m_max
}

fn norm_a_sq<S>(schur: &mut S, q: &[f64], h: f64) -> Result<f64>
where
    S: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let sq = schur(q)?;
    Ok(h * h * dot_unchecked(&sq, q))
}

/// Error energy
///
/// ```text
/// E = |eₙ|² + β|eₙ₋₁|²_S + α²|eₙ|²_S + (|eₙ − eₙ₋₁|² − (β+α²)|eₙ − eₙ₋₁|²_S)
/// ```
///
/// with `|q|²_S = (S q, q)` and mesh-weighted inner products.
pub fn energy_functional<S>(
    e_n: &[f64],
    e_nm1: &[f64],
    mut schur: S,
    h: f64,
    alpha2: f64,
    beta: f64,
) -> Result<f64>
where
    S: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if e_n.len() != e_nm1.len() {
        return Err(Error::invalid("energy: error vectors differ in length"));
    }
    let w = h * h;
    let d = sub(e_n, e_nm1);
    let mut e = w * dot_unchecked(e_n, e_n) + w * dot_unchecked(&d, &d);
    if beta != 0.0 {
        e += beta * norm_a_sq(&mut schur, e_nm1, h)?;
    }
    e += alpha2 * norm_a_sq(&mut schur, e_n, h)?;
    e -= (beta + alpha2) * norm_a_sq(&mut schur, &d, h)?;
    Ok(e)
}

/// Per-step dissipation
///
/// ```text
/// P = (|eₙ − eₙ₋₁|² − (β+α²)|eₙ − eₙ₋₁|²_S) + 2α²|eₙ|²_S + β|eₙ₊₁ − eₙ₋₁|²_S
/// ```
///
/// satisfying `E⁽ⁿ⁺¹⁾ − E⁽ⁿ⁾ + P⁽ⁿ⁾ = 0` along exact iterates.
pub fn dissipation<S>(
    e_np1: &[f64],
    e_n: &[f64],
    e_nm1: &[f64],
    mut schur: S,
    h: f64,
    alpha2: f64,
    beta: f64,
) -> Result<f64>
where
    S: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let w = h * h;
    let d = sub(e_n, e_nm1);
    let mut p = w * dot_unchecked(&d, &d) - (beta + alpha2) * norm_a_sq(&mut schur, &d, h)?;
    p += 2.0 * alpha2 * norm_a_sq(&mut schur, e_n, h)?;
    if beta != 0.0 {
        p += beta * norm_a_sq(&mut schur, &sub(e_np1, e_nm1), h)?;
    }
    Ok(p)
}

/// `1/λ_max(A)` from 50 power steps on `A`.
pub fn richardson_default_omega(prob: &SaddleProblem) -> Result<f64> {
    let mut rng = SplitMix64::new(0x5EED);
    let mut x = rng.fill_signed(prob.n_u());
    let mut lambda = 0.0;
    for _ in 0..50 {
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let ax = prob.apply_a(&x)?;
        lambda = dot_unchecked(&ax, &x);
        x = ax;
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("A has no positive dominant eigenvalue"));
    }
    Ok(1.0 / lambda)
}

/// Runs the iteration from `u⁰ = 0`, `p⁰ = 0`.
///
/// When `exact_p` is given, the error energy is recorded every step.
pub fn run(prob: &SaddleProblem, cfg: &IterationConfig, exact_p: Option<&[f64]>) -> Result<IterationHistory> {
    run_observed(prob, cfg, exact_p, |_, _, _| {})
}

/// Like [`run`], calling `observe(n, uⁿ, pⁿ)` after every completed step.
pub fn run_observed<F>(
    prob: &SaddleProblem,
    cfg: &IterationConfig,
    exact_p: Option<&[f64]>,
    mut observe: F,
) -> Result<IterationHistory>
where
    F: FnMut(usize, &[f64], &[f64]),
{
    cfg.validate()?;
    if let Some(ep) = exact_p {
        if ep.len() != prob.n_p() {
            return Err(Error::invalid("exact pressure has wrong length"));
        }
    }
    let omega = match cfg.step1 {
        Step1::Richardson { omega: Some(w) } => w,
        Step1::Richardson { omega: None } => richardson_default_omega(prob)?,
        Step1::Exact => 0.0,
    };
    let h = prob.h();

    let mut hist = IterationHistory {
        iterations: 0,
        outcome: Outcome::MaxIterations,
        records: Vec::new(),
        u: vec![0.0; prob.n_u()],
        p: vec![0.0; prob.n_p()],
    };

    for n in 0..cfg.max_outer {
        let u_next = match cfg.step1 {
            Step1::Exact => step1_exact(prob, &hist.p, cfg.inner),
            Step1::Richardson { .. } => step1_richardson(prob, &hist.u, &hist.p, omega),
        };
        let u_next = match u_next {
            Ok(u) => u,
            Err(e) => return Err(abort(hist, e)),
        };
        let p_next = step2_pressure_update(prob, &hist.p, &u_next, &hist.u, cfg.alpha2, cfg.beta)?;

        let du = sub(&u_next, &hist.u);
        let record_energy = match exact_p {
            Some(ep) => {
                let e_next = sub(ep, &p_next);
                let e_prev = sub(ep, &hist.p);
                match energy_functional(&e_next, &e_prev, |q| prob.schur_apply(q), h, cfg.alpha2, cfg.beta) {
                    Ok(v) => Some(v),
                    Err(e) => return Err(abort(hist, e)),
                }
            }
            None => None,
        };
        let record = IterationRecord {
            u_increment: norm_h(&du, h)?,
            p_increment: norm_h(&sub(&p_next, &hist.p), h)?,
            div_norm: norm_h(&prob.apply_b(&u_next)?, h)?,
            div_increment: norm_h(&prob.apply_b(&du)?, h)?,
            energy: record_energy,
        };
        hist.u = u_next;
        hist.p = p_next;
        hist.records.push(record);
        hist.iterations = n + 1;
        observe(n + 1, &hist.u, &hist.p);

        let inc = record.max_increment();
        if !inc.is_finite() || inc > DIVERGENCE_THRESHOLD {
            hist.outcome = Outcome::Diverged;
            break;
        }
        if inc <= cfg.tol {
            hist.outcome = Outcome::Converged;
            break;
        }
    }
    Ok(hist)
}

fn abort(history: IterationHistory, source: Error) -> Error {
    Error::Aborted { history: Box::new(history), source: Box::new(source) }
}
