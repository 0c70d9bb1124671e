//! Uzawa-type pressure iterations for saddle-point problems.
//!
//! The crate implements a two-parameter variant of the Uzawa
//! iteration,
//!
//! ```text
//! A u⁽ⁿ⁺¹⁾ + Bᵀ p⁽ⁿ⁾ = f
//! p⁽ⁿ⁺¹⁾ = p⁽ⁿ⁾ + β B(u⁽ⁿ⁺¹⁾ − u⁽ⁿ⁾) + α² B u⁽ⁿ⁺¹⁾
//! ```
//!
//! together with the tools needed to study it on the lid-driven cavity:
//!
//! - [`numcore`]: CSR matrices, CG, zero-mean projection, splitmix64.
//! - [`saddle`]: the abstract problem and its Schur complement `B A⁻¹ Bᵀ`,
//!   with power-iteration estimates of its extreme eigenvalues.
//! - [`iterate`]: the two-step loop, stopping rule and error-energy tracking.
//! - [`stokes`]: a MAC finite-difference Stokes discretization.
//! - [`oracle`]: dense references (Jacobi eigenvalues, direct solve,
//!   companion-matrix spectral radius) for small grids.
//! - [`cli`]: the `run`/`sweep`/`divnorm`/`spectrum` experiment harness.
//!
//! ```
//! use uzawa_cavity::iterate::{run, IterationConfig};
//! use uzawa_cavity::stokes::{build_mac_stokes, LidProfile};
//!
//! let sys = build_mac_stokes(8, LidProfile::Regularized).unwrap();
//! let hist = run(sys.problem(), &IterationConfig::new(1.5, 0.05), None).unwrap();
//! assert!(hist.converged());
//! ```

pub mod cli;
pub mod error;
pub mod iterate;
pub mod numcore;
pub mod oracle;
pub mod saddle;
pub mod stokes;

pub use error::{Error, Result};
pub use iterate::{IterationConfig, IterationHistory, Outcome, Step1};
pub use saddle::{Extreme, InnerSolve, SaddleProblem, SpectralEstimate};
pub use stokes::{build_mac_stokes, LidProfile, StokesSystem};
