//! Solver suite for the nonlinear Schrodinger / Gross-Pitaevskii equation.
//!
//! The crate provides:
//! * finite-difference and pseudospectral time steppers (CNFD, ReFD, SIFD,
//!   TSSP, TSFD, SSFD, LPFD) under Dirichlet, Neumann and periodic boundary
//!   conditions,
//! * absorbing layers for open domains (PML with a variable-coefficient
//!   stencil, and a complex absorbing potential),
//! * model extensions: damped NLSE, rotating GPE (ADI splitting and rotating
//!   Lagrangian coordinates) and coupled two-component GPEs,
//! * conserved-quantity diagnostics, error norms against analytic solutions,
//!   and a benchmark harness with a CLI.
//!
//! All arithmetic is 64-bit; the spectral benchmark errors bottom out near
//! 1e-9, which leaves no headroom for narrower types.

pub mod boundaries;
pub mod diagnostics;
pub mod error;
pub mod extensions;
pub mod harness;
pub mod linsolve;
pub mod model;
pub mod schemes;
pub mod transforms;

/// Scalar type used throughout the crate.
pub type Real = f64;
/// Complex type used throughout the crate.
pub type Cplx = num_complex::Complex<f64>;

pub use error::{NlseError, Result};
pub use model::{
    BoundaryKind, Grid, ModelParams, Nonlinearity, Potential, WaveField,
};
