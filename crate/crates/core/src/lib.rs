//! Principal Dirichlet eigenpairs of the Laplace–Beltrami operator on the
//! upper half of a torus whose tube radius is modulated as `r + ε sin(nθ)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] – embedding, metric and Laplace–Beltrami coefficients,
//! * [`linalg`] – banded LU, CSR products, inverse iteration, dense oracle,
//! * [`radial`] – the axisymmetric (ε = 0) Sturm–Liouville reduction,
//! * [`perturbation`] – first-order correction `V = C₂(φ) sin(nθ) + cU`,
//! * [`spectral2d`] – the full two-dimensional finite-difference eigenproblem,
//! * [`morse`] – critical-point location, classification and verification.
//!
//! The `parallel` feature (on by default) routes row products, sweeps and
//! Newton searches through rayon; without it every path runs sequentially and
//! produces bit-identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod morse;
pub mod perturbation;
pub mod radial;
pub mod spectral2d;
pub mod spline;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{MetricAt, TorusShape};
pub use morse::{CriticalKind, CriticalPoint, CriticalPointReport, CriticalSet};
pub use perturbation::PerturbationField;
pub use radial::{RadialEigenpair, RadialGrid};
pub use spectral2d::{EigenSolveResult, Field2D, Grid2D};
