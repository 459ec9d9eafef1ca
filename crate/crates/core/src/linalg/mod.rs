//! Self-contained numerical kernels.

pub mod banded;
pub mod dense;
pub mod eigen;
pub mod sparse;

pub use banded::{band_factor_solve, BandedLu, BandedMatrix};
pub use dense::{dense_eig_oracle, DenseMatrix, DenseSpectrum, DENSE_ORACLE_MAX_DIM};
pub use eigen::{inverse_power_principal, rayleigh_quotient, EigenIterState, InverseIterOptions, PrincipalEigenpair};
pub use sparse::{SparseMatrix, TripletBuilder};
