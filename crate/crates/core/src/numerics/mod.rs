//! Shared numerical kernels.

pub mod fourier;
pub mod linalg;
pub mod quadrature;
pub mod special;

pub use fourier::{dft_1d, Complex64, Direction, UnitaryDft};
pub use linalg::{
    solve_lower_triangular, solve_vandermonde_system, CotangentVandermonde, LowerTriangularMatrix,
    VandermondeSolver, DEFAULT_MAX_ORDER,
};
pub use quadrature::{adaptive_gauss, trapezoid_integrate, trapezoid_weights, CompensatedSum, GaussLegendre, Grid1D};
pub use special::{binomial, binomial_u64, log_gamma, EXACT_BINOMIAL_LIMIT};
