//! Numeric kernels: special functions, small dense linear algebra, and
//! adaptive quadrature. Everything downstream builds on these.

mod linalg;
mod quadrature;
mod special;

pub use linalg::{det_and_solve, inv_sqrt, sym_eigen, LuDecomposition, SymEigen, RANK_TOLERANCE};
pub(crate) use linalg::{cholesky, mat_mul};
pub use quadrature::{quadrature_1d, Quadrature};
pub use special::{chi_square_sf, gamma_fn, ln_gamma, normal_cdf, normal_quantile, reg_upper_gamma};
