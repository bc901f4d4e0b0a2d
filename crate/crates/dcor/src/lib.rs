//! Distance covariance and distance correlation for multivariate samples.
//!
//! The central quantity is the sample distance covariance `V_n^2(X, Y)`: an
//! average of products of double-centered pairwise distances that is zero
//! exactly when the empirical characteristic function of the joint sample
//! factors into the product of the marginal ones. Unlike product-moment
//! correlation it responds to *any* kind of dependence, linear or not, and it
//! is defined for samples of arbitrary (and unequal) dimension.
//!
//! The crate provides:
//!
//! * [`dcov::dcov_stats`] - the statistics `V_n^2`, `R_n^2`, the marginal
//!   distance variances, and the raw sums they are built from, for any
//!   distance exponent `alpha` in `(0, 2]`;
//! * [`inference`] - a permutation test of independence and a conservative
//!   large-sample test based on the limit distribution of `n V_n^2 / S_2`;
//! * [`normal`] - closed-form population values of the distance correlation
//!   for the bivariate normal, with quadrature and Monte Carlo oracles;
//! * [`classical`] - Wilks' likelihood-ratio statistic and the rank and sign
//!   dispersion tests used as comparison points;
//! * [`sim`] - reproducible data generators and a power-study runner driven
//!   by splittable random streams.
//!
//! The crate is `no_std` (it allocates, but performs no IO); everything here
//! is deterministic given its inputs, including the simulation machinery.
//!
//! # Example
//!
//! ```
//! use dcor::{SampleMatrix, dcov_stats};
//!
//! let x = SampleMatrix::from_rows(&[&[0.0], &[1.0], &[2.0], &[3.0]]).unwrap();
//! let y = SampleMatrix::from_rows(&[&[0.0], &[1.0], &[4.0], &[9.0]]).unwrap();
//! let r = dcov_stats(&x, &y, 1.0).unwrap();
//! assert!(r.r2 > 0.9); // monotone dependence, nearly perfect
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classical;
pub mod dcov;
pub mod distance;
mod error;
pub mod inference;
pub mod normal;
pub mod numerics;
pub mod sim;

pub use dcov::{dcov_stats, DcovResult};
pub use distance::SampleMatrix;
pub use error::{Error, Result};
pub use inference::{asymptotic_test, permutation_test, TestResult};
