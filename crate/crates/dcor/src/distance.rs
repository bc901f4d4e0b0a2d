//! Samples, pairwise distance matrices, and double centering.
//!
//! A sample is `n` observations in `R^d`, stored row-major. The distance
//! matrix holds Euclidean distances raised to a configurable exponent
//! `alpha` in (0, 2]. Double centering subtracts row and column means and
//! adds back the grand mean:
//!
//! ```text
//! A_kl = a_kl - abar_k. - abar_.l + abar_..
//! ```
//!
//! which makes every row and column of `A` sum to zero. The centered
//! matrices are the raw material for the distance covariance statistics.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

/// Compensated (Kahan) accumulator. The statistics sum n^2 products of
/// similar magnitude; compensation keeps the roundoff of those sums near
/// one ulp instead of growing with n.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.sum
    }
}

/// An `n x d` sample, one observation per row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleMatrix {
    data: Vec<f64>,
    n: usize,
    dim: usize,
}

impl SampleMatrix {
    /// Build from a row-major buffer. Rejects empty samples, dimension
    /// mismatches, and non-finite entries.
    pub fn new(data: Vec<f64>, n: usize, dim: usize) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::Dimension(format!("sample must be non-empty, got {n} x {dim}")));
        }
        if data.len() != n * dim {
            return Err(Error::Dimension(format!(
                "buffer holds {} values, expected {n} x {dim} = {}",
                data.len(),
                n * dim
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "sample entry at row {}, column {} is {}",
                pos / dim,
                pos % dim,
                data[pos]
            )));
        }
        Ok(SampleMatrix { data, n, dim })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("sample must be non-empty".into()));
        }
        let dim = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(data, rows.len(), dim)
    }

    /// One-dimensional convenience: each value becomes a row.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Symmetric matrix of pairwise distances (raised to `alpha`), zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    data: Vec<f64>,
    n: usize,
    alpha: f64,
}

impl DistanceMatrix {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.data[k * self.n + l]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Euclidean distances between all rows of `x`, each raised to `alpha`.
/// The exponent must lie in (0, 2]; at `alpha = 2` the entries are squared
/// distances.
pub fn pairwise_distances(x: &SampleMatrix, alpha: f64) -> Result<DistanceMatrix> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!(
            "distance exponent must lie in (0, 2], got {alpha}"
        )));
    }
    let n = x.n_rows();
    let dim = x.dim();
    let mut data = vec![0.0; n * n];
    for k in 0..n {
        let xk = x.row(k);
        for l in (k + 1)..n {
            let xl = x.row(l);
            let mut sq = KahanSum::default();
            for j in 0..dim {
                let d = xk[j] - xl[j];
                sq.add(d * d);
            }
            let sq = sq.value();
            let dist = if alpha == 1.0 {
                sq.sqrt()
            } else if alpha == 2.0 {
                sq
            } else {
                sq.powf(0.5 * alpha)
            };
            data[k * n + l] = dist;
            data[l * n + k] = dist;
        }
    }
    Ok(DistanceMatrix { data, n, alpha })
}

/// A double-centered distance matrix, with the means used to center it.
#[derive(Debug, Clone)]
pub struct CenteredDistanceMatrix {
    data: Vec<f64>,
    row_means: Vec<f64>,
    grand_mean: f64,
    n: usize,
}

impl CenteredDistanceMatrix {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.data[k * self.n + l]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Row mean of the *uncentered* distances, `(1/n) sum_l a_kl`.
    /// Equal to the column mean by symmetry.
    #[inline]
    pub fn row_mean(&self, k: usize) -> f64 {
        self.row_means[k]
    }

    /// Grand mean of the uncentered distances, `(1/n^2) sum_kl a_kl`.
    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }
}

/// Double centering: `A_kl = a_kl - abar_k. - abar_.l + abar_..`.
pub fn double_center(d: &DistanceMatrix) -> CenteredDistanceMatrix {
    let n = d.n;
    let nf = n as f64;
    let mut row_means = Vec::with_capacity(n);
    let mut grand = KahanSum::default();
    for k in 0..n {
        let mut row = KahanSum::default();
        for l in 0..n {
            row.add(d.data[k * n + l]);
        }
        grand.add(row.value());
        row_means.push(row.value() / nf);
    }
    let grand_mean = grand.value() / (nf * nf);

    let mut data = vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            data[k * n + l] = d.data[k * n + l] - row_means[k] - row_means[l] + grand_mean;
        }
    }
    CenteredDistanceMatrix { data, row_means, grand_mean, n }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_guards() {
        assert!(SampleMatrix::new(vec![], 0, 1).is_err());
        assert!(SampleMatrix::new(vec![1.0, 2.0, 3.0], 2, 2).is_err());
        assert!(matches!(
            SampleMatrix::new(vec![1.0, f64::NAN], 2, 1),
            Err(Error::NonFinite(_))
        ));
        assert!(SampleMatrix::from_rows(&[&[1.0, 2.0], &[3.0]]).is_err());
        let ok = SampleMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(ok.n_rows(), 2);
        assert_eq!(ok.dim(), 2);
        assert_eq!(ok.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn alpha_domain() {
        let x = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        assert!(pairwise_distances(&x, 0.0).is_err());
        assert!(pairwise_distances(&x, -1.0).is_err());
        assert!(pairwise_distances(&x, 2.0 + 1e-12).is_err());
        assert!(pairwise_distances(&x, 2.0).is_ok());
    }

    #[test]
    fn distances_by_hand() {
        let x = SampleMatrix::from_rows(&[&[0.0, 0.0], &[3.0, 4.0]]).unwrap();
        let d = pairwise_distances(&x, 1.0).unwrap();
        assert_eq!(d.entry(0, 1), 5.0);
        assert_eq!(d.entry(1, 0), 5.0);
        assert_eq!(d.entry(0, 0), 0.0);

        let d2 = pairwise_distances(&x, 2.0).unwrap();
        assert_eq!(d2.entry(0, 1), 25.0);

        let dh = pairwise_distances(&x, 0.5).unwrap();
        assert!((dh.entry(0, 1) - 5.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn centering_by_hand() {
        // x = {0, 1, 3} on the line; distances and means worked out on paper.
        let x = SampleMatrix::from_column(&[0.0, 1.0, 3.0]).unwrap();
        let d = pairwise_distances(&x, 1.0).unwrap();
        let c = double_center(&d);
        assert!((c.row_mean(0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.row_mean(1) - 1.0).abs() < 1e-15);
        assert!((c.row_mean(2) - 5.0 / 3.0).abs() < 1e-15);
        assert!((c.grand_mean() - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.entry(0, 0) - (-4.0 / 3.0)).abs() < 1e-15);
        assert!(c.entry(0, 1).abs() < 1e-15);
        assert!((c.entry(0, 2) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn centered_rows_and_columns_sum_to_zero() {
        let x = SampleMatrix::from_rows(&[
            &[0.3, -1.2],
            &[2.0, 0.4],
            &[-0.7, 0.9],
            &[1.5, -0.5],
            &[0.0, 0.0],
        ])
        .unwrap();
        let c = double_center(&pairwise_distances(&x, 1.0).unwrap());
        for k in 0..5 {
            let row: f64 = (0..5).map(|l| c.entry(k, l)).sum();
            let col: f64 = (0..5).map(|l| c.entry(l, k)).sum();
            assert!(row.abs() < 1e-13, "row {k} sums to {row}");
            assert!(col.abs() < 1e-13, "column {k} sums to {col}");
        }
    }

    #[test]
    fn single_point_centers_to_zero() {
        let x = SampleMatrix::from_column(&[7.0]).unwrap();
        let c = double_center(&pairwise_distances(&x, 1.0).unwrap());
        assert_eq!(c.entry(0, 0), 0.0);
        assert_eq!(c.grand_mean(), 0.0);
    }
}
