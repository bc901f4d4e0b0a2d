//! Classical multivariate independence tests used as benchmarks: the
//! Wilks likelihood ratio and the Puri-Sen rank and sign statistics.
//!
//! All three share one shape. A dispersion matrix of the combined
//! `(p+q)`-variate sample is partitioned into blocks
//!
//! ```text
//!     T = [ T11  T12 ]
//!         [ T21  T22 ]
//! ```
//!
//! and independence is judged by how far the determinant ratio
//! `det(I - T22^-1 T21 T11^-1 T12)` falls below one. What varies is the
//! dispersion: the plain covariance for Wilks, rank correlations for
//! Puri-Sen's rank test, sign agreements about the coordinate medians
//! for the sign test. Bartlett's multiplier turns minus the log of the
//! ratio into an approximate chi-square with `p q` degrees of freedom.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::distance::SampleMatrix;
use crate::error::{Error, Result};
use crate::numerics::{chi_square_sf, det_and_solve, mat_mul};

/// Which dispersion matrix a decomposition was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DispersionKind {
    Covariance,
    Spearman,
    Sign,
}

/// A dispersion matrix of the combined sample, partitioned into the
/// within- and cross-sample blocks. `t11` is `p x p`, `t22` is `q x q`,
/// `t12` is `p x q`, and `t21` is its transpose, all row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionDecomposition {
    pub t11: Vec<f64>,
    pub t12: Vec<f64>,
    pub t21: Vec<f64>,
    pub t22: Vec<f64>,
    pub p: usize,
    pub q: usize,
    pub kind: DispersionKind,
}

impl DispersionDecomposition {
    fn from_full(full: &[f64], p: usize, q: usize, kind: DispersionKind) -> Self {
        let d = p + q;
        let block = |rows: core::ops::Range<usize>, cols: core::ops::Range<usize>| {
            let mut out = Vec::with_capacity(rows.len() * cols.len());
            for r in rows.clone() {
                for c in cols.clone() {
                    out.push(full[r * d + c]);
                }
            }
            out
        };
        DispersionDecomposition {
            t11: block(0..p, 0..p),
            t12: block(0..p, p..d),
            t21: block(p..d, 0..p),
            t22: block(p..d, p..d),
            p,
            q,
            kind,
        }
    }

    /// The determinant ratio `det(I - T22^-1 T21 T11^-1 T12)`, which
    /// lies in `(0, 1]` for any positive semidefinite dispersion.
    ///
    /// # Errors
    ///
    /// A singular within-sample block is reported as such; a ratio at
    /// or below zero means the second sample is (numerically) an exact
    /// function of the first and is reported as degenerate.
    pub fn lambda(&self) -> Result<f64> {
        let (p, q) = (self.p, self.q);
        let u = det_and_solve(&self.t11, p)?.solve_mat(&self.t12, q)?;
        let cross = mat_mul(&self.t21, &u, q, p, q);
        let v = det_and_solve(&self.t22, q)?.solve_mat(&cross, q)?;
        let mut a = vec![0.0; q * q];
        for i in 0..q {
            for j in 0..q {
                a[i * q + j] = if i == j { 1.0 } else { 0.0 } - v[i * q + j];
            }
        }
        let lambda = match det_and_solve(&a, q) {
            Ok(lu) => lu.det(),
            Err(Error::SingularPivot { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        if lambda <= 0.0 {
            return Err(Error::Degenerate(format!(
                "dispersion determinant ratio {lambda} is not positive; \
                 one sample is an exact function of the other"
            )));
        }
        if lambda > 1.0 + 1e-9 {
            return Err(Error::Internal(format!(
                "dispersion determinant ratio {lambda} exceeds one"
            )));
        }
        Ok(lambda.min(1.0))
    }
}

fn check_same_n(x: &SampleMatrix, y: &SampleMatrix, min_n: usize) -> Result<usize> {
    if x.n_rows() != y.n_rows() {
        return Err(Error::Dimension(format!(
            "samples have {} and {} rows",
            x.n_rows(),
            y.n_rows()
        )));
    }
    if x.n_rows() < min_n {
        return Err(Error::Dimension(format!(
            "need at least {min_n} observations, got {}",
            x.n_rows()
        )));
    }
    Ok(x.n_rows())
}

fn check_sample_size(n: usize, p: usize, q: usize) -> Result<()> {
    if n <= p + q {
        return Err(Error::Dimension(format!(
            "need n > p + q = {}, got n = {n}",
            p + q
        )));
    }
    Ok(())
}

fn column(m: &SampleMatrix, k: usize) -> Vec<f64> {
    (0..m.n_rows()).map(|i| m.row(i)[k]).collect()
}

fn combined_columns(x: &SampleMatrix, y: &SampleMatrix) -> Vec<Vec<f64>> {
    let mut cols = Vec::with_capacity(x.dim() + y.dim());
    for k in 0..x.dim() {
        cols.push(column(x, k));
    }
    for k in 0..y.dim() {
        cols.push(column(y, k));
    }
    cols
}

fn coordinate_name(k: usize, p: usize) -> alloc::string::String {
    if k < p {
        format!("x coordinate {k}")
    } else {
        format!("y coordinate {}", k - p)
    }
}

fn build<F: Fn(usize, usize) -> f64>(
    entry: F,
    p: usize,
    q: usize,
    kind: DispersionKind,
) -> DispersionDecomposition {
    let d = p + q;
    let mut full = vec![0.0; d * d];
    for k in 0..d {
        for m in k..d {
            let v = entry(k, m);
            full[k * d + m] = v;
            full[m * d + k] = v;
        }
    }
    DispersionDecomposition::from_full(&full, p, q, kind)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Sample covariance of the combined sample, partitioned into blocks.
pub fn covariance_dispersion(x: &SampleMatrix, y: &SampleMatrix) -> Result<DispersionDecomposition> {
    let n = check_same_n(x, y, 2)?;
    let centered: Vec<Vec<f64>> = combined_columns(x, y)
        .into_iter()
        .map(|col| {
            let mean = col.iter().sum::<f64>() / n as f64;
            col.into_iter().map(|v| v - mean).collect()
        })
        .collect();
    Ok(build(
        |k, m| dot(&centered[k], &centered[m]) / (n - 1) as f64,
        x.dim(),
        y.dim(),
        DispersionKind::Covariance,
    ))
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite sample"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &slot in &idx[i..=j] {
            ranks[slot] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlations of the combined sample, partitioned into
/// blocks. Ties receive average ranks.
///
/// # Errors
///
/// A constant coordinate has no defined rank correlation and is
/// reported as degenerate.
pub fn spearman_dispersion(x: &SampleMatrix, y: &SampleMatrix) -> Result<DispersionDecomposition> {
    let n = check_same_n(x, y, 3)?;
    let p = x.dim();
    let mut dev = Vec::new();
    let mut ss = Vec::new();
    for (k, col) in combined_columns(x, y).into_iter().enumerate() {
        let ranks = average_ranks(&col);
        let mean = ranks.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = ranks.into_iter().map(|r| r - mean).collect();
        let s = dot(&centered, &centered);
        if s == 0.0 {
            return Err(Error::Degenerate(format!(
                "{} is constant; its rank correlation is undefined",
                coordinate_name(k, p)
            )));
        }
        dev.push(centered);
        ss.push(s);
    }
    Ok(build(
        |k, m| {
            if k == m {
                1.0
            } else {
                dot(&dev[k], &dev[m]) / (ss[k] * ss[m]).sqrt()
            }
        },
        p,
        y.dim(),
        DispersionKind::Spearman,
    ))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Sign agreements about the coordinate medians,
/// `(1/n) sum_j sign(z_jk - med_k) sign(z_jm - med_m)`, partitioned
/// into blocks. Observations at a median contribute zero; for even `n`
/// the median is the midpoint of the two central order statistics.
pub fn sign_dispersion(x: &SampleMatrix, y: &SampleMatrix) -> Result<DispersionDecomposition> {
    let n = check_same_n(x, y, 3)?;
    let signs: Vec<Vec<f64>> = combined_columns(x, y)
        .into_iter()
        .map(|col| {
            let med = median(&col);
            col.into_iter()
                .map(|v| {
                    if v > med {
                        1.0
                    } else if v < med {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(build(
        |k, m| dot(&signs[k], &signs[m]) / n as f64,
        x.dim(),
        y.dim(),
        DispersionKind::Sign,
    ))
}

/// The Wilks likelihood ratio statistic
/// `W = -n log det(I - S22^-1 S21 S11^-1 S12)` on the covariance
/// decomposition. Zero when the cross-covariance vanishes, growing
/// without bound as the canonical correlations approach one.
///
/// # Errors
///
/// Requires `n > p + q`; singular marginal covariances and exact
/// functional dependence surface as in
/// [`DispersionDecomposition::lambda`].
pub fn wilks_statistic(x: &SampleMatrix, y: &SampleMatrix) -> Result<f64> {
    let n = check_same_n(x, y, 2)?;
    check_sample_size(n, x.dim(), y.dim())?;
    let lambda = covariance_dispersion(x, y)?.lambda()?;
    Ok(-(n as f64) * lambda.ln() + 0.0)
}

/// Bartlett's chi-square calibration of a dispersion decomposition:
/// the statistic `-(n - (p+q+3)/2) log lambda` and its upper tail
/// probability under `chi^2(pq)`.
pub fn bartlett_pvalue(decomp: &DispersionDecomposition, n: usize) -> Result<(f64, f64)> {
    let (p, q) = (decomp.p, decomp.q);
    check_sample_size(n, p, q)?;
    let lambda = decomp.lambda()?;
    let statistic = -(n as f64 - (p + q + 3) as f64 / 2.0) * lambda.ln() + 0.0;
    let p_value = chi_square_sf(statistic, (p * q) as f64)?;
    Ok((statistic, p_value))
}
