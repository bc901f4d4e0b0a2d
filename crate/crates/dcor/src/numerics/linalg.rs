//! Dense linear algebra on small symmetric systems: Jacobi eigendecomposition,
//! inverse matrix square root, and LU determinant/solve.
//!
//! Matrices are row-major `&[f64]` slices with an explicit order `n`. The
//! dispersion matrices this crate works with are tiny (order p + q, usually
//! under twenty), so the cyclic Jacobi method is both simple and accurate:
//! rotations drive the off-diagonal mass to zero at machine precision.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

fn max_abs(m: &[f64]) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn check_square(m: &[f64], n: usize) -> Result<()> {
    if m.len() != n * n {
        return Err(Error::Dimension(format!(
            "expected {n}x{n} = {} entries, got {}",
            n * n,
            m.len()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("matrix of order {n} contains NaN or infinity")));
    }
    Ok(())
}

fn check_symmetric(m: &[f64], n: usize) -> Result<()> {
    let tol = 1e-12 * max_abs(m).max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[i * n + j] - m[j * n + i]).abs() > tol {
                return Err(Error::Dimension(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    m[i * n + j],
                    m[j * n + i]
                )));
            }
        }
    }
    Ok(())
}

/// Eigenvalues (descending) and eigenvectors of a symmetric matrix.
/// `vectors` is row-major with eigenvector `j` in column `j`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub n: usize,
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eigen(m: &[f64], n: usize) -> Result<SymEigen> {
    check_square(m, n)?;
    check_symmetric(m, n)?;
    if n == 0 {
        return Err(Error::Dimension("matrix of order zero".into()));
    }

    let mut a = m.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        // Rotate below threshold only in early sweeps; afterwards rotate all.
        let tresh = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3
                    && a[p * n + p].abs() + g == a[p * n + p].abs()
                    && a[q * n + q].abs() + g == a[q * n + q].abs()
                {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= tresh {
                    continue;
                }

                let theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
                let t = if theta.abs() > 1e20 {
                    0.5 / theta
                } else {
                    let s = theta.signum();
                    s / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;

                a[p * n + p] -= h;
                a[q * n + q] += h;
                a[p * n + q] = 0.0;

                let rotate = |buf: &mut [f64], i1: usize, j1: usize, i2: usize, j2: usize| {
                    let g = buf[i1 * n + j1];
                    let h = buf[i2 * n + j2];
                    buf[i1 * n + j1] = g - s * (h + g * tau);
                    buf[i2 * n + j2] = h + s * (g - h * tau);
                };

                for i in 0..p {
                    rotate(&mut a, i, p, i, q);
                }
                for i in (p + 1)..q {
                    rotate(&mut a, p, i, i, q);
                }
                for i in (q + 1)..n {
                    rotate(&mut a, p, i, q, i);
                }
                for i in 0..n {
                    rotate(&mut v, i, p, i, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));

    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + col] = v[row * n + src];
        }
    }
    Ok(SymEigen { values, vectors, n })
}

/// Eigenvalues below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Symmetric inverse square root `M^{-1/2}` of a positive definite matrix.
///
/// Fails with [`Error::Singular`] naming the offending eigenvalue when any
/// eigenvalue is at or below `RANK_TOLERANCE` times the largest one.
pub fn inv_sqrt(m: &[f64], n: usize) -> Result<Vec<f64>> {
    let eig = sym_eigen(m, n)?;
    let lambda_max = eig.values[0];
    if lambda_max <= 0.0 {
        return Err(Error::Singular { eigenvalue: lambda_max });
    }
    let tol = RANK_TOLERANCE * lambda_max;
    for &l in &eig.values {
        if l <= tol {
            return Err(Error::Singular { eigenvalue: l });
        }
    }
    let inv_roots: Vec<f64> = eig.values.iter().map(|&l| 1.0 / l.sqrt()).collect();
    // V diag(1/sqrt(lambda)) V^T
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut sum = 0.0;
            for k in 0..n {
                sum += eig.vectors[i * n + k] * inv_roots[k] * eig.vectors[j * n + k];
            }
            out[i * n + j] = sum;
            out[j * n + i] = sum;
        }
    }
    Ok(out)
}

/// LU factorization with partial pivoting: determinant plus a solver handle.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: Vec<f64>,
    perm: Vec<usize>,
    det: f64,
    n: usize,
}

/// Factor a square matrix. Pivots at or below `1e-12 * max|m_ij|` raise
/// [`Error::SingularPivot`] instead of producing garbage.
pub fn det_and_solve(m: &[f64], n: usize) -> Result<LuDecomposition> {
    check_square(m, n)?;
    if n == 0 {
        return Err(Error::Dimension("matrix of order zero".into()));
    }
    let tol = 1e-12 * max_abs(m);

    let mut lu = m.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = 1.0;

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[col * n + col].abs();
        for r in (col + 1)..n {
            let v = lu[r * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= tol {
            return Err(Error::SingularPivot { column: col, pivot: lu[pivot_row * n + col] });
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            perm.swap(col, pivot_row);
            det = -det;
        }
        let diag = lu[col * n + col];
        det *= diag;
        for r in (col + 1)..n {
            let factor = lu[r * n + col] / diag;
            lu[r * n + col] = factor;
            for j in (col + 1)..n {
                lu[r * n + j] -= factor * lu[col * n + j];
            }
        }
    }

    Ok(LuDecomposition { lu, perm, det, n })
}

impl LuDecomposition {
    pub fn det(&self) -> f64 {
        self.det
    }

    /// Solve `M x = rhs` for a single right-hand side.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::Dimension(format!("rhs length {} for order {n}", rhs.len())));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solve `M X = B` column by column; `b` is row-major n x ncols.
    pub fn solve_mat(&self, b: &[f64], ncols: usize) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n * ncols {
            return Err(Error::Dimension(format!(
                "rhs is {} entries, expected {n} x {ncols}",
                b.len()
            )));
        }
        let mut out = vec![0.0; n * ncols];
        let mut col = vec![0.0; n];
        for c in 0..ncols {
            for r in 0..n {
                col[r] = b[r * ncols + c];
            }
            let x = self.solve(&col)?;
            for r in 0..n {
                out[r * ncols + c] = x[r];
            }
        }
        Ok(out)
    }
}

/// Row-major product of an (r x k) and a (k x c) matrix.
pub(crate) fn mat_mul(a: &[f64], b: &[f64], r: usize, k: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for l in 0..k {
            let av = a[i * k + l];
            if av == 0.0 {
                continue;
            }
            for j in 0..c {
                out[i * c + j] += av * b[l * c + j];
            }
        }
    }
    out
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
pub(crate) fn cholesky(m: &[f64], n: usize) -> Result<Vec<f64>> {
    check_square(m, n)?;
    check_symmetric(m, n)?;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Singular { eigenvalue: sum });
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(l)
}
