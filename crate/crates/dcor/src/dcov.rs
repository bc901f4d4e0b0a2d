//! Distance covariance and correlation statistics.
//!
//! For paired samples `X` (n rows in R^p) and `Y` (n rows in R^q), the
//! squared distance covariance is the mean of the entrywise product of the
//! two double-centered distance matrices,
//!
//! ```text
//! V2(X, Y) = (1/n^2) sum_{k,l} A_kl B_kl,
//! ```
//!
//! and the squared distance correlation R2 normalizes by the distance
//! variances `V2(X)` and `V2(Y)`. Both admit an equivalent form in three
//! raw distance moments,
//!
//! ```text
//! S1 = (1/n^2) sum_{k,l} a_kl b_kl
//! S2 = (mean of a) * (mean of b)
//! S3 = (1/n^3) sum_k sum_{l,m} a_kl b_km
//! V2 = S1 + S2 - 2 S3,
//! ```
//!
//! which this module exposes both as fields of every [`DcovResult`] and as
//! the independent brute-force path [`oracle_s_sums`]. A third, much more
//! expensive characterization integrates the squared modulus of the
//! difference between the joint and product empirical characteristic
//! functions against the weight `1/(pi^2 t^2 s^2)`; [`ecf_norm_oracle`]
//! evaluates that integral numerically on a truncated domain so the
//! algebraic paths can be validated against the defining integral.
//!
//! Distances may be raised to an exponent `alpha` in `(0, 2]`. The
//! boundary case `alpha = 2` is accepted by the sample statistics, where
//! it collapses distance correlation onto the absolute Pearson
//! correlation in one dimension (see [`pearson_check`]), but rejected by
//! [`weight_constant`] because the population weight integral diverges
//! there.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::distance::{double_center, pairwise_distances, KahanSum, SampleMatrix};
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, inv_sqrt, quadrature_1d};

/// Relative slack allowed when clamping a slightly negative squared
/// statistic back to zero. Anything more negative than this times the
/// statistic's scale is reported as an internal error rather than hidden.
const NEGATIVE_CLAMP: f64 = 1e-9;

/// Largest sample size accepted by [`ecf_norm_oracle`].
const ECF_MAX_N: usize = 6;

/// The full set of distance dependence statistics for one sample pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DcovResult {
    /// Squared distance covariance between the samples, nonnegative.
    pub v2_xy: f64,
    /// Squared distance variance of the first sample.
    pub v2_x: f64,
    /// Squared distance variance of the second sample.
    pub v2_y: f64,
    /// Squared distance correlation in `[0, 1]`; zero whenever either
    /// distance variance vanishes.
    pub r2: f64,
    /// Mean of the entrywise product of the raw distance matrices.
    pub s1: f64,
    /// Product of the two grand mean distances.
    pub s2: f64,
    /// Mean over k of (row mean of a) times (row mean of b).
    pub s3: f64,
    /// Sample size.
    pub n: usize,
    /// Distance exponent the statistics were computed with.
    pub alpha: f64,
}

impl DcovResult {
    /// Distance correlation, the square root of [`r2`](Self::r2). The
    /// root is taken after the nonnegativity clamp, so it is always a
    /// real number in `[0, 1]`.
    pub fn r(&self) -> f64 {
        self.r2.sqrt()
    }

    /// Distance covariance, the square root of [`v2_xy`](Self::v2_xy).
    pub fn v(&self) -> f64 {
        self.v2_xy.sqrt()
    }
}

/// The normalizing constant `C(d, alpha)` of the population weight
/// function, evaluated through the gamma function:
///
/// ```text
/// C(d, alpha) = 2 pi^(d/2) Gamma(1 - alpha/2) / (alpha 2^alpha Gamma((d + alpha)/2))
/// ```
///
/// For `alpha = 1` this is the constant usually written `c_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConstant {
    /// Dimension of the space the weight acts on.
    pub d: usize,
    /// Distance exponent, strictly inside `(0, 2)`.
    pub alpha: f64,
    /// The evaluated constant, always positive.
    pub value: f64,
}

/// Evaluates the weight constant `C(d, alpha)`.
///
/// # Errors
///
/// `d = 0` or `alpha` outside `(0, 2)` is a domain error. The right
/// endpoint is excluded because `Gamma(1 - alpha/2)` has a pole at
/// `alpha = 2`; the weight integral itself diverges there.
///
/// ```
/// use dcor::dcov::weight_constant;
/// let c = weight_constant(1, 1.0).unwrap();
/// assert!((c.value - core::f64::consts::PI).abs() < 1e-14);
/// ```
pub fn weight_constant(d: usize, alpha: f64) -> Result<WeightConstant> {
    if d == 0 {
        return Err(Error::Domain("weight constant requires dimension d >= 1".into()));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "weight constant requires 0 < alpha < 2 (Gamma(1 - alpha/2) has a pole at 2), got {alpha}"
        )));
    }
    let df = d as f64;
    let value = 2.0 * PI.powf(df / 2.0) * gamma_fn(1.0 - alpha / 2.0)?
        / (alpha * 2.0f64.powf(alpha) * gamma_fn((df + alpha) / 2.0)?);
    Ok(WeightConstant { d, alpha, value })
}

fn check_pair(x: &SampleMatrix, y: &SampleMatrix) -> Result<usize> {
    let n = x.n_rows();
    if y.n_rows() != n {
        return Err(Error::Dimension(format!(
            "paired samples must have equal length, got {} and {}",
            n,
            y.n_rows()
        )));
    }
    if n < 2 {
        return Err(Error::Dimension(
            "distance statistics need at least two observations".into(),
        ));
    }
    Ok(n)
}

fn clamp_nonneg(v: f64, scale: f64, what: &str) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVE_CLAMP * scale {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!(
            "{what} = {v:e} is negative far beyond roundoff (scale {scale:e})"
        )))
    }
}

/// Computes all distance dependence statistics for one sample pair with
/// distance exponent `alpha` in `(0, 2]`.
///
/// The main path double-centers the two distance matrices and averages
/// entrywise products; the `s1`, `s2`, `s3` fields are filled from the
/// same distance matrices so that the identity `v2_xy = s1 + s2 - 2 s3`
/// can be checked by callers at any time. Tiny negative values of the
/// squared statistics (pure cancellation noise) are clamped to zero;
/// negative values beyond `1e-9` times the statistic scale indicate a
/// bug and surface as [`Error::Internal`].
///
/// # Errors
///
/// Mismatched sample lengths or `n < 2` are dimension errors; `alpha`
/// outside `(0, 2]` is a domain error.
pub fn dcov_stats(x: &SampleMatrix, y: &SampleMatrix, alpha: f64) -> Result<DcovResult> {
    let n = check_pair(x, y)?;
    let nf = n as f64;

    let dx = pairwise_distances(x, alpha)?;
    let dy = pairwise_distances(y, alpha)?;
    let ax = double_center(&dx);
    let by = double_center(&dy);

    let mut vxy = KahanSum::default();
    let mut vxx = KahanSum::default();
    let mut vyy = KahanSum::default();
    for (&a, &b) in ax.data().iter().zip(by.data().iter()) {
        vxy.add(a * b);
        vxx.add(a * a);
        vyy.add(b * b);
    }

    let mut s1 = KahanSum::default();
    for (&a, &b) in dx.data().iter().zip(dy.data().iter()) {
        s1.add(a * b);
    }
    let s1 = s1.value() / (nf * nf);
    let s2 = ax.grand_mean() * by.grand_mean();
    let mut s3 = KahanSum::default();
    for k in 0..n {
        s3.add(ax.row_mean(k) * by.row_mean(k));
    }
    let s3 = s3.value() / nf;

    let scale = if s1 > 1.0 { s1 } else { 1.0 };
    let v2_xy = clamp_nonneg(vxy.value() / (nf * nf), scale, "squared distance covariance")?;
    let v2_x = clamp_nonneg(vxx.value() / (nf * nf), scale, "squared distance variance of x")?;
    let v2_y = clamp_nonneg(vyy.value() / (nf * nf), scale, "squared distance variance of y")?;

    let denom = v2_x * v2_y;
    let r2 = if denom > 0.0 {
        let r2 = v2_xy / denom.sqrt();
        if r2 > 1.0 + NEGATIVE_CLAMP {
            return Err(Error::Internal(format!(
                "squared distance correlation {r2} exceeds 1 beyond roundoff"
            )));
        }
        if r2 > 1.0 {
            1.0
        } else {
            r2
        }
    } else {
        0.0
    };

    Ok(DcovResult {
        v2_xy,
        v2_x,
        v2_y,
        r2,
        s1,
        s2,
        s3,
        n,
        alpha,
    })
}

/// Brute-force evaluation of the three distance moment sums, written so
/// that it shares nothing with the centered-matrix path: distances are
/// recomputed inline and `S3` is the literal triple loop
/// `(1/n^3) sum_k sum_{l,m} a_kl b_km`. Quadratic in `n` for `S1` and
/// `S2`, cubic for `S3`; intended for `n` up to a couple hundred.
///
/// Returns `(s1, s2, s3)`.
pub fn oracle_s_sums(x: &SampleMatrix, y: &SampleMatrix, alpha: f64) -> Result<(f64, f64, f64)> {
    let n = check_pair(x, y)?;
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Domain(format!(
            "distance exponent must lie in (0, 2], got {alpha}"
        )));
    }
    let nf = n as f64;

    let dist = |s: &SampleMatrix, k: usize, l: usize| -> f64 {
        let (rk, rl) = (s.row(k), s.row(l));
        let mut sq = 0.0;
        for (u, v) in rk.iter().zip(rl.iter()) {
            sq += (u - v) * (u - v);
        }
        sq.sqrt().powf(alpha)
    };

    let mut s1 = KahanSum::default();
    let mut ta = KahanSum::default();
    let mut tb = KahanSum::default();
    for k in 0..n {
        for l in 0..n {
            let a = dist(x, k, l);
            let b = dist(y, k, l);
            s1.add(a * b);
            ta.add(a);
            tb.add(b);
        }
    }
    let s1 = s1.value() / (nf * nf);
    let s2 = ta.value() / (nf * nf) * (tb.value() / (nf * nf));

    let mut s3 = KahanSum::default();
    for k in 0..n {
        for l in 0..n {
            let a = dist(x, k, l);
            for m in 0..n {
                s3.add(a * dist(y, k, m));
            }
        }
    }
    let s3 = s3.value() / (nf * nf * nf);

    Ok((s1, s2, s3))
}

/// A truncated characteristic-function norm estimate from
/// [`ecf_norm_oracle`], together with the parameters that produced it.
#[derive(Debug, Clone, Copy)]
pub struct EcfNorm {
    /// The integral over the truncated domain.
    pub value: f64,
    /// The cutoff `delta` defining the domain `delta <= |t|, |s| <= 1/delta`.
    pub cutoff: f64,
    /// Conservative bound on the quadrature error of `value` (the
    /// truncation error of the domain itself is not included; it is the
    /// quantity convergence studies vary `cutoff` to observe).
    pub quadrature_error: f64,
}

/// Numerically integrates
///
/// ```text
/// |f_xy(t, s) - f_x(t) f_y(s)|^2 / (pi^2 t^2 s^2)
/// ```
///
/// over the truncated domain `cutoff <= |t|, |s| <= 1/cutoff`, where
/// `f_xy`, `f_x`, `f_y` are the joint and marginal empirical
/// characteristic functions of a univariate sample pair. As the cutoff
/// shrinks this converges to the squared distance covariance, which is
/// what makes it an oracle for [`dcov_stats`]: it never touches distance
/// matrices or centering.
///
/// The integrand is invariant under the joint sign flip
/// `(t, s) -> (-t, -s)` (conjugation of every characteristic function),
/// so the outer integral runs over `t > 0` only and is doubled, with the
/// inner integral covering both signs of `s`. Note that for `n >= 3` the
/// integrand is generally not invariant under flipping one variable
/// alone, so a single quadrant does not suffice. For fixed `t` the
/// integrand is a trigonometric polynomial in `s` with frequencies
/// `y_k - y_l`; the inner integral is therefore assembled exactly, by
/// linearity, from the basis integrals of `cos(s (y_k - y_l)) / s^2`,
/// each computed once with the adaptive quadrature. The outer integral
/// is one ordinary adaptive pass over `t`. This keeps the full oscillatory
/// double integral affordable even at cutoffs like `1e-4` where a naive
/// nested scan of the inner integrand would need billions of evaluations.
///
/// # Errors
///
/// Multivariate input is unsupported; `n` above 6 is rejected since the
/// oracle is meant for tiny validation cases; quadrature budget
/// exhaustion propagates as an accuracy error.
pub fn ecf_norm_oracle(
    x: &SampleMatrix,
    y: &SampleMatrix,
    cutoff: f64,
    tol: f64,
) -> Result<EcfNorm> {
    if x.dim() != 1 || y.dim() != 1 {
        return Err(Error::Dimension(
            "the characteristic-function oracle supports univariate samples only".into(),
        ));
    }
    let n = check_pair(x, y)?;
    if n > ECF_MAX_N {
        return Err(Error::Config(format!(
            "the characteristic-function oracle is limited to n <= {ECF_MAX_N}, got {n}"
        )));
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::Domain(format!(
            "cutoff must lie in (0, 1), got {cutoff}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }

    let lo = cutoff;
    let hi = 1.0 / cutoff;
    let nf = n as f64;
    let xs: Vec<f64> = (0..n).map(|k| x.row(k)[0]).collect();
    let ys: Vec<f64> = (0..n).map(|k| y.row(k)[0]).collect();

    // Basis integrals (1/pi) int_{lo <= |s| <= hi} cos(s d) / s^2 ds for
    // every distinct frequency d = |y_k - y_l| (the odd sine parts vanish
    // over the symmetric domain). Deduplicated so repeated gaps are
    // integrated once.
    let mut freqs: Vec<f64> = Vec::new();
    let mut freq_index = vec![0usize; n * n];
    for k in 0..n {
        for l in 0..n {
            let d = (ys[k] - ys[l]).abs();
            let idx = match freqs.iter().position(|&v| v == d) {
                Some(i) => i,
                None => {
                    freqs.push(d);
                    freqs.len() - 1
                }
            };
            freq_index[k * n + l] = idx;
        }
    }
    let kc_tol = tol / (16.0 * freqs.len() as f64);
    let mut kc_vals = Vec::with_capacity(freqs.len());
    let mut kc_err = 0.0;
    for &d in &freqs {
        let q = quadrature_1d(|s| (s * d).cos() / (s * s), lo, hi, kc_tol)?;
        kc_vals.push(2.0 / PI * q.value);
        kc_err += 2.0 / PI * q.error_bound;
    }
    let kc: Vec<f64> = freq_index.iter().map(|&i| kc_vals[i]).collect();

    // Outer integrand: with w_k(t) = exp(i t x_k) - f_x(t) the difference
    // of characteristic functions is (1/n) sum_k w_k(t) exp(i s y_k), so
    // the inner integral collapses to a quadratic form in the w_k over
    // the cached basis integrals.
    let g = |t: f64| -> f64 {
        let mut wr = [0.0f64; ECF_MAX_N];
        let mut wi = [0.0f64; ECF_MAX_N];
        let mut fr = 0.0;
        let mut fi = 0.0;
        for k in 0..n {
            let (si, co) = (t * xs[k]).sin_cos();
            wr[k] = co;
            wi[k] = si;
            fr += co;
            fi += si;
        }
        fr /= nf;
        fi /= nf;
        let mut acc = 0.0;
        for k in 0..n {
            wr[k] -= fr;
            wi[k] -= fi;
            for l in 0..k {
                acc += 2.0 * (wr[k] * wr[l] + wi[k] * wi[l]) * kc[k * n + l];
            }
            acc += (wr[k] * wr[k] + wi[k] * wi[k]) * kc[k * n + k];
        }
        acc / (PI * t * t * nf * nf)
    };
    let outer = quadrature_1d(g, lo, hi, tol / 2.0)?;

    // The coefficient mass multiplying each basis integral is O(1) after
    // integration over t (the w_k vanish linearly at t = 0 and are
    // bounded by 2), so the basis error bounds enter with a factor of
    // order max |x|.
    let mx = xs.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mass = (8.0 * mx / PI).max(4.0 / PI);

    Ok(EcfNorm {
        value: 2.0 * outer.value,
        cutoff,
        quadrature_error: 2.0 * outer.error_bound + mass * kc_err,
    })
}

/// Distance correlation made invariant under all nonsingular affine
/// maps of either sample: each sample is whitened by the inverse square
/// root of its sample covariance (divisor `n - 1`) and the ordinary
/// statistics with `alpha = 1` are computed on the transformed rows.
///
/// # Errors
///
/// A singular sample covariance (collinear coordinates, or fewer
/// observations than dimensions) surfaces as [`Error::Singular`]; the
/// usual remedy is to drop redundant coordinates first.
pub fn affine_dcor(x: &SampleMatrix, y: &SampleMatrix) -> Result<DcovResult> {
    let xw = whiten(x)?;
    let yw = whiten(y)?;
    dcov_stats(&xw, &yw, 1.0)
}

fn whiten(s: &SampleMatrix) -> Result<SampleMatrix> {
    let n = s.n_rows();
    let p = s.dim();
    if n < 2 {
        return Err(Error::Dimension(
            "whitening needs at least two observations".into(),
        ));
    }
    let mut mean = vec![0.0f64; p];
    for k in 0..n {
        for (m, v) in mean.iter_mut().zip(s.row(k)) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }

    let mut cov = vec![0.0f64; p * p];
    for k in 0..n {
        let row = s.row(k);
        for i in 0..p {
            let di = row[i] - mean[i];
            for j in i..p {
                cov[i * p + j] += di * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..p {
        for j in i..p {
            let v = cov[i * p + j] / (n - 1) as f64;
            cov[i * p + j] = v;
            cov[j * p + i] = v;
        }
    }

    let w = inv_sqrt(&cov, p)?;
    let mut out = vec![0.0f64; n * p];
    for k in 0..n {
        let row = s.row(k);
        for i in 0..p {
            let mut acc = 0.0;
            for j in 0..p {
                acc += w[i * p + j] * row[j];
            }
            out[k * p + i] = acc;
        }
    }
    SampleMatrix::new(out, n, p)
}

/// Computes the `alpha = 2` distance correlation and the absolute
/// sample Pearson correlation for a univariate pair. The two agree to
/// roundoff, which pins the exponent family to its classical boundary
/// case; returns `(distance value, |pearson|)` so callers can assert
/// the equality at whatever tolerance they need.
///
/// # Errors
///
/// Requires univariate samples of equal length `n >= 2`; a constant
/// sample leaves the correlation undefined and is reported as
/// degenerate input.
pub fn pearson_check(x: &SampleMatrix, y: &SampleMatrix) -> Result<(f64, f64)> {
    if x.dim() != 1 || y.dim() != 1 {
        return Err(Error::Dimension(
            "the Pearson comparison applies to univariate samples only".into(),
        ));
    }
    let n = check_pair(x, y)?;
    let nf = n as f64;

    let mean = |s: &SampleMatrix| -> f64 {
        let mut t = KahanSum::default();
        for k in 0..n {
            t.add(s.row(k)[0]);
        }
        t.value() / nf
    };
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = KahanSum::default();
    let mut syy = KahanSum::default();
    let mut sxy = KahanSum::default();
    for k in 0..n {
        let dx = x.row(k)[0] - mx;
        let dy = y.row(k)[0] - my;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let (sxx, syy, sxy) = (sxx.value(), syy.value(), sxy.value());
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate(
            "constant sample has undefined correlation".into(),
        ));
    }
    let pearson = sxy / (sxx * syy).sqrt();

    let stats = dcov_stats(x, y, 2.0)?;
    Ok((stats.r2.sqrt(), pearson.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
    }

    fn random_sample(n: usize, d: usize, seed: u64) -> SampleMatrix {
        let mut state = seed;
        let data: Vec<f64> = (0..n * d).map(|_| 4.0 * lcg(&mut state)).collect();
        SampleMatrix::new(data, n, d).unwrap()
    }

    #[test]
    fn weight_constant_reference_values() {
        let c11 = weight_constant(1, 1.0).unwrap();
        assert!((c11.value - PI).abs() < 1e-14);
        let c21 = weight_constant(2, 1.0).unwrap();
        assert!((c21.value - 2.0 * PI).abs() < 1e-13);
        let c1h = weight_constant(1, 0.5).unwrap();
        assert!((c1h.value - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn weight_constant_domain() {
        assert!(matches!(weight_constant(0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(weight_constant(1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(weight_constant(1, 2.0), Err(Error::Domain(_))));
        assert!(matches!(weight_constant(3, -0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn two_point_hand_example() {
        // x = y = (0, 1): the centered matrix is [[-1/2, 1/2], [1/2, -1/2]],
        // so V2 = 1/4 and the moment sums are S1 = 1/2, S2 = S3 = 1/4.
        let x = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        let y = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        let r = dcov_stats(&x, &y, 1.0).unwrap();
        assert!((r.v2_xy - 0.25).abs() < 1e-15);
        assert!((r.v2_x - 0.25).abs() < 1e-15);
        assert!((r.v2_y - 0.25).abs() < 1e-15);
        assert!((r.r2 - 1.0).abs() < 1e-15);
        assert!((r.s1 - 0.5).abs() < 1e-15);
        assert!((r.s2 - 0.25).abs() < 1e-15);
        assert!((r.s3 - 0.25).abs() < 1e-15);

        let (s1, s2, s3) = oracle_s_sums(&x, &y, 1.0).unwrap();
        assert!((s1 - 0.5).abs() < 1e-15);
        assert!((s2 - 0.25).abs() < 1e-15);
        assert!((s3 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_sample_has_zero_variance_and_r2() {
        let x = SampleMatrix::new(vec![3.5; 8], 4, 2).unwrap();
        let y = random_sample(4, 3, 7);
        let r = dcov_stats(&x, &y, 1.0).unwrap();
        assert_eq!(r.v2_x, 0.0);
        assert_eq!(r.v2_xy, 0.0);
        assert_eq!(r.r2, 0.0);
    }

    #[test]
    fn identical_samples_have_unit_r2() {
        let x = random_sample(10, 3, 11);
        let r = dcov_stats(&x, &x, 1.0).unwrap();
        assert!(r.r2 <= 1.0);
        assert!((r.r2 - 1.0).abs() < 1e-12);
        assert!((r.r() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let x = random_sample(5, 2, 1);
        let y = random_sample(6, 2, 2);
        assert!(matches!(dcov_stats(&x, &y, 1.0), Err(Error::Dimension(_))));
        let short = random_sample(1, 2, 3);
        assert!(matches!(
            dcov_stats(&short, &short, 1.0),
            Err(Error::Dimension(_))
        ));
        let x5 = random_sample(5, 2, 4);
        assert!(matches!(dcov_stats(&x5, &x5, 0.0), Err(Error::Domain(_))));
        assert!(matches!(dcov_stats(&x5, &x5, 2.5), Err(Error::Domain(_))));
        assert!(dcov_stats(&x5, &x5, 2.0).is_ok());
    }

    #[test]
    fn moment_sums_match_centered_path() {
        let alphas = [0.5, 1.0, 1.5, 2.0];
        for (i, &alpha) in alphas.iter().enumerate() {
            for rep in 0..5 {
                let seed = 100 + (i * 5 + rep) as u64;
                let x = random_sample(8, 1 + rep % 3, seed);
                let y = random_sample(8, 1 + (rep + 1) % 3, seed ^ 0xdead);
                let r = dcov_stats(&x, &y, alpha).unwrap();
                let tol = 1e-9 * r.s1.max(1.0);
                assert!((r.v2_xy - (r.s1 + r.s2 - 2.0 * r.s3)).abs() <= tol);

                let (s1, s2, s3) = oracle_s_sums(&x, &y, alpha).unwrap();
                assert!((r.s1 - s1).abs() <= 1e-10 * s1.max(1.0));
                assert!((r.s2 - s2).abs() <= 1e-10 * s2.max(1.0));
                assert!((r.s3 - s3).abs() <= 1e-10 * s3.max(1.0));
                assert!((r.v2_xy - (s1 + s2 - 2.0 * s3)).abs() <= tol);
            }
        }
    }

    #[test]
    fn pearson_agreement() {
        let xs = random_sample(30, 1, 42);
        let linear: Vec<f64> = (0..30).map(|k| 2.0 * xs.row(k)[0] + 3.0).collect();
        let y = SampleMatrix::from_column(&linear).unwrap();
        let (r, p) = pearson_check(&xs, &y).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((p - 1.0).abs() < 1e-12);

        let y2 = random_sample(30, 1, 43);
        let (r, p) = pearson_check(&xs, &y2).unwrap();
        assert!((r - p).abs() < 1e-12);

        let flat = SampleMatrix::from_column(&[1.0; 30]).unwrap();
        assert!(matches!(
            pearson_check(&xs, &flat),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn affine_matches_plain_in_one_dimension() {
        let x = random_sample(15, 1, 5);
        let y = random_sample(15, 1, 6);
        let plain = dcov_stats(&x, &y, 1.0).unwrap();
        let affine = affine_dcor(&x, &y).unwrap();
        assert!((plain.r2 - affine.r2).abs() < 1e-10);
    }

    #[test]
    fn affine_invariant_under_a_nonsingular_map() {
        let x = random_sample(20, 2, 8);
        let y = random_sample(20, 3, 9);
        let base = affine_dcor(&x, &y).unwrap();

        // A fixed shear plus shift applied to every row of x.
        let a = [1.0, 0.7, -0.3, 0.9];
        let mut data = Vec::with_capacity(40);
        for k in 0..20 {
            let r = x.row(k);
            data.push(a[0] * r[0] + a[1] * r[1] + 5.0);
            data.push(a[2] * r[0] + a[3] * r[1] - 2.0);
        }
        let xt = SampleMatrix::new(data, 20, 2).unwrap();
        let mapped = affine_dcor(&xt, &y).unwrap();
        assert!((base.r2 - mapped.r2).abs() < 1e-9);
    }

    #[test]
    fn affine_rejects_collinear_coordinates() {
        let mut data = Vec::with_capacity(24);
        let mut state = 77u64;
        for _ in 0..12 {
            let v = lcg(&mut state);
            data.push(v);
            data.push(2.0 * v);
        }
        let x = SampleMatrix::new(data, 12, 2).unwrap();
        let y = random_sample(12, 1, 78);
        assert!(matches!(
            affine_dcor(&x, &y),
            Err(Error::Singular { .. })
        ));
    }

    fn raw_ecf_integrand(xs: &[f64], ys: &[f64], t: f64, s: f64) -> f64 {
        let n = xs.len() as f64;
        let (mut jr, mut ji) = (0.0, 0.0);
        let (mut xr, mut xi) = (0.0, 0.0);
        let (mut yr, mut yi) = (0.0, 0.0);
        for (&xv, &yv) in xs.iter().zip(ys.iter()) {
            let (sx, cx) = (t * xv).sin_cos();
            let (sy, cy) = (s * yv).sin_cos();
            xr += cx;
            xi += sx;
            yr += cy;
            yi += sy;
            jr += cx * cy - sx * sy;
            ji += sx * cy + cx * sy;
        }
        let (jr, ji) = (jr / n, ji / n);
        let (xr, xi) = (xr / n, xi / n);
        let (yr, yi) = (yr / n, yi / n);
        let dr = jr - (xr * yr - xi * yi);
        let di = ji - (xr * yi + xi * yr);
        (dr * dr + di * di) / (PI * PI * t * t * s * s)
    }

    #[test]
    fn ecf_matches_two_point_product_form() {
        // For x = y = (0, 1) the integrand factorizes as
        // (1 - cos t)(1 - cos s) / (4 pi^2 t^2 s^2), so the truncated
        // integral is exactly (J / pi)^2 with J the one-dimensional
        // truncated integral of (1 - cos u) / u^2.
        let x = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        let y = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        let cutoff = 1e-2;
        let est = ecf_norm_oracle(&x, &y, cutoff, 1e-7).unwrap();
        let j = quadrature_1d(|u| (1.0 - u.cos()) / (u * u), cutoff, 1.0 / cutoff, 1e-10)
            .unwrap()
            .value;
        let expected = (j / PI) * (j / PI);
        assert!(
            (est.value - expected).abs() < 1e-6,
            "oracle {} vs product form {}",
            est.value,
            expected
        );
        // Still within truncation distance of the exact statistic 1/4.
        assert!((est.value - 0.25).abs() < 0.02);
    }

    #[test]
    fn ecf_matches_literal_nested_quadrature() {
        // An asymmetric three-point configuration, checked against the
        // direct nested integration of the raw integrand at a mild
        // cutoff where that brute-force pass is affordable.
        let xs = [0.0, 0.7, 1.9];
        let ys = [0.3, -0.4, 1.1];
        let x = SampleMatrix::from_column(&xs).unwrap();
        let y = SampleMatrix::from_column(&ys).unwrap();
        let cutoff = 0.1;
        let est = ecf_norm_oracle(&x, &y, cutoff, 1e-7).unwrap();

        let hi = 1.0 / cutoff;
        let outer = quadrature_1d(
            |t| {
                quadrature_1d(
                    |s| raw_ecf_integrand(&xs, &ys, t, s) + raw_ecf_integrand(&xs, &ys, t, -s),
                    cutoff,
                    hi,
                    1e-9,
                )
                .unwrap()
                .value
            },
            cutoff,
            hi,
            1e-8,
        )
        .unwrap();
        let reference = 2.0 * outer.value;
        assert!(
            (est.value - reference).abs() < 1e-5,
            "oracle {} vs nested reference {}",
            est.value,
            reference
        );
    }

    #[test]
    fn ecf_converges_toward_the_statistic() {
        let x = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        let y = SampleMatrix::from_column(&[0.0, 1.0]).unwrap();
        let v2 = dcov_stats(&x, &y, 1.0).unwrap().v2_xy;
        let coarse = ecf_norm_oracle(&x, &y, 1e-1, 1e-7).unwrap();
        let fine = ecf_norm_oracle(&x, &y, 1e-2, 1e-7).unwrap();
        let err_coarse = (coarse.value - v2).abs();
        let err_fine = (fine.value - v2).abs();
        assert!(err_fine < err_coarse);
        assert!(err_fine < 0.01);
    }

    #[test]
    fn ecf_input_validation() {
        let x1 = random_sample(4, 1, 3);
        let x2 = random_sample(4, 2, 3);
        let big = random_sample(7, 1, 3);
        assert!(matches!(
            ecf_norm_oracle(&x2, &x1, 1e-2, 1e-6),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ecf_norm_oracle(&big, &big, 1e-2, 1e-6),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ecf_norm_oracle(&x1, &x1, 1.5, 1e-6),
            Err(Error::Domain(_))
        ));
    }
}
