//! Seeded data generation for the benchmark designs and the Monte
//! Carlo study runner behind the Type-I error and power tables.
//!
//! Everything here is driven by explicit `(master seed, stream id)`
//! pairs. A study never shares generator state between datasets: the
//! dataset at grid size `n` with index `i` always sees the same draws,
//! no matter which tests run on it, in what order, or on how many
//! workers. Rejection counts are therefore reproducible to the bit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, StandardNormal};

use crate::classical::{
    bartlett_pvalue, covariance_dispersion, sign_dispersion, spearman_dispersion,
};
use crate::distance::SampleMatrix;
use crate::error::{Error, Result};
use crate::inference::{asymptotic_test, permutation_test};

fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_state(master_seed: u64, stream: u64) -> u64 {
    let mut a = master_seed;
    let mut b = stream ^ 0x6A09_E667_F3BC_C909;
    splitmix_next(&mut a) ^ splitmix_next(&mut b)
}

/// A deterministic substream of `master_seed`. Distinct stream ids give
/// statistically independent generators; the same pair reproduces the
/// same sequence on every platform.
pub fn rng_stream(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut st = stream_state(master_seed, stream);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix_next(&mut st).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// A fresh 64-bit seed derived from `(master_seed, stream)`, for
/// handing to components that key their own substreams.
pub fn derived_seed(master_seed: u64, stream: u64) -> u64 {
    let mut st = stream_state(master_seed, stream);
    splitmix_next(&mut st)
}

/// Which benchmark design to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AltKind {
    /// Jointly normal blocks, every cross-covariance entry equal to rho.
    MvnCross,
    /// The same covariance fed through a multivariate t with `df`
    /// degrees of freedom.
    MvtCross,
    /// `Y = X * noise` coordinatewise: uncorrelated but dependent.
    MultNoise,
    /// `Y = log(X^2)` coordinatewise: a deterministic, nonmonotone map.
    LogSquare,
}

/// How the chi-square divisor is attached in the `MvtCross` design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DivisorMode {
    /// One divisor per observation: the usual multivariate t. Under
    /// independence (`rho = 0`) each block still gets its own divisor,
    /// otherwise the shared scale would couple X and Y.
    Shared,
    /// One divisor per coordinate: independent t marginals joined by
    /// the normal copula. Kept for sensitivity checks.
    PerCoordinate,
}

/// A fully specified benchmark design.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AlternativeSpec {
    pub kind: AltKind,
    pub p: usize,
    pub q: usize,
    /// Cross-correlation; used by `MvnCross` and `MvtCross`.
    pub rho: f64,
    /// Degrees of freedom; used by `MvtCross`.
    pub df: f64,
    pub divisor: DivisorMode,
}

impl AlternativeSpec {
    pub fn mvn_cross(p: usize, q: usize, rho: f64) -> Result<Self> {
        let spec = AlternativeSpec {
            kind: AltKind::MvnCross,
            p,
            q,
            rho,
            df: 0.0,
            divisor: DivisorMode::Shared,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mvt_cross(p: usize, q: usize, rho: f64, df: f64) -> Result<Self> {
        let spec = AlternativeSpec {
            kind: AltKind::MvtCross,
            p,
            q,
            rho,
            df,
            divisor: DivisorMode::Shared,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn mult_noise(p: usize) -> Result<Self> {
        let spec = AlternativeSpec {
            kind: AltKind::MultNoise,
            p,
            q: p,
            rho: 0.0,
            df: 0.0,
            divisor: DivisorMode::Shared,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn log_square(p: usize) -> Result<Self> {
        let spec = AlternativeSpec {
            kind: AltKind::LogSquare,
            p,
            q: p,
            rho: 0.0,
            df: 0.0,
            divisor: DivisorMode::Shared,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::Config("dimensions must be at least 1".into()));
        }
        match self.kind {
            AltKind::MvnCross | AltKind::MvtCross => {
                if !self.rho.is_finite() {
                    return Err(Error::Config(format!("rho must be finite, got {}", self.rho)));
                }
                let bound = 1.0 / ((self.p * self.q) as f64).sqrt();
                if self.rho.abs() >= bound {
                    return Err(Error::Config(format!(
                        "cross covariance is not positive definite: \
                         need |rho| < 1/sqrt(p q) = {bound}, got {}",
                        self.rho
                    )));
                }
                if self.kind == AltKind::MvtCross && !(self.df >= 1.0) {
                    return Err(Error::Config(format!(
                        "degrees of freedom must be at least 1, got {}",
                        self.df
                    )));
                }
            }
            AltKind::MultNoise | AltKind::LogSquare => {
                if self.p != self.q {
                    return Err(Error::Config(
                        "coordinatewise designs need q = p".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn cross_cholesky(&self) -> Result<Vec<f64>> {
        let d = self.p + self.q;
        let mut cov = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] = if i == j {
                    1.0
                } else if (i < self.p) != (j < self.p) {
                    self.rho
                } else {
                    0.0
                };
            }
        }
        crate::numerics::cholesky(&cov, d)
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn positive_chi2(dist: &ChiSquared<f64>, rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let w: f64 = rng.sample(*dist);
        if w > 0.0 {
            return w;
        }
    }
}

/// Draw one dataset of `n` observations from the design, consuming the
/// given stream. The two returned samples are `n x p` and `n x q`.
pub fn gen_alternative(
    spec: &AlternativeSpec,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(SampleMatrix, SampleMatrix)> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::Dimension(format!("need n >= 2 observations, got {n}")));
    }
    let (p, q) = (spec.p, spec.q);
    let mut x = Vec::with_capacity(n * p);
    let mut y = Vec::with_capacity(n * q);

    match spec.kind {
        AltKind::MvnCross => {
            let l = spec.cross_cholesky()?;
            let mut z = vec![0.0; p + q];
            for _ in 0..n {
                draw_correlated(&l, p + q, rng, &mut z);
                x.extend_from_slice(&z[..p]);
                y.extend_from_slice(&z[p..]);
            }
        }
        AltKind::MvtCross => {
            let l = spec.cross_cholesky()?;
            let chi2 = ChiSquared::new(spec.df).map_err(|e| {
                Error::Config(format!("chi-square divisor with df = {}: {e}", spec.df))
            })?;
            let d = p + q;
            let mut z = vec![0.0; d];
            for _ in 0..n {
                draw_correlated(&l, d, rng, &mut z);
                match spec.divisor {
                    DivisorMode::Shared if spec.rho != 0.0 => {
                        let s = (spec.df / positive_chi2(&chi2, rng)).sqrt();
                        for v in z.iter_mut() {
                            *v *= s;
                        }
                    }
                    DivisorMode::Shared => {
                        let sx = (spec.df / positive_chi2(&chi2, rng)).sqrt();
                        let sy = (spec.df / positive_chi2(&chi2, rng)).sqrt();
                        for v in z[..p].iter_mut() {
                            *v *= sx;
                        }
                        for v in z[p..].iter_mut() {
                            *v *= sy;
                        }
                    }
                    DivisorMode::PerCoordinate => {
                        for v in z.iter_mut() {
                            *v *= (spec.df / positive_chi2(&chi2, rng)).sqrt();
                        }
                    }
                }
                x.extend_from_slice(&z[..p]);
                y.extend_from_slice(&z[p..]);
            }
        }
        AltKind::MultNoise => {
            for _ in 0..n {
                for _ in 0..p {
                    let v = standard_normal(rng);
                    x.push(v);
                    y.push(v * standard_normal(rng));
                }
            }
        }
        AltKind::LogSquare => {
            for _ in 0..n {
                for _ in 0..p {
                    let v = loop {
                        let v = standard_normal(rng);
                        if v != 0.0 {
                            break v;
                        }
                    };
                    x.push(v);
                    y.push((v * v).ln());
                }
            }
        }
    }

    Ok((SampleMatrix::new(x, n, p)?, SampleMatrix::new(y, n, q)?))
}

fn draw_correlated(l: &[f64], d: usize, rng: &mut ChaCha8Rng, z: &mut [f64]) {
    for v in z.iter_mut() {
        *v = standard_normal(rng);
    }
    // In-place lower-triangular multiply, last row first so untouched
    // entries are still the raw draws.
    for i in (0..d).rev() {
        let mut acc = 0.0;
        for (j, zj) in z[..=i].iter().enumerate() {
            acc += l[i * d + j] * zj;
        }
        z[i] = acc;
    }
}

/// The tests a study can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TestKind {
    DcovPermutation,
    DcovAsymptotic,
    Wilks,
    Spearman,
    Sign,
}

impl TestKind {
    pub const ALL: [TestKind; 5] = [
        TestKind::DcovPermutation,
        TestKind::DcovAsymptotic,
        TestKind::Wilks,
        TestKind::Spearman,
        TestKind::Sign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::DcovPermutation => "dcov_perm",
            TestKind::DcovAsymptotic => "dcov_asymptotic",
            TestKind::Wilks => "wilks",
            TestKind::Spearman => "spearman",
            TestKind::Sign => "sign",
        }
    }
}

impl core::fmt::Display for TestKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// One cell of a study: a sample size, a test, and its rejection rate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StudyRow {
    pub n: usize,
    pub test: TestKind,
    pub rejection_rate: f64,
    /// Binomial standard error `sqrt(r (1 - r) / num_tests)`.
    pub mc_std_error: f64,
    pub num_tests: usize,
    /// Permutation replicates per test, for the permutation rows.
    pub replicates: Option<usize>,
}

/// A completed study with its full configuration echoed back.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PowerStudyReport {
    pub alternative: AlternativeSpec,
    pub alpha: f64,
    pub seed: u64,
    pub num_tests: usize,
    pub rows: Vec<StudyRow>,
}

fn with_context(e: Error, ctx: &str) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
        Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
        Error::Dimension(m) => Error::Dimension(format!("{ctx}: {m}")),
        Error::NonFinite(m) => Error::NonFinite(format!("{ctx}: {m}")),
        Error::Degenerate(m) => Error::Degenerate(format!("{ctx}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{ctx}: {m}")),
        other => other,
    }
}

fn dataset_stream_id(n: usize, dataset: u64) -> u64 {
    debug_assert!(dataset < 1 << 40);
    ((n as u64) << 40) | dataset
}

/// Run every requested test on the dataset `(n, dataset)` of a study
/// keyed by `seed`, returning one reject flag per test. The dataset is
/// generated from a stream derived from `(seed, n, dataset)` alone, so
/// any partition of the datasets over workers sees identical data.
pub fn evaluate_dataset(
    spec: &AlternativeSpec,
    n: usize,
    dataset: u64,
    tests: &[TestKind],
    alpha: f64,
    replicates: Option<usize>,
    seed: u64,
) -> Result<Vec<bool>> {
    let id = dataset_stream_id(n, dataset);
    let mut rng = rng_stream(seed, id);
    let ctx = format!("n = {n}, dataset {dataset}");
    let (x, y) = gen_alternative(spec, n, &mut rng).map_err(|e| with_context(e, &ctx))?;

    let mut rejects = Vec::with_capacity(tests.len());
    for &test in tests {
        let ctx = format!("{ctx}, test {test}");
        let reject = match test {
            TestKind::DcovPermutation => {
                let perm_seed = derived_seed(seed, (1 << 63) | id);
                permutation_test(&x, &y, alpha, replicates, perm_seed)
                    .map_err(|e| with_context(e, &ctx))?
                    .reject
            }
            TestKind::DcovAsymptotic => {
                asymptotic_test(&x, &y, alpha)
                    .map_err(|e| with_context(e, &ctx))?
                    .reject
            }
            TestKind::Wilks => {
                let decomp = covariance_dispersion(&x, &y).map_err(|e| with_context(e, &ctx))?;
                let (_, p_value) =
                    bartlett_pvalue(&decomp, n).map_err(|e| with_context(e, &ctx))?;
                p_value <= alpha
            }
            TestKind::Spearman => {
                let decomp = spearman_dispersion(&x, &y).map_err(|e| with_context(e, &ctx))?;
                let (_, p_value) =
                    bartlett_pvalue(&decomp, n).map_err(|e| with_context(e, &ctx))?;
                p_value <= alpha
            }
            TestKind::Sign => {
                let decomp = sign_dispersion(&x, &y).map_err(|e| with_context(e, &ctx))?;
                let (_, p_value) =
                    bartlett_pvalue(&decomp, n).map_err(|e| with_context(e, &ctx))?;
                p_value <= alpha
            }
        };
        rejects.push(reject);
    }
    Ok(rejects)
}

/// Run the full study sequentially: `num_tests` datasets per grid size,
/// every test on every dataset.
///
/// `replicates` overrides the permutation default of
/// `floor(200 + 5000/n)` when given.
///
/// # Errors
///
/// Fewer than 100 datasets, an empty grid, or an empty test list is a
/// configuration error; failures inside the study carry the offending
/// `(n, test, dataset)` in their message.
pub fn run_study(
    spec: &AlternativeSpec,
    n_grid: &[usize],
    tests: &[TestKind],
    alpha: f64,
    num_tests: usize,
    replicates: Option<usize>,
    seed: u64,
) -> Result<PowerStudyReport> {
    validate_study_inputs(spec, n_grid, tests, alpha, num_tests)?;

    let mut rows = Vec::with_capacity(n_grid.len() * tests.len());
    for &n in n_grid {
        let mut counts = vec![0usize; tests.len()];
        for dataset in 0..num_tests as u64 {
            let rejects = evaluate_dataset(spec, n, dataset, tests, alpha, replicates, seed)?;
            for (c, r) in counts.iter_mut().zip(&rejects) {
                *c += usize::from(*r);
            }
        }
        rows.extend(summarize(n, tests, &counts, num_tests, replicates));
    }

    Ok(PowerStudyReport {
        alternative: *spec,
        alpha,
        seed,
        num_tests,
        rows,
    })
}

/// The up-front checks shared by [`run_study`] and any parallel
/// frontend driving [`evaluate_dataset`] itself.
pub fn validate_study_inputs(
    spec: &AlternativeSpec,
    n_grid: &[usize],
    tests: &[TestKind],
    alpha: f64,
    num_tests: usize,
) -> Result<()> {
    spec.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "significance level must lie in (0, 1), got {alpha}"
        )));
    }
    if num_tests < 100 {
        return Err(Error::Config(format!(
            "need at least 100 datasets per cell for a meaningful rate, got {num_tests}"
        )));
    }
    if n_grid.is_empty() || tests.is_empty() {
        return Err(Error::Config("empty sample-size grid or test list".into()));
    }
    Ok(())
}

/// Turn per-test rejection counts for one grid size into report rows.
/// Shared by the sequential runner and any parallel frontend so both
/// produce identical reports from identical counts.
pub fn summarize(
    n: usize,
    tests: &[TestKind],
    counts: &[usize],
    num_tests: usize,
    replicates: Option<usize>,
) -> Vec<StudyRow> {
    tests
        .iter()
        .zip(counts)
        .map(|(&test, &count)| {
            let rate = count as f64 / num_tests as f64;
            StudyRow {
                n,
                test,
                rejection_rate: rate,
                mc_std_error: (rate * (1.0 - rate) / num_tests as f64).sqrt(),
                num_tests,
                replicates: match test {
                    TestKind::DcovPermutation => {
                        Some(replicates.unwrap_or_else(|| crate::inference::auto_replicates(n)))
                    }
                    _ => None,
                },
            }
        })
        .collect()
}

/// The dense grid used by the original study:
/// 25..50 by 1, 55..100 by 5, 110..200 by 10.
pub fn full_grid() -> Vec<usize> {
    let mut g: Vec<usize> = (25..=50).collect();
    g.extend((55..=100).step_by(5));
    g.extend((110..=200).step_by(10));
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcov::dcov_stats;

    #[test]
    fn streams_are_deterministic() {
        let mut a = rng_stream(99, 7);
        let mut b = rng_stream(99, 7);
        for _ in 0..1000 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
        let mut c = rng_stream(99, 8);
        assert_ne!(a.random::<u64>(), c.random::<u64>());
        assert_ne!(derived_seed(99, 7), derived_seed(99, 8));
    }

    #[test]
    fn sibling_streams_pass_a_ks_check() {
        let m = 10_000;
        let draw = |id: u64| {
            let mut rng = rng_stream(5, id);
            let mut v: Vec<f64> = (0..m).map(|_| rng.random()).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let a = draw(0);
        let b = draw(1);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < m && j < m {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / m as f64 - j as f64 / m as f64).abs());
        }
        // Level 0.001 two-sample threshold: sqrt(ln(2/a)/2) * sqrt(2/m).
        let crit = ((2.0f64 / 0.001).ln() / 2.0).sqrt() * (2.0 / m as f64).sqrt();
        assert!(d < crit, "KS distance {d} exceeds {crit}");
    }

    #[test]
    fn uniform_mean_is_centered() {
        let mut rng = rng_stream(11, 0);
        let mean = (0..100_000).map(|_| rng.random::<f64>()).sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn cross_design_validation() {
        assert!(matches!(
            AlternativeSpec::mvn_cross(5, 5, 0.2),
            Err(Error::Config(_))
        ));
        assert!(AlternativeSpec::mvn_cross(5, 5, 0.19).is_ok());
        assert!(matches!(
            AlternativeSpec::mvt_cross(1, 1, 0.0, 0.5),
            Err(Error::Config(_))
        ));
        assert!(AlternativeSpec::mvt_cross(1, 1, 0.0, 1.0).is_ok());
        assert!(matches!(
            AlternativeSpec::mvn_cross(0, 1, 0.0),
            Err(Error::Config(_))
        ));
    }

    fn cross_covariance(x: &SampleMatrix, y: &SampleMatrix, k: usize, l: usize) -> f64 {
        let n = x.n_rows();
        let mx = (0..n).map(|i| x.row(i)[k]).sum::<f64>() / n as f64;
        let my = (0..n).map(|i| y.row(i)[l]).sum::<f64>() / n as f64;
        (0..n)
            .map(|i| (x.row(i)[k] - mx) * (y.row(i)[l] - my))
            .sum::<f64>()
            / (n - 1) as f64
    }

    #[test]
    fn mvn_cross_has_the_requested_covariance() {
        let n = 10_000;
        let band = 3.0 / (n as f64).sqrt();

        let spec = AlternativeSpec::mvn_cross(5, 5, 0.1).unwrap();
        let mut rng = rng_stream(21, 0);
        let (x, y) = gen_alternative(&spec, n, &mut rng).unwrap();
        for k in 0..5 {
            for l in 0..5 {
                let c = cross_covariance(&x, &y, k, l);
                assert!((c - 0.1).abs() < band, "entry ({k},{l}) = {c}");
            }
        }

        let null = AlternativeSpec::mvn_cross(2, 2, 0.0).unwrap();
        let mut rng = rng_stream(21, 1);
        let (x, y) = gen_alternative(&null, n, &mut rng).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert!(cross_covariance(&x, &y, k, l).abs() < band);
            }
        }
    }

    #[test]
    fn mvn_marginals_are_standard() {
        let n = 100_000;
        let spec = AlternativeSpec::mvn_cross(2, 3, 0.15).unwrap();
        let mut rng = rng_stream(33, 0);
        let (x, _) = gen_alternative(&spec, n, &mut rng).unwrap();
        let mean = (0..n).map(|i| x.row(i)[0]).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (x.row(i)[0] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "var {var}");
    }

    #[test]
    fn mvt_preserves_cross_correlation_when_df_allows() {
        let n = 10_000;
        let spec = AlternativeSpec::mvt_cross(1, 1, 0.3, 5.0).unwrap();
        let mut rng = rng_stream(44, 0);
        let (x, y) = gen_alternative(&spec, n, &mut rng).unwrap();
        let cxy = cross_covariance(&x, &y, 0, 0);
        let cx = cross_covariance(&x, &x, 0, 0);
        let cy = cross_covariance(&y, &y, 0, 0);
        let corr = cxy / (cx * cy).sqrt();
        assert!((corr - 0.3).abs() < 0.05, "corr {corr}");
    }

    #[test]
    fn heavy_tailed_null_keeps_blocks_independent() {
        // df = 1 is Cauchy; check the location via the median and the
        // independence via the correlation of bounded transforms.
        let n = 10_000;
        let spec = AlternativeSpec::mvt_cross(1, 1, 0.0, 1.0).unwrap();
        let mut rng = rng_stream(55, 0);
        let (x, y) = gen_alternative(&spec, n, &mut rng).unwrap();
        let mut xs: Vec<f64> = (0..n).map(|i| x.row(i)[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = xs[n / 2];
        // Cauchy sample median has asymptotic sd (pi/2)/sqrt(n).
        assert!(med.abs() < 3.0 * 1.5708 / (n as f64).sqrt(), "median {med}");

        let gx = SampleMatrix::from_column(
            &(0..n).map(|i| x.row(i)[0].atan()).collect::<Vec<_>>(),
        )
        .unwrap();
        let gy = SampleMatrix::from_column(
            &(0..n).map(|i| y.row(i)[0].atan()).collect::<Vec<_>>(),
        )
        .unwrap();
        let corr = cross_covariance(&gx, &gy, 0, 0)
            / (cross_covariance(&gx, &gx, 0, 0) * cross_covariance(&gy, &gy, 0, 0)).sqrt();
        assert!(corr.abs() < 0.04, "corr of transforms {corr}");
    }

    #[test]
    fn per_coordinate_divisor_is_a_distinct_design() {
        let spec = AlternativeSpec {
            divisor: DivisorMode::PerCoordinate,
            ..AlternativeSpec::mvt_cross(2, 2, 0.1, 3.0).unwrap()
        };
        let mut rng = rng_stream(66, 0);
        let (x, y) = gen_alternative(&spec, 500, &mut rng).unwrap();
        assert_eq!(x.n_rows(), 500);
        assert_eq!(y.dim(), 2);
        let mut rng2 = rng_stream(66, 0);
        let shared = AlternativeSpec::mvt_cross(2, 2, 0.1, 3.0).unwrap();
        let (xs, _) = gen_alternative(&shared, 500, &mut rng2).unwrap();
        assert_ne!(x.data(), xs.data());
    }

    #[test]
    fn mult_noise_is_uncorrelated_but_dependent() {
        let n = 10_000;
        let spec = AlternativeSpec::mult_noise(1).unwrap();
        let mut rng = rng_stream(77, 0);
        let (x, y) = gen_alternative(&spec, n, &mut rng).unwrap();
        let corr = cross_covariance(&x, &y, 0, 0)
            / (cross_covariance(&x, &x, 0, 0) * cross_covariance(&y, &y, 0, 0)).sqrt();
        assert!(corr.abs() < 0.05, "corr {corr}");
        let vy = cross_covariance(&y, &y, 0, 0);
        assert!((vy - 1.0).abs() < 0.15, "Var Y {vy}");
    }

    #[test]
    fn log_square_kills_correlation_but_not_dependence() {
        let n = 10_000;
        let spec = AlternativeSpec::log_square(1).unwrap();
        let mut rng = rng_stream(88, 0);
        let (x, y) = gen_alternative(&spec, n, &mut rng).unwrap();
        let corr = cross_covariance(&x, &y, 0, 0)
            / (cross_covariance(&x, &x, 0, 0) * cross_covariance(&y, &y, 0, 0)).sqrt();
        assert!(corr.abs() < 0.05, "corr {corr}");

        let mut rng = rng_stream(88, 1);
        let (xs, ys) = gen_alternative(&spec, 100, &mut rng).unwrap();
        let r = dcov_stats(&xs, &ys, 1.0).unwrap().r();
        assert!(r > 0.2, "distance correlation {r}");
    }

    #[test]
    fn study_runner_echoes_config_and_reproduces() {
        let spec = AlternativeSpec::mvn_cross(1, 1, 0.0).unwrap();
        let report = run_study(&spec, &[25], &TestKind::ALL, 0.1, 100, None, 2024).unwrap();
        assert_eq!(report.rows.len(), 5);
        assert_eq!(report.alpha, 0.1);
        assert_eq!(report.seed, 2024);
        for row in &report.rows {
            assert!(row.rejection_rate >= 0.0 && row.rejection_rate <= 1.0);
            let se = (row.rejection_rate * (1.0 - row.rejection_rate) / 100.0).sqrt();
            assert_eq!(row.mc_std_error, se);
            assert_eq!(row.num_tests, 100);
            // Null data at level 0.1: the rate should at least be loosely
            // calibrated even with only 100 datasets.
            assert!(row.rejection_rate <= 0.25, "{}: {}", row.test, row.rejection_rate);
            match row.test {
                TestKind::DcovPermutation => assert_eq!(row.replicates, Some(400)),
                _ => assert_eq!(row.replicates, None),
            }
        }
        let again = run_study(&spec, &[25], &TestKind::ALL, 0.1, 100, None, 2024).unwrap();
        assert_eq!(report, again);

        assert!(matches!(
            run_study(&spec, &[25], &TestKind::ALL, 0.1, 99, None, 1),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            run_study(&spec, &[], &TestKind::ALL, 0.1, 100, None, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn dataset_errors_carry_their_coordinates() {
        let spec = AlternativeSpec::mvn_cross(1, 1, 0.0).unwrap();
        let err = evaluate_dataset(&spec, 25, 3, &[TestKind::DcovPermutation], 1.5, None, 1)
            .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("n = 25") && msg.contains("dataset 3"), "{msg}");
    }

    #[test]
    fn full_grid_matches_the_published_layout() {
        let g = full_grid();
        assert_eq!(g.first(), Some(&25));
        assert_eq!(g.last(), Some(&200));
        assert_eq!(g.len(), 26 + 10 + 10);
        assert!(g.contains(&55) && g.contains(&100) && g.contains(&110));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
