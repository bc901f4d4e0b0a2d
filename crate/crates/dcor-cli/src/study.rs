//! Experiment presets and the multi-worker study driver.
//!
//! The driver splits datasets across rayon workers. Each dataset's
//! draws come from a stream keyed by `(seed, n, dataset index)` alone
//! and rejection counts are plain sums, so the report is identical to
//! the sequential runner's output for any worker count.

use dcor::sim::{
    evaluate_dataset, summarize, validate_study_inputs, AlternativeSpec, PowerStudyReport,
    TestKind,
};
use dcor::Result;
use rayon::prelude::*;

/// Null designs matching the published Type-I error table panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Type1Preset {
    /// Multivariate normal, p = q = 5, rho = 0.
    Table1a,
    /// t(1) marginals, p = q = 5, rho = 0.
    Table1b,
    /// t(2) marginals, p = q = 5, rho = 0.
    Table1c,
    /// t(3) marginals, p = q = 5, rho = 0.
    Table1d,
}

impl Type1Preset {
    pub fn spec(self) -> AlternativeSpec {
        let spec = match self {
            Type1Preset::Table1a => AlternativeSpec::mvn_cross(5, 5, 0.0),
            Type1Preset::Table1b => AlternativeSpec::mvt_cross(5, 5, 0.0, 1.0),
            Type1Preset::Table1c => AlternativeSpec::mvt_cross(5, 5, 0.0, 2.0),
            Type1Preset::Table1d => AlternativeSpec::mvt_cross(5, 5, 0.0, 3.0),
        };
        spec.expect("preset specs are valid by construction")
    }

    /// The sample sizes the published table tabulates.
    pub fn full_grid(self) -> Vec<usize> {
        vec![25, 30, 35, 50, 70, 100]
    }
}

/// Dependent designs matching the published power figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PowerPreset {
    /// Multivariate normal, p = q = 5, every cross-covariance 0.1.
    Example1,
    /// As example1 with t(1) marginals.
    Example1b,
    /// As example1 with t(2) marginals.
    Example1c,
    /// As example1 with t(3) marginals.
    Example1d,
    /// Y = X * noise coordinatewise, p = 5.
    Example2,
    /// Y = log(X^2) coordinatewise, p = 5.
    Example3,
}

impl PowerPreset {
    pub fn spec(self) -> AlternativeSpec {
        let spec = match self {
            PowerPreset::Example1 => AlternativeSpec::mvn_cross(5, 5, 0.1),
            PowerPreset::Example1b => AlternativeSpec::mvt_cross(5, 5, 0.1, 1.0),
            PowerPreset::Example1c => AlternativeSpec::mvt_cross(5, 5, 0.1, 2.0),
            PowerPreset::Example1d => AlternativeSpec::mvt_cross(5, 5, 0.1, 3.0),
            PowerPreset::Example2 => AlternativeSpec::mult_noise(5),
            PowerPreset::Example3 => AlternativeSpec::log_square(5),
        };
        spec.expect("preset specs are valid by construction")
    }

    /// The sample-size grid of the corresponding figure.
    pub fn full_grid(self) -> Vec<usize> {
        let mut g: Vec<usize> = (25..=50).collect();
        g.extend((55..=100).step_by(5));
        match self {
            PowerPreset::Example3 => {}
            PowerPreset::Example2 => g.extend((110..=240).step_by(10)),
            _ => g.extend((110..=200).step_by(10)),
        }
        g
    }
}

/// The desk-scale grid used when `--full` is not given.
pub fn desk_grid() -> Vec<usize> {
    vec![25, 50, 100]
}

/// Run the study with datasets spread over rayon workers. Produces the
/// exact report `dcor::sim::run_study` would.
pub fn run_study_parallel(
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
        let zero = || vec![0usize; tests.len()];
        let counts = (0..num_tests as u64)
            .into_par_iter()
            .try_fold(zero, |mut acc, dataset| {
                let rejects =
                    evaluate_dataset(spec, n, dataset, tests, alpha, replicates, seed)?;
                for (a, r) in acc.iter_mut().zip(&rejects) {
                    *a += usize::from(*r);
                }
                Ok(acc)
            })
            .try_reduce(zero, |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                Ok(a)
            })?;
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

#[cfg(test)]
mod tests {
    use super::*;
    use dcor::sim::run_study;

    #[test]
    fn parallel_report_equals_sequential() {
        let spec = AlternativeSpec::mvn_cross(2, 2, 0.0).unwrap();
        let tests = [TestKind::DcovPermutation, TestKind::Wilks, TestKind::Sign];
        let seq = run_study(&spec, &[25, 30], &tests, 0.1, 120, Some(60), 99).unwrap();
        let par = run_study_parallel(&spec, &[25, 30], &tests, 0.1, 120, Some(60), 99).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn presets_are_valid_and_gridded() {
        for p in [
            Type1Preset::Table1a,
            Type1Preset::Table1b,
            Type1Preset::Table1c,
            Type1Preset::Table1d,
        ] {
            assert!(p.spec().validate().is_ok());
            assert_eq!(p.full_grid().first(), Some(&25));
        }
        assert_eq!(PowerPreset::Example2.full_grid().last(), Some(&240));
        assert_eq!(PowerPreset::Example3.full_grid().last(), Some(&100));
        assert_eq!(PowerPreset::Example1.full_grid().last(), Some(&200));
        assert_eq!(PowerPreset::Example1.spec().rho, 0.1);
    }
}
