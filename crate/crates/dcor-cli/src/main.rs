//! The `dcor` command: distance covariance statistics and independence
//! tests on CSV data, plus Monte Carlo study and theory-curve emission.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dcor::classical::{covariance_dispersion, sign_dispersion, spearman_dispersion};
use dcor::classical::bartlett_pvalue;
use dcor::dcov::{affine_dcor, dcov_stats};
use dcor::inference::{asymptotic_test, permutation_test};
use dcor::normal::normal_r2;
use dcor::sim::TestKind;
use dcor_cli::emit::{study_table, Cell, Format, Table};
use dcor_cli::ingest::{ingest_csv, parse_selectors, Ingested};
use dcor_cli::study::{desk_grid, run_study_parallel, PowerPreset, Type1Preset};

#[derive(Parser)]
#[command(
    name = "dcor",
    version,
    about = "Distance covariance statistics, independence tests, and Monte Carlo studies"
)]
struct Cli {
    /// Master seed for all randomized procedures.
    #[arg(long, global = true, env = "DCOR_SEED", default_value_t = 1729)]
    seed: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance covariance and correlation of two column sets.
    Stat(StatArgs),
    /// Test independence of two column sets.
    Test(TestArgs),
    /// Type-I error study on a null design.
    Type1(Type1Args),
    /// Power study against a dependent design.
    Power(PowerArgs),
    /// Population distance correlation curve of the bivariate normal.
    NormalCurve(CurveArgs),
}

#[derive(Args)]
struct InputArgs {
    /// CSV file to read.
    #[arg(long)]
    input: PathBuf,
    /// X columns: comma-separated indices, ranges (0..2), or header names.
    #[arg(long)]
    x_cols: String,
    /// Y columns, same grammar; must not overlap the X columns.
    #[arg(long)]
    y_cols: String,
}

#[derive(Args)]
struct StatArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Distance exponent in (0, 2].
    #[arg(long, default_value_t = 1.0)]
    alpha_exponent: f64,
    /// Whiten each sample before computing (affinely invariant variant).
    #[arg(long)]
    affine: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    DcovPerm,
    DcovAsymptotic,
    Wilks,
    Spearman,
    Sign,
}

impl Method {
    fn kind(self) -> TestKind {
        match self {
            Method::DcovPerm => TestKind::DcovPermutation,
            Method::DcovAsymptotic => TestKind::DcovAsymptotic,
            Method::Wilks => TestKind::Wilks,
            Method::Spearman => TestKind::Spearman,
            Method::Sign => TestKind::Sign,
        }
    }
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    method: Method,
    /// Significance level in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Permutation replicates; default floor(200 + 5000/n).
    #[arg(long)]
    replicates: Option<usize>,
    /// Exit with code 2 when the test rejects.
    #[arg(long)]
    exit_on_reject: bool,
}

#[derive(Args)]
struct StudyCommon {
    /// Sample sizes, comma separated. Default 25,50,100; with --full,
    /// the preset's published grid.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Datasets per cell. Default 2000; with --full, 10000.
    #[arg(long)]
    num_tests: Option<usize>,
    /// Run at the published scale: dense grid, 10000 datasets per cell.
    #[arg(long)]
    full: bool,
    /// Significance level in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Permutation replicates; default floor(200 + 5000/n).
    #[arg(long)]
    replicates: Option<usize>,
    /// Tests to run, comma separated. Default dcov-perm,wilks,sign,spearman.
    #[arg(long, value_enum, value_delimiter = ',')]
    tests: Option<Vec<Method>>,
}

#[derive(Args)]
struct Type1Args {
    #[arg(long, value_enum)]
    preset: Type1Preset,
    #[command(flatten)]
    common: StudyCommon,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, value_enum)]
    preset: PowerPreset,
    #[command(flatten)]
    common: StudyCommon,
}

#[derive(Args)]
struct CurveArgs {
    /// Smallest correlation on the grid.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    min: f64,
    /// Largest correlation on the grid.
    #[arg(long, default_value_t = 1.0)]
    max: f64,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let (table, code) = match &cli.command {
        Command::Stat(a) => (cmd_stat(a, cli.seed)?, ExitCode::SUCCESS),
        Command::Test(a) => {
            let (table, reject) = cmd_test(a, cli.seed)?;
            let code = if reject && a.exit_on_reject {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
            (table, code)
        }
        Command::Type1(a) => (
            cmd_study(
                "type1",
                preset_name(a.preset),
                a.preset.spec(),
                a.preset.full_grid(),
                &a.common,
                cli.seed,
            )?,
            ExitCode::SUCCESS,
        ),
        Command::Power(a) => (
            cmd_study(
                "power",
                preset_name(a.preset),
                a.preset.spec(),
                a.preset.full_grid(),
                &a.common,
                cli.seed,
            )?,
            ExitCode::SUCCESS,
        ),
        Command::NormalCurve(a) => (cmd_normal_curve(a, cli.seed)?, ExitCode::SUCCESS),
    };

    let rendered = table.render(cli.format);
    match &cli.output {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(code)
}

fn preset_name(p: impl clap::ValueEnum) -> String {
    p.to_possible_value().expect("presets are not skipped").get_name().to_string()
}

fn read_input(input: &InputArgs) -> Result<Ingested> {
    ingest_csv(
        &input.input,
        &parse_selectors(&input.x_cols)?,
        &parse_selectors(&input.y_cols)?,
    )
}

fn echo_input(table: &mut Table, a: &InputArgs, got: &Ingested, seed: u64) {
    table
        .config("input", a.input.display())
        .config("x_cols", &a.x_cols)
        .config("y_cols", &a.y_cols)
        .config("header_detected", got.had_header)
        .config("seed", seed);
}

fn cmd_stat(a: &StatArgs, seed: u64) -> Result<Table> {
    if !(a.alpha_exponent > 0.0 && a.alpha_exponent <= 2.0) {
        bail!("--alpha-exponent must lie in (0, 2], got {}", a.alpha_exponent);
    }
    if a.affine && a.alpha_exponent != 1.0 {
        bail!("--affine fixes the distance exponent at 1");
    }
    let got = read_input(&a.input)?;
    let r = if a.affine {
        affine_dcor(&got.x, &got.y)?
    } else {
        dcov_stats(&got.x, &got.y, a.alpha_exponent)?
    };

    let mut t = Table::new(vec![
        "n", "dropped_rows", "exponent", "v2", "dvar_x", "dvar_y", "r2", "v", "r", "s1", "s2",
        "s3",
    ]);
    t.config("command", "stat").config("affine", a.affine);
    echo_input(&mut t, &a.input, &got, seed);
    t.row(vec![
        got.n.into(),
        got.dropped_rows.into(),
        r.alpha.into(),
        r.v2_xy.into(),
        r.v2_x.into(),
        r.v2_y.into(),
        r.r2.into(),
        r.v().into(),
        r.r().into(),
        r.s1.into(),
        r.s2.into(),
        r.s3.into(),
    ]);
    Ok(t)
}

fn cmd_test(a: &TestArgs, seed: u64) -> Result<(Table, bool)> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        bail!("--alpha must lie in (0, 1), got {}", a.alpha);
    }
    let got = read_input(&a.input)?;
    let r2 = dcov_stats(&got.x, &got.y, 1.0)?.r2;

    let (statistic, p_value, threshold, reject, replicates) = match a.method {
        Method::DcovPerm => {
            let r = permutation_test(&got.x, &got.y, a.alpha, a.replicates, seed)?;
            (r.statistic, r.p_value, r.threshold, r.reject, r.replicates)
        }
        Method::DcovAsymptotic => {
            let r = asymptotic_test(&got.x, &got.y, a.alpha)?;
            (r.statistic, r.p_value, r.threshold, r.reject, r.replicates)
        }
        Method::Wilks | Method::Spearman | Method::Sign => {
            let decomp = match a.method {
                Method::Wilks => covariance_dispersion(&got.x, &got.y)?,
                Method::Spearman => spearman_dispersion(&got.x, &got.y)?,
                _ => sign_dispersion(&got.x, &got.y)?,
            };
            let (stat, p) = bartlett_pvalue(&decomp, got.n)?;
            (stat, Some(p), None, p <= a.alpha, None)
        }
    };

    let mut t = Table::new(vec![
        "method",
        "n",
        "dropped_rows",
        "statistic",
        "p_value",
        "threshold",
        "reject",
        "r2",
        "replicates",
        "seed",
    ]);
    t.config("command", "test")
        .config("method", a.method.kind().name())
        .config("alpha", a.alpha);
    echo_input(&mut t, &a.input, &got, seed);
    t.row(vec![
        Cell::Text(a.method.kind().name().to_string()),
        got.n.into(),
        got.dropped_rows.into(),
        statistic.into(),
        p_value.map_or(Cell::Empty, Cell::Num),
        threshold.map_or(Cell::Empty, Cell::Num),
        Cell::Bool(reject),
        r2.into(),
        replicates.map_or(Cell::Empty, |b| Cell::Int(b as u64)),
        Cell::Int(seed),
    ]);
    Ok((t, reject))
}

fn cmd_study(
    command: &str,
    preset: String,
    spec: dcor::sim::AlternativeSpec,
    full_grid: Vec<usize>,
    common: &StudyCommon,
    seed: u64,
) -> Result<Table> {
    let grid = match &common.n {
        Some(n) => n.clone(),
        None if common.full => full_grid,
        None => desk_grid(),
    };
    let num_tests = common
        .num_tests
        .unwrap_or(if common.full { 10_000 } else { 2_000 });
    let kinds: Vec<TestKind> = match &common.tests {
        Some(methods) => methods.iter().map(|m| m.kind()).collect(),
        None => vec![
            TestKind::DcovPermutation,
            TestKind::Wilks,
            TestKind::Sign,
            TestKind::Spearman,
        ],
    };

    let report = run_study_parallel(
        &spec,
        &grid,
        &kinds,
        common.alpha,
        num_tests,
        common.replicates,
        seed,
    )?;

    let mut t = study_table(&report, &kinds);
    t.config("command", command).config("preset", preset).config(
        "n_grid",
        grid.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
    );
    Ok(t)
}

fn cmd_normal_curve(a: &CurveArgs, seed: u64) -> Result<Table> {
    if !(a.step > 0.0) {
        bail!("--step must be positive, got {}", a.step);
    }
    if !(-1.0 <= a.min && a.min <= a.max && a.max <= 1.0) {
        bail!(
            "the grid must satisfy -1 <= min <= max <= 1, got [{}, {}]",
            a.min,
            a.max
        );
    }

    let mut t = Table::new(vec!["rho", "rho_sq", "r2"]);
    t.config("command", "normal-curve")
        .config("min", a.min)
        .config("max", a.max)
        .config("step", a.step)
        .config("seed", seed);

    let mut k = 0u64;
    loop {
        let raw = a.min + k as f64 * a.step;
        if raw > a.max + a.step * 1e-9 {
            break;
        }
        let rho = raw.clamp(-1.0, a.max.min(1.0));
        t.row(vec![rho.into(), (rho * rho).into(), normal_r2(rho)?.into()]);
        k += 1;
    }
    Ok(t)
}
