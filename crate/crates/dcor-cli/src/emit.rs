//! Report rendering. Every command produces a [`Table`]: a config echo
//! (so any report can be regenerated from its own header) plus named
//! columns and typed rows. Tables render as TSV with `#`-prefixed
//! config lines, or as a JSON object with `config` and `rows` fields.

use std::fmt::Write as _;

use dcor::sim::{PowerStudyReport, TestKind};
use serde_json::{json, Map, Value};

/// Output format selected by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

/// A single typed value in a report row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

/// A rendered-format-agnostic report.
pub struct Table {
    pub config: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            config: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.render_tsv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_tsv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}\t{v}");
        }
        let _ = writeln!(out, "{}", self.columns.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell_tsv).collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }

    fn render_json(&self) -> String {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.to_string(), cell_json(cell)))
                    .collect::<Map<_, _>>()
                    .into()
            })
            .collect();
        let doc = json!({ "config": config, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("report serialization")
    }
}

/// Format with 10 significant digits: plain decimal for moderate
/// exponents, scientific notation outside them.
pub fn sig10(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.9e}")
    }
}

fn cell_tsv(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => sig10(*v),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
        Cell::Empty => Value::Null,
    }
}

/// The benchmark tables' one-letter column labels.
pub fn test_label(test: TestKind) -> &'static str {
    match test {
        TestKind::DcovPermutation => "V",
        TestKind::DcovAsymptotic => "V_asym",
        TestKind::Wilks => "W",
        TestKind::Sign => "T",
        TestKind::Spearman => "S",
    }
}

/// Pivot a study report into one row per sample size with a rate column
/// per test, the layout the benchmark tables use.
pub fn study_table(report: &PowerStudyReport, tests: &[TestKind]) -> Table {
    let mut columns = vec!["n", "B"];
    columns.extend(tests.iter().map(|&t| test_label(t)));

    let mut table = Table::new(columns);
    table
        .config("alternative", format_spec(&report.alternative))
        .config("alpha", sig10(report.alpha))
        .config("num_tests", report.num_tests)
        .config("seed", report.seed)
        .config(
            "tests",
            tests
                .iter()
                .map(|t| t.name())
                .collect::<Vec<_>>()
                .join(","),
        );

    let mut grid: Vec<usize> = Vec::new();
    for row in &report.rows {
        if !grid.contains(&row.n) {
            grid.push(row.n);
        }
    }
    for n in grid {
        let at_n: Vec<_> = report.rows.iter().filter(|r| r.n == n).collect();
        let b = at_n
            .iter()
            .find_map(|r| r.replicates)
            .map_or(Cell::Empty, |b| Cell::Int(b as u64));
        let mut cells = vec![Cell::Int(n as u64), b];
        for &t in tests {
            let cell = at_n
                .iter()
                .find(|r| r.test == t)
                .map_or(Cell::Empty, |r| Cell::Num(r.rejection_rate));
            cells.push(cell);
        }
        table.row(cells);
    }
    table
}

fn format_spec(spec: &dcor::sim::AlternativeSpec) -> String {
    use dcor::sim::AltKind;
    match spec.kind {
        AltKind::MvnCross => format!("mvn_cross(p={}, q={}, rho={})", spec.p, spec.q, spec.rho),
        AltKind::MvtCross => format!(
            "mvt_cross(p={}, q={}, rho={}, df={}{})",
            spec.p,
            spec.q,
            spec.rho,
            spec.df,
            match spec.divisor {
                dcor::sim::DivisorMode::Shared => "",
                dcor::sim::DivisorMode::PerCoordinate => ", per-coordinate divisor",
            }
        ),
        AltKind::MultNoise => format!("mult_noise(p={})", spec.p),
        AltKind::LogSquare => format!("log_square(p={})", spec.p),
    }
}
