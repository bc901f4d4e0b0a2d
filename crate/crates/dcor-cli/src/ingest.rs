//! CSV ingestion: column selection, header detection, missing-value
//! handling, and the dataset writer used for round-trip checks.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dcor::SampleMatrix;

/// One token of a `--x-cols` / `--y-cols` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    /// A single zero-based column index.
    Index(usize),
    /// A half-open index range `start..end`.
    Range(usize, usize),
    /// A header name, matched exactly after trimming.
    Name(String),
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Range(a, b) => write!(f, "{a}..{b}"),
            ColumnSelector::Name(n) => f.write_str(n),
        }
    }
}

/// Parse a comma-separated selector list: `0..2,5,weight`.
pub fn parse_selectors(arg: &str) -> Result<Vec<ColumnSelector>> {
    let mut out = Vec::new();
    for token in arg.split(',') {
        let token = token.trim();
        if token.is_empty() {
            bail!("empty column selector in {arg:?}");
        }
        if let Some((a, b)) = token.split_once("..") {
            let start: usize = a
                .trim()
                .parse()
                .with_context(|| format!("bad range start in {token:?}"))?;
            let end: usize = b
                .trim()
                .parse()
                .with_context(|| format!("bad range end in {token:?}"))?;
            if end <= start {
                bail!("empty range {token:?} (the end is exclusive)");
            }
            out.push(ColumnSelector::Range(start, end));
        } else if token.bytes().all(|b| b.is_ascii_digit()) {
            out.push(ColumnSelector::Index(token.parse()?));
        } else {
            out.push(ColumnSelector::Name(token.to_string()));
        }
    }
    Ok(out)
}

fn wants_header(selectors: &[ColumnSelector]) -> bool {
    selectors
        .iter()
        .any(|s| matches!(s, ColumnSelector::Name(_)))
}

fn resolve(
    selectors: &[ColumnSelector],
    header: Option<&[String]>,
    width: usize,
    which: &str,
) -> Result<Vec<usize>> {
    let mut cols = Vec::new();
    for sel in selectors {
        match sel {
            ColumnSelector::Index(i) => cols.push(*i),
            ColumnSelector::Range(a, b) => cols.extend(*a..*b),
            ColumnSelector::Name(name) => {
                let header = header.ok_or_else(|| {
                    anyhow!("column name {name:?} needs a header row, and none was found")
                })?;
                let idx = header
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| anyhow!("no column named {name:?} in the header"))?;
                cols.push(idx);
            }
        }
    }
    for &c in &cols {
        if c >= width {
            bail!("{which} column {c} out of range: the file has {width} columns");
        }
    }
    let mut seen = vec![false; width];
    for &c in &cols {
        if seen[c] {
            bail!("{which} columns select column {c} twice");
        }
        seen[c] = true;
    }
    if cols.is_empty() {
        bail!("{which} column set is empty");
    }
    Ok(cols)
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

/// The result of reading a dataset: the two samples plus bookkeeping
/// the report header echoes back.
pub struct Ingested {
    pub x: SampleMatrix,
    pub y: SampleMatrix,
    pub n: usize,
    /// Rows dropped because a selected cell was missing.
    pub dropped_rows: usize,
    pub had_header: bool,
}

/// Read `path` and split the selected columns into an X and a Y sample.
///
/// The first row is treated as a header when any selector is a name or
/// when any selected cell of that row fails to parse as a number. Rows
/// with a missing selected cell (empty, `na`, or `nan`, any case) are
/// dropped and counted; any other unparseable cell is an error naming
/// the row and column. The X and Y column sets must be disjoint.
pub fn ingest_csv(
    path: &Path,
    x_sel: &[ColumnSelector],
    y_sel: &[ColumnSelector],
) -> Result<Ingested> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(file);
    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec.with_context(|| format!("cannot read {}", path.display()))?);
    }
    if records.is_empty() {
        bail!("{} is empty", path.display());
    }
    let width = records[0].len();
    let first: Vec<String> = records[0].iter().map(|s| s.to_string()).collect();

    // A named selector forces the first row to be a header; otherwise
    // probe the first row at the positions index selectors can reach.
    let had_header = if wants_header(x_sel) || wants_header(y_sel) {
        true
    } else {
        let mut cols = resolve(x_sel, None, width, "x")?;
        cols.extend(resolve(y_sel, None, width, "y")?);
        cols.iter()
            .any(|&c| !is_missing(&first[c]) && first[c].trim().parse::<f64>().is_err())
    };

    let header_row: Option<Vec<String>> = had_header.then(|| first.clone());
    let x_cols = resolve(x_sel, header_row.as_deref(), width, "x")?;
    let y_cols = resolve(y_sel, header_row.as_deref(), width, "y")?;
    for c in &x_cols {
        if y_cols.contains(c) {
            bail!("x and y both select column {c}; the sets must be disjoint");
        }
    }

    let name_of = |c: usize| -> String {
        match &header_row {
            Some(h) => format!("{c} ({:?})", h[c].trim()),
            None => format!("{c}"),
        }
    };

    let mut x_data = Vec::new();
    let mut y_data = Vec::new();
    let mut dropped = 0usize;
    let data_rows = records.iter().enumerate().skip(usize::from(had_header));
    for (row_idx, rec) in data_rows {
        if rec.len() != width {
            bail!(
                "row {} has {} fields, expected {width}",
                row_idx + 1,
                rec.len()
            );
        }
        let mut parsed = Vec::with_capacity(x_cols.len() + y_cols.len());
        let mut missing = false;
        for &c in x_cols.iter().chain(&y_cols) {
            let cell = &rec[c];
            if is_missing(cell) {
                missing = true;
                break;
            }
            let v: f64 = cell.trim().parse().map_err(|_| {
                anyhow!(
                    "row {}, column {}: cannot parse {cell:?} as a number",
                    row_idx + 1,
                    name_of(c)
                )
            })?;
            if !v.is_finite() {
                bail!(
                    "row {}, column {}: {cell:?} is not finite",
                    row_idx + 1,
                    name_of(c)
                );
            }
            parsed.push(v);
        }
        if missing {
            dropped += 1;
            continue;
        }
        x_data.extend_from_slice(&parsed[..x_cols.len()]);
        y_data.extend_from_slice(&parsed[x_cols.len()..]);
    }

    let n = x_data.len() / x_cols.len();
    if n == 0 {
        bail!(
            "no usable rows in {} ({} dropped for missing values)",
            path.display(),
            dropped
        );
    }
    Ok(Ingested {
        x: SampleMatrix::new(x_data, n, x_cols.len())?,
        y: SampleMatrix::new(y_data, n, y_cols.len())?,
        n,
        dropped_rows: dropped,
        had_header,
    })
}

/// Write a dataset as CSV with `x0..`/`y0..` headers. Values use Rust's
/// shortest round-trip formatting, so re-ingesting reproduces every
/// float bit for bit.
pub fn write_dataset_csv(w: &mut dyn Write, x: &SampleMatrix, y: &SampleMatrix) -> Result<()> {
    let header: Vec<String> = (0..x.dim())
        .map(|k| format!("x{k}"))
        .chain((0..y.dim()).map(|k| format!("y{k}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for i in 0..x.n_rows() {
        let row: Vec<String> = x
            .row(i)
            .iter()
            .chain(y.row(i))
            .map(|v| format!("{v}"))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
