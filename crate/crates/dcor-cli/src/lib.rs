//! Library half of the `dcor` command: CSV ingestion, report
//! formatting, experiment presets, and the parallel study driver. The
//! binary in `main.rs` is a thin clap layer over these pieces, kept
//! separate so integration tests can drive them directly.

pub mod emit;
pub mod ingest;
pub mod study;

pub use emit::{Cell, Format, Table};
pub use ingest::{ingest_csv, parse_selectors, write_dataset_csv, ColumnSelector, Ingested};
pub use study::{run_study_parallel, PowerPreset, Type1Preset};
