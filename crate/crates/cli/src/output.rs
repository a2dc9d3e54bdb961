use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes one JSON document.
pub fn json<T: Serialize>(value: &T, path: Option<&Path>) -> io::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

/// Writes a table as a JSON array or as CSV with a header row.
pub fn table<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> io::Result<()> {
    match format {
        Format::Json => json(&rows, path),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(path)?);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()
        }
    }
}
