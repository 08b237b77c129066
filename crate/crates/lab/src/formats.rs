//! On-disk formats: CSV tables, NDJSON logs and binary PGM/PPM rasters.
//!
//! Reals in CSV are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`. Lines end in `\n`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use weierstrass_core::levelset::BoxCountRecord;
use weierstrass_core::raster::RasterImage;

use crate::error::{LabError, Result};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i128),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// An in-memory CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// CSV columns of a box-count table.
pub const BOX_COUNT_HEADER: [&str; 5] = ["m", "box_side", "count", "pruned", "certified"];

pub fn box_count_table(records: &[BoxCountRecord]) -> Table {
    let mut t = Table::new(&BOX_COUNT_HEADER);
    for r in records {
        t.push(vec![r.m.into(), r.box_side.into(), r.count.into(), r.pruned.into(), r.certified.into()]);
    }
    t
}

pub fn write_box_counts(records: &[BoxCountRecord]) -> Vec<u8> {
    box_count_table(records).to_bytes()
}

/// Parses the output of [`write_box_counts`].
pub fn parse_box_counts(bytes: &[u8]) -> Result<Vec<BoxCountRecord>> {
    let bad = |e: &dyn std::fmt::Display| LabError::Config(format!("box-count csv: {e}"));
    let mut r = csv::ReaderBuilder::new().from_reader(bytes);
    let header = r.headers().map_err(|e| bad(&e))?.clone();
    if header.iter().ne(BOX_COUNT_HEADER) {
        return Err(bad(&"unexpected header"));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(&"short row"));
        out.push(BoxCountRecord {
            m: field(0)?.parse().map_err(|e| bad(&e))?,
            box_side: field(1)?.parse().map_err(|e| bad(&e))?,
            count: field(2)?.parse().map_err(|e| bad(&e))?,
            pruned: field(3)?.parse().map_err(|e| bad(&e))?,
            certified: field(4)?.parse().map_err(|e| bad(&e))?,
        });
    }
    Ok(out)
}

/// One JSON object per line, keys in declaration order.
pub fn ndjson<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| LabError::Numeric(format!("serialize: {e}")))?;
        out.push(b'\n');
    }
    Ok(out)
}

pub fn write_pnm(path: &Path, image: &RasterImage) -> Result<()> {
    write_file(path, &image.to_pnm())
}

pub fn read_pnm(path: &Path) -> Result<RasterImage> {
    let bytes = fs::read(path).map_err(|e| LabError::io(path, e))?;
    RasterImage::from_pnm(&bytes).map_err(|e| LabError::io(path, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| LabError::io(Path::new("<stdout>"), e))
        }
    }
}
