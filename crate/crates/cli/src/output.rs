//! CSV row schemas and the writer behind every subcommand.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::io::{self, Write};

use diminishing::stats::{ProcessKind, ScaledSample};

use crate::{CliError, Result};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A row of one of the output tables.
pub trait OutputRecord {
    fn fields(&self) -> Vec<String>;
}

/// `(replica, value)` rows of the figure data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRecord {
    pub replica: u64,
    pub value: f64,
}

impl SampleRecord {
    pub fn header() -> Vec<String> {
        vec!["replica".into(), "value".into()]
    }
}

impl OutputRecord for SampleRecord {
    fn fields(&self) -> Vec<String> {
        vec![self.replica.to_string(), float(self.value)]
    }
}

/// Column names of the process-specific state.
pub fn state_columns(process: &ProcessKind) -> Vec<String> {
    fn indexed(name: &'static str, m: usize) -> impl Iterator<Item = String> {
        (0..m).map(move |i| format!("{name}_{i}"))
    }
    match *process {
        ProcessKind::Interval { .. } => vec!["center".into(), "radius".into()],
        ProcessKind::Cube { d } => indexed("center", d).chain(indexed("edge", d)).collect(),
        ProcessKind::Simplex { d } => std::iter::once("height".into())
            .chain(indexed("lambda", d + 1))
            .collect(),
        ProcessKind::Polygon { k } => std::iter::once("area".into())
            .chain(indexed("height", k))
            .collect(),
    }
}

/// One step of a single trajectory; `state` follows [`state_columns`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub replica: u64,
    pub step: u64,
    pub changed: bool,
    /// Largest height minus its limit.
    pub excess: f64,
    pub state: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn header(process: &ProcessKind) -> Vec<String> {
        let mut h: Vec<String> = ["replica", "step", "changed", "excess"]
            .map(String::from)
            .into();
        h.extend(state_columns(process));
        h
    }
}

impl OutputRecord for TrajectoryRecord {
    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.replica.to_string(),
            self.step.to_string(),
            u8::from(self.changed).to_string(),
            float(self.excess),
        ];
        f.extend(self.state.iter().map(|&x| float(x)));
        f
    }
}

/// Header of the experiment table: the scalar fields of a sample, the area
/// for polygons, and the center coordinates of the other processes.
pub fn experiment_header(process: &ProcessKind) -> Vec<String> {
    let mut h: Vec<String> = ["replica", "n", "value", "excess", "changes"]
        .map(String::from)
        .into();
    match *process {
        ProcessKind::Polygon { .. } => h.push("area".into()),
        ProcessKind::Interval { .. } => h.push("center".into()),
        ProcessKind::Cube { d } => h.extend((0..d).map(|i| format!("center_{i}"))),
        ProcessKind::Simplex { d } => h.extend((0..=d).map(|i| format!("lambda_{i}"))),
    }
    h
}

impl OutputRecord for ScaledSample {
    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.replica.to_string(),
            self.n.to_string(),
            float(self.value),
            float(self.excess),
            self.changes.to_string(),
        ];
        f.extend(self.area.iter().chain(&self.center).map(|&x| float(x)));
        f
    }
}

/// Streaming CSV writer that counts data rows.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    rows: usize,
}

impl<W: Write> CsvSink<W> {
    pub fn new(header: &[String], dest: W) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(dest);
        writer.write_record(header).map_err(|e| partial(0, e))?;
        Ok(Self { writer, rows: 0 })
    }

    pub fn push(&mut self, record: &impl OutputRecord) -> Result<()> {
        self.writer
            .write_record(record.fields())
            .map_err(|e| partial(self.rows, e))?;
        self.rows += 1;
        Ok(())
    }

    /// Flushes and returns the number of data rows.
    pub fn finish(mut self) -> Result<usize> {
        self.writer
            .flush()
            .map_err(|source| CliError::PartialWrite {
                rows: self.rows,
                source,
            })?;
        Ok(self.rows)
    }
}

fn partial(rows: usize, e: csv::Error) -> CliError {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    };
    CliError::PartialWrite { rows, source }
}

/// Writes the header and every record; returns the number of data rows.
pub fn emit_csv<'a, R, W>(
    header: &[String],
    records: impl IntoIterator<Item = &'a R>,
    dest: W,
) -> Result<usize>
where
    R: OutputRecord + 'a,
    W: Write,
{
    let mut sink = CsvSink::new(header, dest)?;
    for r in records {
        sink.push(r)?;
    }
    sink.finish()
}
