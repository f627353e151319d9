//! CSV observation files.
//!
//! Header columns: `n`, `metric` and `value` are required; `m`, `std` and
//! `replicates` are optional. `metric` is `accuracy` or `error`; `value` is
//! a fraction or a percentage with a trailing `%`. Lines starting with `#`
//! are comments. Output always uses `metric=error` and bare fractions.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Terminator, Trim, WriterBuilder};

use crate::error::{Error, Result};
use crate::types::{error_from_accuracy, validate_points, ObservationPoint, ObservationSet};

const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");

/// Names accepted by [`builtin_fixture`].
pub const FIXTURES: &[&str] = &["table1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    N,
    M,
    Metric,
    Value,
    Std,
    Replicates,
}

impl Column {
    fn parse(name: &str) -> Option<Column> {
        Some(match name.to_ascii_lowercase().as_str() {
            "n" => Column::N,
            "m" => Column::M,
            "metric" => Column::Metric,
            "value" => Column::Value,
            "std" => Column::Std,
            "replicates" => Column::Replicates,
            _ => return None,
        })
    }
}

struct Layout {
    columns: Vec<Column>,
}

impl Layout {
    fn from_header(header: &StringRecord) -> Result<Layout> {
        let mut columns = Vec::with_capacity(header.len());
        for name in header {
            let col = Column::parse(name).ok_or_else(|| Error::UnknownColumn {
                column: name.to_string(),
            })?;
            if columns.contains(&col) {
                return Err(Error::Validation(format!("duplicate column `{name}`")));
            }
            columns.push(col);
        }
        for (required, name) in [
            (Column::N, "n"),
            (Column::Metric, "metric"),
            (Column::Value, "value"),
        ] {
            if !columns.contains(&required) {
                return Err(Error::MissingColumn {
                    column: name.to_string(),
                });
            }
        }
        Ok(Layout { columns })
    }

    fn field<'r>(&self, record: &'r StringRecord, col: Column) -> Option<&'r str> {
        let idx = self.columns.iter().position(|&c| c == col)?;
        record.get(idx).filter(|s| !s.is_empty())
    }
}

fn parse_number(text: &str, row: usize, what: &str) -> Result<f64> {
    text.parse::<f64>().map_err(|_| Error::Parse {
        row,
        message: format!("cannot parse {what} `{text}` as a number"),
    })
}

/// Accepts `0.3767` or `37.67%`.
fn parse_fraction(text: &str, row: usize, what: &str) -> Result<f64> {
    match text.strip_suffix('%') {
        Some(pct) => Ok(parse_number(pct.trim_end(), row, what)? / 100.0),
        None => parse_number(text, row, what),
    }
}

fn parse_size(text: &str, row: usize, what: &str) -> Result<f64> {
    let v = parse_number(text, row, what)?;
    if v >= 1.0 && v.is_finite() && v.fract() == 0.0 {
        Ok(v)
    } else {
        Err(Error::Parse {
            row,
            message: format!("{what} must be a positive integer, got `{text}`"),
        })
    }
}

fn parse_row(layout: &Layout, record: &StringRecord, row: usize) -> Result<ObservationPoint> {
    let required = |col: Column, name: &str| {
        layout.field(record, col).ok_or_else(|| Error::Parse {
            row,
            message: format!("missing {name}"),
        })
    };
    let n = parse_size(required(Column::N, "n")?, row, "n")?;
    let value = parse_fraction(required(Column::Value, "value")?, row, "value")?;
    let error = match required(Column::Metric, "metric")?.to_ascii_lowercase().as_str() {
        "error" => value,
        "accuracy" => error_from_accuracy(value).map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?,
        other => {
            return Err(Error::Parse {
                row,
                message: format!("metric must be `accuracy` or `error`, got `{other}`"),
            })
        }
    };
    let mut point = ObservationPoint::new(n, error);
    if let Some(m) = layout.field(record, Column::M) {
        point.m = Some(parse_size(m, row, "m")?);
    }
    if let Some(std) = layout.field(record, Column::Std) {
        point.std = Some(parse_fraction(std, row, "std")?);
    }
    if let Some(r) = layout.field(record, Column::Replicates) {
        point.replicates = r.parse::<u32>().map_err(|_| Error::Parse {
            row,
            message: format!("replicates must be a positive integer, got `{r}`"),
        })?;
    }
    Ok(point)
}

/// Parses rows in file order, then validates (which sorts by `n`).
pub fn read_points<R: Read>(reader: R) -> Result<ObservationSet> {
    let mut rdr = ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(Trim::All)
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyObservations);
    }
    let layout = Layout::from_header(&header)?;

    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        points.push(parse_row(&layout, &record, row)?);
    }
    validate_points(points)
}

pub fn read_points_path(path: impl AsRef<Path>) -> Result<ObservationSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_points(io::BufReader::new(file)).map_err(|e| match e {
        Error::Csv(err) if err.is_io_error() => Error::io(path, io::Error::other(err.to_string())),
        other => other,
    })
}

fn fmt_number(v: f64) -> String {
    // Display for f64 is the shortest string that parses back to the same bits.
    format!("{v}")
}

/// Writes points as CSV. The `m` column is present only if some point has a
/// model size. Empty or invalid point lists are refused.
pub fn write_points<W: Write>(points: &[ObservationPoint], writer: W) -> Result<()> {
    let points = validate_points(points.to_vec())?;
    let with_m = points.iter().any(|p| p.m.is_some());
    let mut wtr = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(writer);

    let mut header = vec!["n"];
    if with_m {
        header.push("m");
    }
    header.extend(["metric", "value", "std", "replicates"]);
    wtr.write_record(&header)?;

    for p in &points {
        let mut row = vec![fmt_number(p.n)];
        if with_m {
            row.push(p.m.map(fmt_number).unwrap_or_default());
        }
        row.push("error".into());
        row.push(fmt_number(p.error));
        row.push(p.std.map(fmt_number).unwrap_or_default());
        row.push(p.replicates.to_string());
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_points_path(points: &[ObservationPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_points(points, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn points_to_csv(points: &[ObservationPoint]) -> Result<String> {
    let mut buf = Vec::new();
    write_points(points, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Built-in observation sets, matched case-insensitively.
pub fn builtin_fixture(name: &str) -> Result<ObservationSet> {
    match name.to_ascii_lowercase().as_str() {
        "table1" => read_points(TABLE1_CSV.as_bytes()),
        _ => Err(Error::UnknownFixture {
            name: name.to_string(),
            available: FIXTURES.join(", "),
        }),
    }
}
