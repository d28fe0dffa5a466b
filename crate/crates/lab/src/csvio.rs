//! CSV files of points and of labeled pairs.
//!
//! Points: header `x0,...,x{d-1}`. Pairs: `y0..y{d-1},x0..x{d-1}` with an
//! optional trailing `cluster` column. Values are written with 17
//! significant digits so reading a file back gives the same bits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gtn_core::{LabeledDataset, PointSet};

use crate::error::{LabError, Result};

/// A parsed CSV: column names and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: PointSet,
}

impl Table {
    pub fn is_pairs(&self) -> bool {
        self.header.first().map(String::as_str) == Some("y0")
    }
}

pub fn column_names(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|j| format!("{prefix}{j}")).collect()
}

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn csv_write_err(path: &Path, e: csv::Error) -> LabError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => LabError::io(path, io),
        other => LabError::Csv { path: path.into(), line: 0, message: format!("{other:?}") },
    }
}

fn finish(path: &Path, w: csv::Writer<BufWriter<File>>) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| LabError::io(path, e.into_error()))?;
    inner.flush().map_err(|e| LabError::io(path, e))
}

pub fn write_points(path: &Path, points: &PointSet) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(column_names("x", points.d())).map_err(|e| csv_write_err(path, e))?;
    for row in points.rows() {
        w.write_record(row.iter().map(|v| format_value(*v))).map_err(|e| csv_write_err(path, e))?;
    }
    finish(path, w)
}

pub fn write_pairs(path: &Path, pairs: &LabeledDataset) -> Result<()> {
    let d = pairs.d();
    let mut header = column_names("y", d);
    header.extend(column_names("x", d));
    if pairs.clusters.is_some() {
        header.push("cluster".into());
    }
    let mut w = writer(path)?;
    w.write_record(&header).map_err(|e| csv_write_err(path, e))?;
    for i in 0..pairs.len() {
        let mut rec: Vec<String> = pairs.sources.row(i).iter().map(|v| format_value(*v)).collect();
        rec.extend(pairs.targets.row(i).iter().map(|v| format_value(*v)));
        if let Some(c) = &pairs.clusters {
            rec.push(c[i].to_string());
        }
        w.write_record(&rec).map_err(|e| csv_write_err(path, e))?;
    }
    finish(path, w)
}

/// Reads any all-numeric CSV with a header row.
pub fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file);
    let header: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(e) => return Err(read_err(path, e)),
    };
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(LabError::EmptyDataset { path: path.into() });
    }
    let d = header.len();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| read_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != d {
            return Err(LabError::Csv {
                path: path.into(),
                line,
                message: format!("expected {d} values, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| LabError::Csv {
                path: path.into(),
                line,
                message: format!("column `{}`: `{cell}` is not a number", header[j]),
            })?;
            if !v.is_finite() {
                return Err(LabError::Csv {
                    path: path.into(),
                    line,
                    message: format!("column `{}`: value is not finite", header[j]),
                });
            }
            data.push(v);
        }
    }
    if data.is_empty() {
        return Err(LabError::EmptyDataset { path: path.into() });
    }
    Ok(Table { header, rows: PointSet::from_flat(d, data)? })
}

fn read_err(path: &Path, e: csv::Error) -> LabError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => LabError::io(path, io),
        csv::ErrorKind::Utf8 { .. } => LabError::Csv { path: path.into(), line, message: "invalid UTF-8".into() },
        other => LabError::Csv { path: path.into(), line, message: format!("{other:?}") },
    }
}

/// Reads a points file. Column names are not checked, so user latent
/// vectors with their own header are accepted.
pub fn read_points(path: &Path) -> Result<PointSet> {
    Ok(read_table(path)?.rows)
}

/// Reads a pairs file written by [`write_pairs`].
pub fn read_pairs(path: &Path) -> Result<LabeledDataset> {
    let table = read_table(path)?;
    pairs_from_table(path, table)
}

pub fn pairs_from_table(path: &Path, table: Table) -> Result<LabeledDataset> {
    let bad_header = |msg: String| LabError::Csv { path: path.into(), line: 1, message: msg };
    let has_cluster = table.header.last().map(String::as_str) == Some("cluster");
    let width = table.header.len() - usize::from(has_cluster);
    if width == 0 || width % 2 != 0 {
        return Err(bad_header(format!("pairs header needs y0..,x0.. columns, found {}", table.header.join(","))));
    }
    let d = width / 2;
    let mut want = column_names("y", d);
    want.extend(column_names("x", d));
    if table.header[..width] != want[..] {
        return Err(bad_header(format!("expected header {}", want.join(","))));
    }
    let n = table.rows.n();
    let mut ys = Vec::with_capacity(n * d);
    let mut xs = Vec::with_capacity(n * d);
    let mut clusters = Vec::new();
    for (i, row) in table.rows.rows().enumerate() {
        ys.extend_from_slice(&row[..d]);
        xs.extend_from_slice(&row[d..width]);
        if has_cluster {
            let c = row[width];
            if c < 0.0 || c.fract() != 0.0 {
                return Err(LabError::Csv {
                    path: path.into(),
                    line: i as u64 + 2,
                    message: format!("cluster index `{c}` is not a nonnegative integer"),
                });
            }
            clusters.push(c as usize);
        }
    }
    let pairs = LabeledDataset::new(PointSet::from_flat(d, ys)?, PointSet::from_flat(d, xs)?)?;
    if has_cluster {
        Ok(pairs.with_clusters(clusters)?)
    } else {
        Ok(pairs)
    }
}
