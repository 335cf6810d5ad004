//! CSV ingestion and export.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::dataset::{Dataset, Instance, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LabelFormat {
    /// `c8`
    Prefixed,
    /// `8`
    Plain,
}

fn parse_label_with_format(text: &str) -> Option<(Label, LabelFormat)> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix(['c', 'C']) {
        rest.parse().ok().map(|l| (l, LabelFormat::Prefixed))
    } else {
        t.parse().ok().map(|l| (l, LabelFormat::Plain))
    }
}

/// Parses a class label written either as `c<N>` or as a plain integer.
pub fn parse_label(text: &str) -> Result<Label> {
    parse_label_with_format(text)
        .map(|(l, _)| l)
        .ok_or_else(|| Error::Config(format!("'{text}' is not a class label (expected c<N> or an integer)")))
}

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Data {
            row,
            message: format!("{other:?}"),
        },
    }
}

fn headers(path: &Path, reader: &mut csv::Reader<File>) -> Result<Vec<String>> {
    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    let names: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(Error::InvalidInput(format!("{} is empty", path.display())));
    }
    Ok(names)
}

fn column_index(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Schema(format!("column '{name}' not found in header")))
}

struct Table {
    feature_names: Vec<String>,
    rows: Vec<(Vec<f64>, Option<Label>)>,
}

fn read_table(path: &Path, label_column: Option<&str>, feature_columns: &[String]) -> Result<Table> {
    let mut reader = open_reader(path)?;
    let header = headers(path, &mut reader)?;
    let label_idx = label_column.map(|l| column_index(&header, l)).transpose()?;
    let feature_names: Vec<String> = if feature_columns.is_empty() {
        header
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_idx)
            .map(|(_, h)| h.clone())
            .collect()
    } else {
        feature_columns.to_vec()
    };
    if feature_names.is_empty() {
        return Err(Error::Schema("no feature columns".into()));
    }
    let feature_idx = feature_names
        .iter()
        .map(|name| column_index(&header, name))
        .collect::<Result<Vec<_>>>()?;

    let mut format: Option<LabelFormat> = None;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let cell = |i: usize| record.get(i).unwrap_or("").trim();

        let features = feature_idx
            .iter()
            .zip(&feature_names)
            .map(|(&i, name)| {
                cell(i)
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Data {
                        row,
                        message: format!("column '{name}': '{}' is not a finite number", cell(i)),
                    })
            })
            .collect::<Result<Vec<_>>>()?;

        let label = match label_idx {
            None => None,
            Some(i) => {
                let (label, this) = parse_label_with_format(cell(i)).ok_or_else(|| Error::Data {
                    row,
                    message: format!("label '{}' is neither c<N> nor an integer", cell(i)),
                })?;
                match format {
                    None => format = Some(this),
                    Some(f) if f != this => {
                        return Err(Error::Schema(format!(
                            "row {row}: mixed label formats ('{}' after {} labels)",
                            cell(i),
                            if f == LabelFormat::Prefixed { "c<N>" } else { "integer" }
                        )))
                    }
                    Some(_) => {}
                }
                Some(label)
            }
        };
        rows.push((features, label));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{} has no data rows", path.display())));
    }
    Ok(Table { feature_names, rows })
}

/// Loads a labelled table. An empty `feature_columns` list selects every
/// column except the label, in header order.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str, feature_columns: &[String]) -> Result<Dataset> {
    let table = read_table(path.as_ref(), Some(label_column), feature_columns)?;
    Dataset::new(
        table.feature_names,
        table
            .rows
            .into_iter()
            .map(|(f, l)| Instance::new(f, l.expect("label column was requested")))
            .collect(),
    )
}

/// Loads feature vectors only, in the given column order.
pub fn load_features(path: impl AsRef<Path>, feature_columns: &[String]) -> Result<Vec<Vec<f64>>> {
    let table = read_table(path.as_ref(), None, feature_columns)?;
    Ok(table.rows.into_iter().map(|(f, _)| f).collect())
}

/// Writes a dataset as CSV, features first and the label last.
pub fn write_csv(dataset: &Dataset, label_column: &str, out: &mut impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Internal(e.to_string());
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.push(label_column);
    writer.write_record(&header).map_err(io_err)?;
    for inst in dataset.instances() {
        let mut record: Vec<String> = inst.features.iter().map(f64::to_string).collect();
        record.push(inst.label.to_string());
        writer.write_record(&record).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::Internal(e.to_string()))?;
    Ok(())
}
