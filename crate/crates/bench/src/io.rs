//! CSV and svmlight readers, and a CSV writer.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use learnkit::{DataMatrix, LabelVector};

use crate::error::{BenchError, Result};

/// Which CSV column, if any, holds the labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    None,
    Index(usize),
    Name(String),
}

impl LabelColumn {
    /// `none`, a column index, or a header name.
    pub fn parse(text: &str) -> Self {
        match text.trim() {
            "" | "none" => LabelColumn::None,
            t => t.parse().map(LabelColumn::Index).unwrap_or_else(|_| LabelColumn::Name(t.to_string())),
        }
    }
}

/// Reads a numeric table. The first row is taken as a header when any of
/// its fields fails to parse as a number. Labels are kept as identifiers.
pub fn load_csv(path: &Path, label: &LabelColumn) -> Result<(DataMatrix, Option<LabelVector>)> {
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file);

    let mut header: Option<Vec<String>> = None;
    let mut width = None;
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut n_rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BenchError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            header = Some(record.iter().map(str::to_string).collect());
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(BenchError::RaggedRow { line, expected, found: record.len() });
        }
        let label_at = match label {
            LabelColumn::None => None,
            LabelColumn::Index(j) if *j < expected => Some(*j),
            LabelColumn::Index(j) => return Err(BenchError::UnknownColumn(j.to_string())),
            LabelColumn::Name(name) => Some(
                header
                    .as_ref()
                    .and_then(|h| h.iter().position(|c| c == name))
                    .ok_or_else(|| BenchError::UnknownColumn(name.clone()))?,
            ),
        };
        for (j, field) in record.iter().enumerate() {
            if Some(j) == label_at {
                labels.push(field.to_string());
                continue;
            }
            let v = field.parse::<f64>().map_err(|_| BenchError::Parse {
                line,
                message: format!("column {j}: `{field}` is not a number"),
            })?;
            values.push(v);
        }
        n_rows += 1;
    }
    let n_features = width.unwrap_or(0).saturating_sub(usize::from(*label != LabelColumn::None));
    let x = DataMatrix::from_shape_vec(n_rows, n_features, values)?;
    let y = (*label != LabelColumn::None).then(|| LabelVector::classes(labels));
    Ok((x, y))
}

/// Writes `x` (and labels as a trailing `y` column) with a header row.
/// Floats use the shortest representation that reads back exactly.
pub fn write_csv(path: &Path, x: &DataMatrix, y: Option<&LabelVector>) -> Result<()> {
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    let to_err = |e: csv::Error| BenchError::Parse { line: 0, message: e.to_string() };
    let mut header: Vec<String> = (0..x.n_features()).map(|j| format!("f{j}")).collect();
    if y.is_some() {
        header.push("y".into());
    }
    writer.write_record(&header).map_err(to_err)?;
    for (i, row) in x.rows().enumerate() {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        match y {
            Some(LabelVector::Classes(c)) => fields.push(c.id(i).to_string()),
            Some(LabelVector::Real(v)) => fields.push(format!("{:?}", v[i])),
            None => {}
        }
        writer.write_record(&fields).map_err(to_err)?;
    }
    writer.flush().map_err(|e| BenchError::io(path, e))
}

/// Reads `label idx:val ...` lines with 1-based, strictly ascending
/// indices. Text after `#` is ignored, as are `qid:` tokens.
pub fn load_svmlight(path: &Path) -> Result<(DataMatrix, LabelVector)> {
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut width = 0;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| BenchError::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line");
        let parse_err = |message: String| BenchError::Parse { line: line_no, message };
        label.parse::<f64>().map_err(|_| parse_err(format!("label `{label}` is not a number")))?;
        let mut entries = Vec::new();
        let mut previous = 0;
        for token in tokens.filter(|t| !t.starts_with("qid:")) {
            let (idx, val) = token.split_once(':').ok_or_else(|| parse_err(format!("`{token}` is not idx:value")))?;
            let index: usize = idx.parse().map_err(|_| parse_err(format!("bad feature index `{idx}`")))?;
            if index == 0 {
                return Err(parse_err("feature indices start at 1".into()));
            }
            if index <= previous {
                return Err(BenchError::NonAscendingIndex { line: line_no, previous, index });
            }
            let value: f64 = val.parse().map_err(|_| parse_err(format!("bad value `{val}`")))?;
            entries.push((index - 1, value));
            previous = index;
        }
        width = width.max(previous);
        labels.push(label.to_string());
        rows.push(entries);
    }
    let mut data = vec![0.0; rows.len() * width];
    for (i, entries) in rows.iter().enumerate() {
        for &(j, v) in entries {
            data[i * width + j] = v;
        }
    }
    Ok((DataMatrix::from_shape_vec(rows.len(), width, data)?, LabelVector::classes(labels)))
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n").map_err(|e| BenchError::io(path, e))?;
    }
    out.flush().map_err(|e| BenchError::io(path, e))
}

pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut items = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| BenchError::io(path, e))?;
        if !line.trim().is_empty() {
            items.push(serde_json::from_str(&line)?);
        }
    }
    Ok(items)
}
