//! CSV trace files.
//!
//! The header is `time,<name>,...`; row `n` holds the values at time `n` and
//! its `time` cell must read `n`. An empty cell is ⊥.

use std::collections::BTreeSet;
use std::io;

use thiserror::Error;

use crate::ast::Ident;
use crate::semantics::{FiniteStream, StreamMap};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("first column must be `time`, found `{0}`")]
    BadTimeHeader(String),
    #[error("row {row}: time column reads `{found}`, expected {row}")]
    BadTimeColumn { row: usize, found: String },
    #[error("column `{0}` is missing")]
    MissingColumn(Ident),
    #[error("column `{0}` does not name a known stream")]
    UnknownColumn(String),
    #[error("column `{0}` appears twice")]
    DuplicateColumn(String),
    #[error("row {row}, column `{column}`: `{found}` is not an integer")]
    NonIntegerCell { row: usize, column: Ident, found: String },
    #[error("row {row} has {found} cells, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("empty trace file")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Reads a trace whose columns are exactly `expected` (in any order).
pub fn read_trace(text: &str, expected: &[Ident]) -> Result<StreamMap, TraceError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records.next().ok_or(TraceError::Empty)??;
    let mut fields = header.iter();
    match fields.next() {
        Some("time") => {}
        other => return Err(TraceError::BadTimeHeader(other.unwrap_or("").to_string())),
    }
    let mut seen = BTreeSet::new();
    let mut columns = Vec::new();
    for name in fields {
        if !seen.insert(name.to_string()) {
            return Err(TraceError::DuplicateColumn(name.to_string()));
        }
        let column = expected
            .iter()
            .find(|e| e.as_str() == name)
            .ok_or_else(|| TraceError::UnknownColumn(name.to_string()))?;
        columns.push(column.clone());
    }
    if let Some(missing) = expected.iter().find(|e| !seen.contains(e.as_str())) {
        return Err(TraceError::MissingColumn(missing.clone()));
    }

    let mut cells: Vec<Vec<Option<i64>>> = vec![Vec::new(); columns.len()];
    for (row, record) in records.enumerate() {
        let record = record?;
        if record.len() != columns.len() + 1 {
            return Err(TraceError::RowLength { row, expected: columns.len() + 1, found: record.len() });
        }
        let time = &record[0];
        if time.parse::<usize>().ok() != Some(row) {
            return Err(TraceError::BadTimeColumn { row, found: time.to_string() });
        }
        for (k, cell) in record.iter().skip(1).enumerate() {
            let value = if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<i64>().map_err(|_| TraceError::NonIntegerCell {
                    row,
                    column: columns[k].clone(),
                    found: cell.to_string(),
                })?)
            };
            cells[k].push(value);
        }
    }
    let horizon = cells.first().map_or_else(|| count_rows(text), Vec::len);
    let mut map = StreamMap::new(horizon);
    for (name, column) in columns.into_iter().zip(cells) {
        map.insert(name, FiniteStream::new(column)).expect("all columns have one cell per row");
    }
    Ok(map)
}

// A trace with only a time column still has a horizon.
fn count_rows(text: &str) -> usize {
    text.lines().skip(1).filter(|l| !l.trim().is_empty()).count()
}

/// Writes `map` with columns in `order`; names missing from `map` are skipped.
pub fn write_trace<W: io::Write>(map: &StreamMap, order: &[&Ident], out: W) -> Result<(), TraceError> {
    let mut writer = csv::WriterBuilder::new().from_writer(out);
    let names: Vec<&Ident> = order.iter().copied().filter(|n| map.contains(n.as_str())).collect();
    let mut header = vec!["time".to_string()];
    header.extend(names.iter().map(|n| n.to_string()));
    writer.write_record(&header)?;
    for n in 0..map.horizon() {
        let mut row = vec![n.to_string()];
        for name in &names {
            row.push(map.get(name.as_str()).unwrap().get(n).map_or_else(String::new, |v| v.to_string()));
        }
        writer.write_record(&row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// [`write_trace`] into a string, columns in name order.
pub fn trace_to_string(map: &StreamMap) -> String {
    let names: Vec<&Ident> = map.names().collect();
    let mut buf = Vec::new();
    write_trace(map, &names, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;

    fn names(list: &[&str]) -> Vec<Ident> {
        list.iter().map(|n| ident(n)).collect()
    }

    #[test]
    fn reads_empty_cells_as_undefined() {
        let map = read_trace("time,a,b\n0,1,\n1,,2\n", &names(&["a", "b"])).unwrap();
        assert_eq!(map.horizon(), 2);
        assert_eq!(map.get("a").unwrap().to_string(), "[1,⊥]");
        assert_eq!(map.get("b").unwrap().to_string(), "[⊥,2]");
    }

    #[test]
    fn round_trip() {
        let text = "time,a,b\n0,1,\n1,,-2\n2,,\n";
        let map = read_trace(text, &names(&["a", "b"])).unwrap();
        assert_eq!(trace_to_string(&map), text);
        let only_time = read_trace("time\n0\n1\n", &[]).unwrap();
        assert_eq!(only_time.horizon(), 2);
    }

    #[test]
    fn format_errors() {
        let a = names(&["a"]);
        assert!(matches!(read_trace("t,a\n0,1\n", &a), Err(TraceError::BadTimeHeader(h)) if h == "t"));
        assert!(matches!(read_trace("time,a\n1,1\n", &a), Err(TraceError::BadTimeColumn { row: 0, .. })));
        assert!(matches!(read_trace("time\n0\n", &a), Err(TraceError::MissingColumn(_))));
        assert!(matches!(read_trace("time,a,z\n0,1,2\n", &a), Err(TraceError::UnknownColumn(_))));
        assert!(matches!(read_trace("time,a,a\n0,1,2\n", &a), Err(TraceError::DuplicateColumn(_))));
        assert!(matches!(read_trace("time,a\n0,x\n", &a), Err(TraceError::NonIntegerCell { .. })));
        assert!(matches!(read_trace("time,a\n0\n", &a), Err(TraceError::RowLength { .. })));
        assert!(matches!(read_trace("", &a), Err(TraceError::Empty)));
    }
}
