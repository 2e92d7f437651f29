//! Column-oriented result tables with RFC 4180 CSV input and output.

use std::io::Write;

use crate::error::{Error, Result};

/// Rectangular table of text cells under unique, non-empty column names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Result<Self> {
        let t = Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() };
        t.check_header()?;
        Ok(t)
    }

    fn check_header(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Table("no columns".into()));
        }
        for (i, c) in self.columns.iter().enumerate() {
            if c.trim().is_empty() {
                return Err(Error::Table(format!("column {i} has an empty name")));
            }
            if self.columns[..i].contains(c) {
                return Err(Error::Table(format!("duplicate column {c:?}")));
            }
        }
        Ok(())
    }

    pub fn push_row(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Table(format!(
                "row has {} cells, expected {}",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Table(format!("no column named {name:?}")))
    }

    /// Values of a column; empty cells become `None`, anything else must
    /// parse as a float.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let cell = row[i].trim();
                if cell.is_empty() {
                    return Ok(None);
                }
                cell.parse::<f64>().map(Some).map_err(|_| {
                    Error::Table(format!("column {name:?} row {k}: {cell:?} is not numeric"))
                })
            })
            .collect()
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::from_reader(s.as_bytes())
    }

    pub fn from_reader<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(r);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut t = Self { columns, rows: Vec::new() };
        t.check_header()?;
        for rec in rdr.records() {
            let rec = rec?;
            t.push_row(rec.iter().map(str::to_string).collect())?;
        }
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Table(e.to_string()))
    }
}

/// Fixed formatting for floats in result tables: shortest round-trip form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_writes_quoted_cells() {
        let t = ResultTable::from_csv_str("x,note\n1.5,\"a, b\"\n2,\n").unwrap();
        assert_eq!(t.columns, ["x", "note"]);
        assert_eq!(t.rows[0][1], "a, b");
        assert_eq!(t.numeric_column("x").unwrap(), [Some(1.5), Some(2.0)]);
        assert_eq!(t.numeric_column("note").unwrap_err().to_string(), "malformed table: column \"note\" row 0: \"a, b\" is not numeric");
        assert_eq!(t.to_csv_string().unwrap(), "x,note\n1.5,\"a, b\"\n2,\n");
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ResultTable::from_csv_str("a,a\n1,2\n").is_err());
        assert!(ResultTable::from_csv_str("a,\n1,2\n").is_err());
        assert!(ResultTable::from_csv_str("a,b\n1\n").is_err());
        assert!(ResultTable::from_csv_str("").is_err());
        let mut t = ResultTable::new(["a"]).unwrap();
        assert!(t.push_row(vec!["1".into(), "2".into()]).is_err());
        assert!(t.column_index("b").is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1e-300, 12345.678, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
