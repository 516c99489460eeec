//! Writing JSON, CSV or text to stdout or a file.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::{input_error, Failure};

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

pub struct Sink<'a> {
    path: Option<&'a Path>,
}

impl<'a> Sink<'a> {
    pub fn new(path: Option<&'a Path>) -> Self {
        Self { path }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), Failure> {
        let res = match self.path {
            Some(p) => std::fs::write(p, bytes),
            None => std::io::stdout().lock().write_all(bytes),
        };
        res.map_err(|e| input_error(format!("cannot write output: {e}")))
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| input_error(format!("serialisation: {e}")))?;
        s.push('\n');
        self.write(s.as_bytes())
    }

    pub fn csv(&self, table: &Table) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| input_error(format!("csv: {e}"));
        w.write_record(&table.headers).map_err(err)?;
        for r in &table.rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| input_error(format!("csv: {e}")))?;
        self.write(&bytes)
    }

    pub fn text(&self, s: &str) -> Result<(), Failure> {
        self.write(s.as_bytes())
    }
}
