use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// What a command produced, before it is rendered in the requested format.
pub struct Output {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Free-form lines printed after the table in plain format only.
    pub notes: Vec<String>,
    pub json: serde_json::Value,
}

impl Output {
    pub fn new(header: &[&str], json: serde_json::Value) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new(), notes: Vec::new(), json }
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut buf = serde_json::to_vec_pretty(&self.json)?;
                buf.push(b'\n');
                Ok(buf)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
            Format::Plain => Ok(self.plain().into_bytes()),
        }
    }

    fn plain(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        };
        if !self.header.is_empty() {
            line(&self.header);
        }
        for row in &self.rows {
            line(row);
        }
        for note in &self.notes {
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}

pub fn write(bytes: &[u8], out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}
