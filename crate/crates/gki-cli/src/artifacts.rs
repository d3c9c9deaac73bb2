//! Artifact writers: versioned CSV tables, their markdown mirrors, and
//! NetPBM images named by channel count.

use std::fs;
use std::path::{Path, PathBuf};

use gki::imaging::{write_netpbm, RawImage};

use crate::error::{io_err, Result};

/// A rectangular table written as `{name}.v{version}.csv` with an identical
/// markdown mirror at `{name}.v{version}.md`. The schema version lives in
/// the file name so consumers can detect column changes.
pub struct Table {
    pub name: String,
    pub version: u32,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            version: 1,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&join_csv(&self.header));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&join_csv(row));
            out.push('\n');
        }
        out
    }

    pub fn markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("| {} |\n", self.header.join(" | ")));
        out.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
        for row in &self.rows {
            out.push_str(&format!("| {} |\n", row.join(" | ")));
        }
        out
    }

    /// Writes both renditions into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv_path = dir.join(format!("{}.v{}.csv", self.name, self.version));
        let md_path = dir.join(format!("{}.v{}.md", self.name, self.version));
        fs::write(&csv_path, self.csv()).map_err(io_err(&csv_path))?;
        fs::write(&md_path, self.markdown()).map_err(io_err(&md_path))?;
        Ok((csv_path, md_path))
    }
}

fn join_csv(cells: &[String]) -> String {
    cells.iter().map(|c| escape_csv(c)).collect::<Vec<_>>().join(",")
}

fn escape_csv(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Shortest-round-trip decimal form, so reading the CSV back reproduces the
/// exact binary value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Ensures `dir` exists and writes `stem.pgm` (mono) or `stem.ppm` (color).
pub fn write_image(dir: &Path, stem: &str, image: &RawImage) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let ext = if image.channels() == 1 { "pgm" } else { "ppm" };
    let path = dir.join(format!("{stem}.{ext}"));
    write_netpbm(image, &path)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_markdown_mirror_the_same_cells() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push_row(vec!["1".into(), "x,y".into()]);
        t.push_row(vec!["2".into(), "plain".into()]);
        assert_eq!(t.csv(), "a,b\n1,\"x,y\"\n2,plain\n");
        assert_eq!(t.markdown(), "| a | b |\n|---|---|\n| 1 | x,y |\n| 2 | plain |\n");
    }

    #[test]
    fn floats_round_trip_through_their_csv_form() {
        for v in [0.1 + 0.2, 1.0 / 3.0, 1e-300, -0.0, 255.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }
}
