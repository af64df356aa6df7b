//! Deterministic artifact output: CSV with 17-significant-digit floats,
//! JSON reports, and the flat binary map format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// 17 significant digits; enough to reproduce any f64 bit pattern.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Collects every file written during a run so the manifest can list them.
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(Error::io(dir.display().to_string()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(Error::io(path.display().to_string()))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    /// CSV with the given header; every numeric cell printed via [`fmt_f64`].
    pub fn write_csv<'a>(
        &mut self,
        name: &str,
        header: &str,
        rows: impl Iterator<Item = Vec<f64>> + 'a,
    ) -> Result<()> {
        let mut out = self.create(name)?;
        let io_err = |e| Error::Io {
            path: name.to_string(),
            source: e,
        };
        writeln!(out, "{header}").map_err(io_err)?;
        for row in rows {
            let line = row
                .iter()
                .map(|&x| fmt_f64(x))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{line}").map_err(|e| Error::Io {
                path: name.to_string(),
                source: e,
            })?;
        }
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut out = self.create(name)?;
        let text = serde_json::to_string_pretty(value)?;
        out.write_all(text.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| Error::Io {
                path: name.to_string(),
                source: e,
            })
    }

    /// Flat binary of complex doubles: little-endian (re, im) pairs,
    /// column-major within each matrix, matrices concatenated.
    pub fn write_matrices_bin(&mut self, name: &str, matrices: &[CMatrix]) -> Result<()> {
        let mut out = self.create(name)?;
        for m in matrices {
            for z in m.iter() {
                out.write_all(&z.re.to_le_bytes())
                    .and_then(|_| out.write_all(&z.im.to_le_bytes()))
                    .map_err(|e| Error::Io {
                        path: name.to_string(),
                        source: e,
                    })?;
            }
        }
        Ok(())
    }

    /// Open a raw file through the tracked writer.
    pub fn create_tracked(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.create(name)
    }

    /// Record a file written through [`create_tracked`]'s side effects only.
    pub fn note_file(&mut self, name: &str) {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
    }
}

/// Read a CSV written by [`ArtifactWriter::write_csv`]; returns (header,
/// numeric rows).
pub fn read_csv(path: &Path) -> Result<(String, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path.display().to_string()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or(Error::EmptyInput("csv file"))?
        .to_string();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| Error::Config {
                    path: format!("{}:{}", path.display(), i + 2),
                    message: format!("not a number: `{cell}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
