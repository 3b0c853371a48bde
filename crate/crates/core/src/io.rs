//! On-disk formats: spectra batches, run manifests, CSV tables and the
//! per-directory lock.
//!
//! A batch directory holds `header.json` and `eigenvalues.f64`, the latter
//! being `count * dim` little-endian IEEE-754 doubles, one sorted spectrum
//! per row. `gen --vectors` adds `eigenvectors.c128`: for every realization
//! the `dim x dim` eigenvector matrix, column `k` belonging to eigenvalue
//! `k`, stored column-major as interleaved (re, im) little-endian doubles.
//! The manifest inside `header.json` carries no timing, so repeated runs
//! give byte-identical batches; `run.json` repeats it with timing filled in.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensembles::{EnsembleKind, GAUSSIAN_SAMPLER, RNG_ALGORITHM};
use crate::error::{Error, Result};
use crate::stats::{BatchInfo, SpectraBatch};

pub const HEADER_FILE: &str = "header.json";
pub const EIGENVALUE_FILE: &str = "eigenvalues.f64";
pub const EIGENVECTOR_FILE: &str = "eigenvectors.c128";
/// Manifest with timing fields, written next to the batch by `gen`.
pub const RUN_FILE: &str = "run.json";
pub const LOCK_FILE: &str = ".srmt.lock";
pub const BATCH_FORMAT: &str = "srmt-batch";
pub const BATCH_FORMAT_VERSION: u32 = 1;

/// Everything needed to reproduce an output.
///
/// `wall_clock_seconds` and `workers` are recorded but excluded from
/// [`RunManifest::hash`], since neither changes any number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub ensemble: Option<EnsembleKind>,
    pub dim: Option<usize>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub rng: String,
    pub gaussian_sampler: String,
    /// Resolved configuration: bin widths, windows, grids, tolerances and
    /// the hash of any input batch.
    pub config: BTreeMap<String, serde_json::Value>,
    pub wall_clock_seconds: Option<f64>,
    pub workers: Option<usize>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            ensemble: None,
            dim: None,
            count: None,
            seed: None,
            rng: RNG_ALGORITHM.into(),
            gaussian_sampler: GAUSSIAN_SAMPLER.into(),
            config: BTreeMap::new(),
            wall_clock_seconds: None,
            workers: None,
        }
    }

    pub fn with_ensemble(mut self, kind: EnsembleKind, dim: usize, count: usize, seed: u64) -> Self {
        self.ensemble = Some(kind);
        self.dim = Some(dim);
        self.count = Some(count);
        self.seed = Some(seed);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.config.insert(key.to_string(), v);
        self
    }

    /// Lower-case hex SHA-256 of the manifest JSON without the timing fields.
    pub fn hash(&self) -> String {
        let mut stable = self.clone();
        stable.wall_clock_seconds = None;
        stable.workers = None;
        let bytes = serde_json::to_vec(&stable).expect("manifest serializes");
        hex(&Sha256::digest(&bytes))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| format_error(path, e))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn format_error(path: &Path, reason: impl ToString) -> Error {
    Error::Format {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub format: String,
    pub format_version: u32,
    pub byte_order: String,
    pub value_type: String,
    pub info: BatchInfo,
    pub eigenvectors: bool,
    pub manifest: RunManifest,
}

pub fn write_batch(dir: &Path, batch: &SpectraBatch, manifest: &RunManifest, eigenvectors: bool) -> Result<BatchHeader> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = BatchHeader {
        format: BATCH_FORMAT.into(),
        format_version: BATCH_FORMAT_VERSION,
        byte_order: "little-endian".into(),
        value_type: "f64".into(),
        info: batch.info().clone(),
        eigenvectors,
        manifest: manifest.clone(),
    };
    write_f64s(&dir.join(EIGENVALUE_FILE), batch.values())?;
    let path = dir.join(HEADER_FILE);
    let text = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(header)
}

pub fn read_batch(dir: &Path) -> Result<(SpectraBatch, BatchHeader)> {
    let path = dir.join(HEADER_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let header: BatchHeader = serde_json::from_str(&text).map_err(|e| format_error(&path, e))?;
    if header.format != BATCH_FORMAT || header.format_version != BATCH_FORMAT_VERSION {
        return Err(format_error(
            &path,
            format!("unsupported format {} v{}", header.format, header.format_version),
        ));
    }
    let data = dir.join(EIGENVALUE_FILE);
    let values = read_f64s(&data)?;
    let info = &header.info;
    if values.len() != info.dim * info.count {
        return Err(format_error(
            &data,
            format!("expected {} x {} values, found {}", info.count, info.dim, values.len()),
        ));
    }
    let batch = SpectraBatch::new(info.source.clone(), info.kind, info.seed, info.dim, values)?;
    Ok((batch, header))
}

pub fn write_f64s(path: &Path, values: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for v in values {
        w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_f64s(path: &Path) -> Result<Vec<f64>> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(format_error(path, format!("length {} is not a multiple of 8", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

/// Appends values to an open little-endian stream, for data produced
/// one realization at a time.
pub struct F64Stream {
    path: PathBuf,
    inner: BufWriter<File>,
}

impl F64Stream {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(F64Stream {
            path: path.to_path_buf(),
            inner: BufWriter::new(file),
        })
    }

    pub fn push(&mut self, values: &[f64]) -> Result<()> {
        for v in values {
            self.inner.write_all(&v.to_le_bytes()).map_err(|e| Error::io(&self.path, e))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Seventeen significant digits: every `f64` survives a text round trip.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_f64(*x),
            Cell::Empty => String::new(),
        }
    }
}

/// Writes `# manifest-sha256: ...`, a header row and the data rows.
pub fn write_csv(path: &Path, manifest_hash: &str, columns: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
        return Err(Error::invalid(format!(
            "row has {} cells, header has {} columns",
            bad.len(),
            columns.len()
        )));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "# manifest-sha256: {manifest_hash}").map_err(io)?;
    writeln!(w, "{}", columns.join(",")).map_err(io)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// A parsed CSV table: comment lines, header and raw fields.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn manifest_hash(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| c.strip_prefix("manifest-sha256: "))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut comments = Vec::new();
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let columns = loop {
        match lines.next() {
            Some(l) if l.starts_with('#') => comments.push(l.trim_start_matches('#').trim().to_string()),
            Some(l) => break l.split(',').map(str::to_string).collect::<Vec<_>>(),
            None => return Err(format_error(path, "no header row")),
        }
    };
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    if let Some(i) = rows.iter().position(|r| r.len() != columns.len()) {
        return Err(format_error(path, format!("data row {i} has the wrong number of fields")));
    }
    Ok(CsvTable { comments, columns, rows })
}

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(OutputLock { path })
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(Error::io(
                &path,
                std::io::Error::new(ErrorKind::AlreadyExists, "another srmt run holds this directory"),
            )),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
