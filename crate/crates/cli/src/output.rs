//! Output formats. Every file is written to a temporary file in the target
//! directory and renamed into place.

use std::io::Write;
use std::path::Path;

use cascade_core::scalar::CMatrix;
use serde::Serialize;

use crate::error::CliError;

pub const BASIS_ORDERING: &str =
    "composite index 2n+q; n = source photon number 0..=n_max; q = 0 for the qubit ground state, 1 for the excited state";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Run(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// In-memory CSV table flushed atomically.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(csv_error)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_error)
    }

    pub fn save(self, path: &Path) -> Result<(), CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Run(e.to_string()))?;
        write_atomic(path, &bytes)
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Run(e.to_string())
}

/// Shortest round-trip form; scientific notation for very small or large
/// magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Serialize)]
pub struct StateDump<'a> {
    pub kind: &'a str,
    pub basis_ordering: &'a str,
    pub n_max: usize,
    pub dim: usize,
    pub time: f64,
    /// Row-major, each entry `[re, im]`.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl<'a> StateDump<'a> {
    pub fn density(time: f64, n_max: usize, m: &CMatrix<f64>) -> Self {
        let matrix = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        Self { kind: "density_matrix", basis_ordering: BASIS_ORDERING, n_max, dim: m.nrows(), time, matrix }
    }

    /// JSON with one matrix row per line. Parses to the same document as
    /// the derived serialization.
    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut out = String::from("{\n");
        out += &format!("  \"kind\": {},\n", j(self.kind)?);
        out += &format!("  \"basis_ordering\": {},\n", j(self.basis_ordering)?);
        out += &format!("  \"n_max\": {},\n", self.n_max);
        out += &format!("  \"dim\": {},\n", self.dim);
        out += &format!("  \"time\": {},\n", j(&self.time)?);
        out += "  \"matrix\": [\n";
        for (i, row) in self.matrix.iter().enumerate() {
            let sep = if i + 1 < self.matrix.len() { "," } else { "" };
            out += &format!("    {}{sep}\n", j(row)?);
        }
        out += "  ]\n}\n";
        Ok(out.into_bytes())
    }
}

pub fn write_state(path: &Path, dump: &StateDump<'_>) -> Result<(), CliError> {
    write_atomic(path, &dump.to_bytes()?)
}

fn j<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    serde_json::to_string(value).map_err(|e| CliError::Run(e.to_string()))
}
