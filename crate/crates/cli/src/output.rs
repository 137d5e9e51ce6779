//! Output files. Every JSON document and CSV table carries the tool version
//! and the configuration hash.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(config_hash: String) -> Self {
        Self { tool: TOOL, version: VERSION, config_hash }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with the provenance fields first, newline terminated.
pub fn to_json<T: Serialize>(prov: &Provenance, body: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { provenance: prov, body })?;
    s.push('\n');
    Ok(s)
}

/// Single writer for the files of one command.
pub struct OutputDir {
    root: PathBuf,
    prov: Provenance,
}

impl OutputDir {
    pub fn create(root: &Path, prov: Provenance) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), prov })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, body: &T) -> CliResult<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, to_json(&self.prov, body)?).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// CSV with a `#` provenance line, a header row and LF line endings.
    pub fn write_csv<R: Serialize>(&self, name: &str, rows: impl IntoIterator<Item = R>) -> CliResult<PathBuf> {
        let path = self.path(name);
        let mut buf =
            format!("# {} {} config_hash={}\n", self.prov.tool, self.prov.version, self.prov.config_hash).into_bytes();
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
        let mut f = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        f.write_all(&buf).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
