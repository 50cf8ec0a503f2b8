//! Reading and writing `.srti` files with their `.srti.meta` sidecars.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use srti_core::combine::CombinedInstance;
use srti_core::io::{
    self, CombineProvenance, ProvenanceDocument, SeedProvenance,
};
use srti_core::seedgen::{SeedInstance, SeedParams};
use srti_core::Instance;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: io::ParseError },
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: io::DocumentError },
    #[error("{path}: expected a `{expected}` provenance document")]
    WrongKind { path: PathBuf, expected: &'static str },
}

/// Sidecar path: the instance path with `.meta` appended.
pub fn meta_path(instance_path: &Path) -> PathBuf {
    let mut os: OsString = instance_path.as_os_str().to_os_string();
    os.push(".meta");
    PathBuf::from(os)
}

fn write(path: &Path, text: &str) -> Result<(), FileError> {
    fs::write(path, text).map_err(|source| FileError::Io { path: path.to_path_buf(), source })
}

fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path)
        .map_err(|source| FileError::Io { path: path.to_path_buf(), source })
}

/// Writes an instance and its provenance sidecar.
pub fn write_instance(
    path: &Path,
    inst: &Instance,
    doc: &ProvenanceDocument,
) -> Result<(), FileError> {
    write(path, &io::serialize_instance(inst))?;
    write(&meta_path(path), &io::serialize_provenance(doc))
}

pub fn write_seed(path: &Path, params: &SeedParams, seed: &SeedInstance) -> Result<(), FileError> {
    let doc = ProvenanceDocument::Seed(SeedProvenance::new(params, seed));
    write_instance(path, seed.instance(), &doc)
}

pub fn write_combined(path: &Path, combined: &CombinedInstance) -> Result<(), FileError> {
    let doc = ProvenanceDocument::SeedCombine(CombineProvenance::new(combined));
    write_instance(path, combined.instance(), &doc)
}

pub fn read_instance(path: &Path) -> Result<Instance, FileError> {
    let text = read(path)?;
    io::parse_instance(&text)
        .map_err(|source| FileError::Parse { path: path.to_path_buf(), source })
}

/// Reads the provenance sidecar of an instance file.
pub fn read_provenance(instance_path: &Path) -> Result<ProvenanceDocument, FileError> {
    let path = meta_path(instance_path);
    let text = read(&path)?;
    io::parse_provenance(&text).map_err(|source| FileError::Parse { path, source })
}

/// Reads a seed instance: the `.srti` file plus a `seed` sidecar.
pub fn read_seed(path: &Path) -> Result<(SeedInstance, SeedProvenance), FileError> {
    let instance = read_instance(path)?;
    match read_provenance(path)? {
        ProvenanceDocument::Seed(doc) => {
            let seed = doc.to_seed(instance).map_err(|source| FileError::Document {
                path: meta_path(path),
                source,
            })?;
            Ok((seed, doc))
        }
        _ => Err(FileError::WrongKind { path: meta_path(path), expected: "seed" }),
    }
}
