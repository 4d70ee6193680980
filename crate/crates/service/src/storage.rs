//! On-disk layout, one directory per project:
//!
//! ```text
//! <root>/<project>/project.json
//! <root>/<project>/wells/<well>.json   dataset manifest
//! <root>/<project>/wells/<well>.bin    depth then each curve, f64 little endian
//! <root>/<project>/wells/<well>.undo.{json,bin}
//! <root>/<project>/selections/<id>.json
//! <root>/<project>/models/<id>.json
//! ```
//!
//! Missing cells are stored as NaN, which no loaded value can be.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mlogs_core::{CurveData, WellDataset};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

const MAGIC: &[u8; 8] = b"MLOGCOL1";

type Result<T> = std::result::Result<T, ServiceError>;

#[derive(Debug, Serialize, Deserialize)]
struct DatasetManifest {
    well: String,
    depth_name: String,
    depth_unit: String,
    rows: usize,
    curves: Vec<CurveEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveEntry {
    name: String,
    unit: String,
    description: String,
}

/// Writes through a sibling temp file and a rename so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let write = || -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| ServiceError::storage(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_vec_pretty(value).map_err(|e| ServiceError::storage(path, e))?;
    write_atomic(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| ServiceError::storage(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| ServiceError::storage(path, e))
}

pub fn remove_file(path: &Path) -> Result<()> {
    match fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(ServiceError::storage(path, e)),
        _ => Ok(()),
    }
}

fn paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.bin")))
}

pub fn write_dataset(dir: &Path, stem: &str, ds: &WellDataset) -> Result<()> {
    let (json, bin) = paths(dir, stem);
    let manifest = DatasetManifest {
        well: ds.well().to_string(),
        depth_name: ds.depth_name().to_string(),
        depth_unit: ds.depth_unit().to_string(),
        rows: ds.row_count(),
        curves: ds
            .curves()
            .map(|(name, c)| CurveEntry {
                name: name.to_string(),
                unit: c.unit.clone(),
                description: c.description.clone(),
            })
            .collect(),
    };
    let mut bytes = Vec::with_capacity(MAGIC.len() + 8 * ds.row_count() * (1 + manifest.curves.len()));
    bytes.extend_from_slice(MAGIC);
    for d in ds.depth() {
        bytes.extend_from_slice(&d.to_le_bytes());
    }
    for (_, c) in ds.curves() {
        for v in c.values() {
            bytes.extend_from_slice(&v.unwrap_or(f64::NAN).to_le_bytes());
        }
    }
    write_atomic(&bin, &bytes)?;
    write_json(&json, &manifest)
}

pub fn read_dataset(dir: &Path, stem: &str) -> Result<WellDataset> {
    let (json, bin) = paths(dir, stem);
    let manifest: DatasetManifest = read_json(&json)?;
    let bytes = fs::read(&bin).map_err(|e| ServiceError::storage(&bin, e))?;
    let n = manifest.rows;
    let expected = MAGIC.len() + 8 * n * (1 + manifest.curves.len());
    if !bytes.starts_with(MAGIC) || bytes.len() != expected {
        return Err(ServiceError::storage(
            &bin,
            format!("expected {expected} bytes of column data, found {}", bytes.len()),
        ));
    }
    let mut columns = bytes[MAGIC.len()..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let depth: Vec<f64> = columns.by_ref().take(n).collect();
    let corrupt = |e: mlogs_core::Error| ServiceError::storage(&bin, e);
    let mut ds = WellDataset::new(manifest.well, depth, manifest.depth_unit)
        .map_err(corrupt)?
        .with_depth_name(manifest.depth_name);
    for entry in manifest.curves {
        let values = columns
            .by_ref()
            .take(n)
            .map(|v| (!v.is_nan()).then_some(v))
            .collect();
        let curve = CurveData::new(values, entry.unit)
            .map_err(corrupt)?
            .with_description(entry.description);
        ds = ds.with_curve(entry.name, curve).map_err(corrupt)?;
    }
    Ok(ds)
}

pub fn remove_dataset(dir: &Path, stem: &str) -> Result<()> {
    let (json, bin) = paths(dir, stem);
    remove_file(&json)?;
    remove_file(&bin)
}
