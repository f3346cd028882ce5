//! Field files: a JSON header next to a flat sample file.
//!
//! The header names the layout, shape, box and anisotropy; samples are stored
//! row-major (last axis fastest) either as little-endian `f64` or as one
//! decimal value per CSV line.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boxfield::{BoxField, BoxGrid};
use crate::error::{PlpError, Result};
use crate::field::Field;
use crate::geometry::{Anisotropy, AxisBox};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    F64Le,
    Csv,
}

impl Encoding {
    fn extension(self) -> &'static str {
        match self {
            Encoding::F64Le => "bin",
            Encoding::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Periodic torus samples, `[lower, upper)`.
    Periodic,
    /// Closed box samples, endpoints included.
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub layout: Layout,
    pub dims: Vec<usize>,
    #[serde(rename = "box")]
    pub domain: AxisBox,
    pub anisotropy: Anisotropy,
    pub encoding: Encoding,
    /// Sample file, relative to the header's directory.
    pub data: String,
}

/// Either kind of sampled field.
#[derive(Debug, Clone)]
pub enum FieldData {
    Periodic(Field),
    Closed(BoxField),
}

impl FieldData {
    pub fn values(&self) -> &[f64] {
        match self {
            FieldData::Periodic(f) => f.values(),
            FieldData::Closed(f) => f.values(),
        }
    }

    pub fn header(&self, encoding: Encoding, data: String) -> FieldHeader {
        let (layout, dims, domain, anisotropy) = match self {
            FieldData::Periodic(f) => (Layout::Periodic, f.grid().dims(), f.grid().domain(), f.grid().anisotropy()),
            FieldData::Closed(f) => (Layout::Closed, f.grid().dims(), f.grid().domain(), f.grid().anisotropy()),
        };
        FieldHeader {
            layout,
            dims: dims.to_vec(),
            domain: domain.clone(),
            anisotropy: anisotropy.clone(),
            encoding,
            data,
        }
    }

    pub fn into_periodic(self) -> Result<Field> {
        match self {
            FieldData::Periodic(f) => Ok(f),
            FieldData::Closed(_) => Err(PlpError::config("expected a periodic field, found a closed-box field")),
        }
    }

    pub fn into_closed(self) -> Result<BoxField> {
        match self {
            FieldData::Closed(f) => Ok(f),
            FieldData::Periodic(_) => Err(PlpError::config("expected a closed-box field, found a periodic field")),
        }
    }
}

impl From<Field> for FieldData {
    fn from(f: Field) -> Self {
        FieldData::Periodic(f)
    }
}

impl From<BoxField> for FieldData {
    fn from(f: BoxField) -> Self {
        FieldData::Closed(f)
    }
}

fn data_path(header_path: &Path, encoding: Encoding) -> PathBuf {
    header_path.with_extension(encoding.extension())
}

/// Writes `header_path` and the sample file beside it (same stem, `.bin` or
/// `.csv`); returns the sample file's path.
pub fn write_field(header_path: &Path, field: &FieldData, encoding: Encoding) -> Result<PathBuf> {
    let data = data_path(header_path, encoding);
    let name = data
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| PlpError::config(format!("unusable output path {}", header_path.display())))?
        .to_string();
    match encoding {
        Encoding::F64Le => {
            let bytes: Vec<u8> = field.values().iter().flat_map(|v| v.to_le_bytes()).collect();
            fs::write(&data, bytes)?;
        }
        Encoding::Csv => {
            let mut text = String::with_capacity(field.values().len() * 24);
            for v in field.values() {
                text.push_str(&format!("{v:?}\n"));
            }
            fs::write(&data, text)?;
        }
    }
    let header = field.header(encoding, name);
    fs::write(header_path, serde_json::to_string_pretty(&header)?)?;
    Ok(data)
}

pub fn read_header(header_path: &Path) -> Result<FieldHeader> {
    let text = fs::read_to_string(header_path)?;
    serde_json::from_str(&text).map_err(|e| PlpError::data(format!("bad field header {}: {e}", header_path.display())))
}

pub fn read_field(header_path: &Path) -> Result<FieldData> {
    let header = read_header(header_path)?;
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let path = dir.join(&header.data);
    let expected: usize = header.dims.iter().product();
    let values = match header.encoding {
        Encoding::F64Le => {
            let bytes = fs::read(&path)?;
            if bytes.len() != 8 * expected {
                return Err(PlpError::data(format!(
                    "{} holds {} bytes, header promises {expected} samples",
                    path.display(),
                    bytes.len()
                )));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect::<Vec<_>>()
        }
        Encoding::Csv => {
            let text = fs::read_to_string(&path)?;
            let values = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| PlpError::data(format!("{}: bad sample {s:?}: {e}", path.display())))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != expected {
                return Err(PlpError::data(format!(
                    "{} holds {} samples, header promises {expected}",
                    path.display(),
                    values.len()
                )));
            }
            values
        }
    };
    match header.layout {
        Layout::Periodic => {
            let grid = Grid::new(header.dims, header.domain, header.anisotropy)?;
            Ok(FieldData::Periodic(Field::new(Arc::new(grid), values)?))
        }
        Layout::Closed => {
            let grid = BoxGrid::new(header.dims, header.domain, header.anisotropy)?;
            Ok(FieldData::Closed(BoxField::new(Arc::new(grid), values)?))
        }
    }
}
