//! `model.bin`: the core's binary model encoding written to disk.

use std::path::Path;

use gtn_core::net::{decode_model, encode_model, Mlp};

use crate::error::{LabError, Result};

pub fn save_model(path: &Path, model: &Mlp) -> Result<()> {
    std::fs::write(path, encode_model(model)).map_err(|e| LabError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Mlp> {
    let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
    decode_model(&bytes).map_err(|e| LabError::Model { path: path.into(), message: e.to_string() })
}
