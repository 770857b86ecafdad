//! Raw tensor container: a `.tns` file holds the row-major little-endian
//! 32-bit float payload, and a `.tns.json` sidecar holds the header
//! `{shape, sample_rate, hop_ms, channel_names}`. The payload is trivially
//! parseable from any language.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorHeader {
    pub shape: Vec<usize>,
    pub sample_rate: u32,
    pub hop_ms: f64,
    pub channel_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub header: TensorHeader,
    pub data: Vec<f32>,
}

impl TensorFile {
    pub fn new(header: TensorHeader, data: Vec<f32>) -> Result<Self> {
        let expect: usize = header.shape.iter().product();
        if expect != data.len() {
            return Err(Error::Shape(format!(
                "tensor shape {:?} implies {} values, payload has {}",
                header.shape,
                expect,
                data.len()
            )));
        }
        Ok(TensorFile { header, data })
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".json");
    path.with_file_name(name)
}

pub fn write_tensor(path: &Path, tensor: &TensorFile) -> Result<()> {
    let expect: usize = tensor.header.shape.iter().product();
    if expect != tensor.data.len() {
        return Err(Error::Shape(format!(
            "tensor shape {:?} implies {} values, payload has {}",
            tensor.header.shape,
            expect,
            tensor.data.len()
        )));
    }
    if tensor.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("tensor payload contains non-finite values".into()));
    }
    let mut payload = Vec::with_capacity(tensor.data.len() * 4);
    for v in &tensor.data {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    super::write_atomic(path, &payload)?;
    let json = serde_json::to_string_pretty(&tensor.header).expect("header serializes");
    super::write_atomic(&sidecar_path(path), json.as_bytes())
}

pub fn read_tensor(path: &Path) -> Result<TensorFile> {
    let format_err = |detail: String| Error::Format {
        path: path.to_path_buf(),
        detail,
    };
    let sidecar = sidecar_path(path);
    let header_text = std::fs::read_to_string(&sidecar).map_err(|e| Error::Format {
        path: sidecar.clone(),
        detail: e.to_string(),
    })?;
    let header: TensorHeader = serde_json::from_str(&header_text).map_err(|e| Error::Format {
        path: sidecar.clone(),
        detail: format!("bad header: {e}"),
    })?;
    let payload = std::fs::read(path).map_err(|e| format_err(e.to_string()))?;
    let expect: usize = header.shape.iter().product();
    if payload.len() != expect * 4 {
        return Err(format_err(format!(
            "payload is {} bytes, header shape {:?} requires {}",
            payload.len(),
            header.shape,
            expect * 4
        )));
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    TensorFile::new(header, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feature_header(shape: Vec<usize>) -> TensorHeader {
        TensorHeader {
            shape,
            sample_rate: 24_000,
            hop_ms: 20.0,
            channel_names: vec!["a".into(), "b".into()],
        }
    }

    #[test]
    fn payload_size_arithmetic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.tns");
        let n = 7 * 250 * 64;
        let t = TensorFile::new(feature_header(vec![7, 250, 64]), vec![0.5; n]).unwrap();
        write_tensor(&p, &t).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), (n * 4) as u64);
    }

    #[test]
    fn random_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.tns");
        let data: Vec<f32> = (0..3 * 5 * 7).map(|i| (i as f32 * 0.713).sin()).collect();
        let t = TensorFile::new(feature_header(vec![3, 5, 7]), data).unwrap();
        write_tensor(&p, &t).unwrap();
        let back = read_tensor(&p).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn truncated_payload_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.tns");
        let t = TensorFile::new(feature_header(vec![2, 2]), vec![1.0; 4]).unwrap();
        write_tensor(&p, &t).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        std::fs::write(&p, &bytes[..bytes.len() - 4]).unwrap();
        assert!(matches!(read_tensor(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn shape_payload_mismatch_rejected() {
        assert!(TensorFile::new(feature_header(vec![2, 3]), vec![0.0; 5]).is_err());
    }
}
