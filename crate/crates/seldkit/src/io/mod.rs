//! File formats: FOA WAV audio, DCASE-style metadata CSVs, raw tensor files
//! with JSON sidecars, and JSON score reports.
//!
//! All readers are strict: malformed input is rejected with a diagnostic
//! (path, and line number where applicable) rather than repaired. Writers go
//! through a write-temp-then-rename helper so partially written files never
//! appear under the target name.

mod metadata;
mod tensor;
mod wav;

pub use metadata::{
    metadata_to_string, parse_metadata, read_metadata_csv, write_metadata_csv, MetadataTable,
};
pub use tensor::{read_tensor, write_tensor, TensorFile, TensorHeader};
pub use wav::{read_foa_wav, write_foa_wav};

use std::path::Path;

use crate::error::Result;

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let stem = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = dir.join(format!(".{}.tmp-{}", stem, std::process::id()));
    std::fs::write(&tmp, bytes)?;
    match std::fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(e.into())
        }
    }
}
