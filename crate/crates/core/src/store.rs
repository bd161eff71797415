//! On-disk snapshot store.
//!
//! File layout (little endian):
//!
//! ```text
//! magic   8 bytes  "SCHSCOPE"
//! format  u32
//! length  u64      payload byte count
//! sha256  32 bytes digest of the payload
//! payload bincode-encoded CatalogParts
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::CatalogParts;

pub const MAGIC: &[u8; 8] = b"SCHSCOPE";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 8 + 32;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("not a snapshot file (bad magic)")]
    BadMagic,
    #[error("snapshot format {found} is newer than supported format {supported}")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("snapshot checksum mismatch (file truncated or corrupted)")]
    ChecksumMismatch,
    #[error("snapshot payload could not be decoded: {0}")]
    Decode(String),
    #[error("snapshot payload could not be encoded: {0}")]
    Encode(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn encode(parts: &CatalogParts) -> Result<Vec<u8>, StoreError> {
    let payload = bincode::serialize(parts).map_err(|e| StoreError::Encode(e.to_string()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&Sha256::digest(&payload));
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<CatalogParts, StoreError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(StoreError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(StoreError::ChecksumMismatch);
    }
    let format = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if format > FORMAT_VERSION {
        return Err(StoreError::VersionMismatch {
            found: format,
            supported: FORMAT_VERSION,
        });
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    let digest = &bytes[20..HEADER_LEN];
    let payload = &bytes[HEADER_LEN..];
    if payload.len() as u64 != len || Sha256::digest(payload).as_slice() != digest {
        return Err(StoreError::ChecksumMismatch);
    }
    bincode::deserialize(payload).map_err(|e| StoreError::Decode(e.to_string()))
}

/// Writes atomically through a temporary sibling file.
pub fn save_snapshot(parts: &CatalogParts, path: &Path) -> Result<(), StoreError> {
    let bytes = encode(parts)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<CatalogParts, StoreError> {
    decode(&fs::read(path)?)
}
