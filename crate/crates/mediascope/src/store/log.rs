//! Record framing for `docs.log`.
//!
//! ```text
//! header  : b"MSCPLOG\n" | version u32 LE
//! record  : payload length u32 LE | crc32(payload) u32 LE | payload (JSON NewsDoc)
//! ```

use mediascope_core::NewsDoc;

use super::StoreError;

pub const MAGIC: &[u8; 8] = b"MSCPLOG\n";
pub const LOG_VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 12;
const FRAME_HEAD: usize = 8;

pub fn header() -> Vec<u8> {
    let mut h = MAGIC.to_vec();
    h.extend_from_slice(&LOG_VERSION.to_le_bytes());
    h
}

pub fn check_header(bytes: &[u8]) -> Result<(), StoreError> {
    if bytes.len() < HEADER_LEN as usize || &bytes[..8] != MAGIC {
        return Err(StoreError::BadHeader("missing log magic".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != LOG_VERSION {
        return Err(StoreError::BadHeader(format!("unsupported log version {version}")));
    }
    Ok(())
}

pub fn frame(payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_HEAD + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    out.extend_from_slice(&crc32fast::hash(payload).to_le_bytes());
    out.extend_from_slice(payload);
    out
}

pub struct Decoded {
    pub offset: u64,
    pub crc: u32,
    pub doc: NewsDoc,
}

/// Decodes the complete records in `bytes`, which start at file offset
/// `base`. A trailing partial record is left unread; the returned length
/// covers complete records only.
pub fn decode(bytes: &[u8], base: u64) -> Result<(Vec<Decoded>, usize), StoreError> {
    let mut out = Vec::new();
    let mut pos = 0;
    while bytes.len() - pos >= FRAME_HEAD {
        let len = u32::from_le_bytes(bytes[pos..pos + 4].try_into().expect("4 bytes")) as usize;
        let crc = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().expect("4 bytes"));
        let end = pos + FRAME_HEAD + len;
        if end > bytes.len() {
            break;
        }
        let offset = base + pos as u64;
        let payload = &bytes[pos + FRAME_HEAD..end];
        if crc32fast::hash(payload) != crc {
            return Err(StoreError::Corrupt { offset, reason: "checksum mismatch".into() });
        }
        let doc = serde_json::from_slice(payload).map_err(|e| StoreError::Corrupt { offset, reason: e.to_string() })?;
        out.push(Decoded { offset, crc, doc });
        pos = end;
    }
    Ok((out, pos))
}
