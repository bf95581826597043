//! Single-file document store with an in-memory inverted index.
//!
//! A store directory holds:
//!
//! - `docs.log`: append-only log of JSON-encoded [`NewsDoc`]s, framed with a
//!   length and CRC-32 per record (see [`log`]). The newest record for a
//!   `doc_id` wins.
//! - `audit.ndjson`: one line per versioned overwrite.
//! - `LOCK`: held exclusively by the single writer.
//!
//! The index is rebuilt by replaying the log on open. Readers pick up new
//! records with [`Store::refresh`]; a partially written trailing record is
//! ignored until it is complete.

mod index;
pub mod log;

use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono_tz::Tz;
use mediascope_core::NewsDoc;
use serde::{Deserialize, Serialize};

pub use index::{DocFilter, DocIndex, FacetCount, FacetField, Page, QueryError, QueryResult};

pub const LOG_FILE: &str = "docs.log";
pub const AUDIT_FILE: &str = "audit.ndjson";
pub const LOCK_FILE: &str = "LOCK";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt record at offset {offset}: {reason}")]
    Corrupt { offset: u64, reason: String },
    #[error("bad log header: {0}")]
    BadHeader(String),
    #[error("store {} is locked by another writer", .0.display())]
    Locked(PathBuf),
    #[error("store {} does not exist", .0.display())]
    Missing(PathBuf),
    #[error("store is open read-only")]
    ReadOnly,
    #[error("encoding document {doc_id}: {reason}")]
    Encode { doc_id: String, reason: String },
}

/// What `index_doc` did with a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexOutcome {
    Inserted,
    Unchanged,
    /// Same `doc_id`, different content; `version` counts from 1.
    Overwritten { version: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub doc_id: String,
    pub version: u32,
    pub previous_crc: u32,
    pub new_crc: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreStats {
    pub docs: usize,
    pub records: usize,
    pub overwrites: usize,
    pub log_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Meta {
    version: u32,
    crc: u32,
}

pub struct Store {
    dir: PathBuf,
    index: DocIndex,
    meta: std::collections::HashMap<String, Meta>,
    writer: Option<(File, File)>,
    offset: u64,
    records: usize,
    overwrites: usize,
}

impl Store {
    /// Opens (creating if needed) a store for writing. Fails if another
    /// writer holds the lock. A torn trailing record left by a crash is
    /// truncated away.
    pub fn open_writer(dir: &Path, tz: Tz) -> Result<Store, StoreError> {
        fs::create_dir_all(dir)?;
        let lock = OpenOptions::new().create(true).truncate(false).write(true).open(dir.join(LOCK_FILE))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(fs::TryLockError::WouldBlock) => return Err(StoreError::Locked(dir.to_path_buf())),
            Err(fs::TryLockError::Error(e)) => return Err(e.into()),
        }
        let path = dir.join(LOG_FILE);
        let mut log = OpenOptions::new().create(true).truncate(false).read(true).write(true).open(&path)?;
        if log.metadata()?.len() == 0 {
            log.write_all(&log::header())?;
            log.sync_all()?;
        }
        let mut store = Store::empty(dir, tz);
        store.replay(&mut log)?;
        if log.metadata()?.len() > store.offset {
            ::log::warn!("truncating {} bytes of incomplete record at end of {}", log.metadata()?.len() - store.offset, path.display());
            log.set_len(store.offset)?;
        }
        log.seek(SeekFrom::End(0))?;
        store.writer = Some((log, lock));
        Ok(store)
    }

    /// Opens an existing store without taking the writer lock.
    pub fn open_reader(dir: &Path, tz: Tz) -> Result<Store, StoreError> {
        let path = dir.join(LOG_FILE);
        if !path.exists() {
            return Err(StoreError::Missing(dir.to_path_buf()));
        }
        let mut store = Store::empty(dir, tz);
        store.replay(&mut File::open(path)?)?;
        Ok(store)
    }

    fn empty(dir: &Path, tz: Tz) -> Store {
        Store {
            dir: dir.to_path_buf(),
            index: DocIndex::new(tz),
            meta: Default::default(),
            writer: None,
            offset: 0,
            records: 0,
            overwrites: 0,
        }
    }

    fn replay(&mut self, file: &mut File) -> Result<usize, StoreError> {
        if self.offset == 0 {
            let mut head = [0u8; log::HEADER_LEN as usize];
            file.seek(SeekFrom::Start(0))?;
            file.read_exact(&mut head).map_err(|_| StoreError::BadHeader("log shorter than header".into()))?;
            log::check_header(&head)?;
            self.offset = log::HEADER_LEN;
        }
        file.seek(SeekFrom::Start(self.offset))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let (decoded, used) = log::decode(&bytes, self.offset)?;
        let n = decoded.len();
        for d in decoded {
            self.apply(d.doc, d.crc);
        }
        self.offset += used as u64;
        Ok(n)
    }

    fn apply(&mut self, doc: NewsDoc, crc: u32) -> u32 {
        self.records += 1;
        let version = match self.meta.get(&doc.doc_id) {
            Some(m) => {
                self.overwrites += 1;
                m.version + 1
            }
            None => 1,
        };
        self.meta.insert(doc.doc_id.clone(), Meta { version, crc });
        self.index.put(doc);
        version
    }

    /// Reads records appended since the last open or refresh. Returns how
    /// many were applied.
    pub fn refresh(&mut self) -> Result<usize, StoreError> {
        let path = self.dir.join(LOG_FILE);
        if fs::metadata(&path)?.len() <= self.offset {
            return Ok(0);
        }
        self.replay(&mut File::open(path)?)
    }

    /// Appends `doc` unless an identical copy is already stored. A changed
    /// document with a known `doc_id` gets a new version and an audit line.
    pub fn index_doc(&mut self, doc: NewsDoc) -> Result<IndexOutcome, StoreError> {
        let (log_file, _) = self.writer.as_mut().ok_or(StoreError::ReadOnly)?;
        let payload = serde_json::to_vec(&doc).map_err(|e| StoreError::Encode { doc_id: doc.doc_id.clone(), reason: e.to_string() })?;
        let crc = crc32fast::hash(&payload);
        let previous = self.meta.get(&doc.doc_id).copied();
        if let Some(m) = previous {
            if m.crc == crc && self.index.get(&doc.doc_id) == Some(&doc) {
                return Ok(IndexOutcome::Unchanged);
            }
        }
        let frame = log::frame(&payload);
        log_file.write_all(&frame)?;
        self.offset += frame.len() as u64;
        let doc_id = doc.doc_id.clone();
        let version = self.apply(doc, crc);
        match previous {
            None => Ok(IndexOutcome::Inserted),
            Some(m) => {
                let entry = AuditEntry { doc_id, version, previous_crc: m.crc, new_crc: crc };
                let mut audit = OpenOptions::new().create(true).append(true).open(self.dir.join(AUDIT_FILE))?;
                let mut line = serde_json::to_vec(&entry).expect("audit entry serializes");
                line.push(b'\n');
                audit.write_all(&line)?;
                Ok(IndexOutcome::Overwritten { version })
            }
        }
    }

    /// Forces appended records to disk.
    pub fn commit(&mut self) -> Result<(), StoreError> {
        if let Some((log, _)) = &self.writer {
            log.sync_data()?;
        }
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn index(&self) -> &DocIndex {
        &self.index
    }

    pub fn get(&self, doc_id: &str) -> Option<&NewsDoc> {
        self.index.get(doc_id)
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn query(&self, filter: &DocFilter, page: Page) -> Result<QueryResult, QueryError> {
        self.index.query(filter, page)
    }

    pub fn facet_counts(&self, filter: &DocFilter, field: FacetField) -> Result<FacetCount, QueryError> {
        self.index.facet_counts(filter, field)
    }

    pub fn select(&self, filter: &DocFilter) -> Result<Vec<&NewsDoc>, QueryError> {
        self.index.select(filter)
    }

    pub fn version_of(&self, doc_id: &str) -> Option<u32> {
        self.meta.get(doc_id).map(|m| m.version)
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats { docs: self.index.len(), records: self.records, overwrites: self.overwrites, log_bytes: self.offset }
    }

    /// Bytes of the log file; useful to detect new records cheaply.
    pub fn log_len(&self) -> io::Result<u64> {
        Ok(fs::metadata(self.dir.join(LOG_FILE))?.len())
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }
}

impl Drop for Store {
    fn drop(&mut self) {
        if let Err(e) = self.commit() {
            ::log::error!("syncing store {}: {e}", self.dir.display());
        }
    }
}
