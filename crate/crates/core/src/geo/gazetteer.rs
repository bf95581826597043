use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::text::toponym_key;

/// One gazetteer row (GeoNames column subset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub geoname_id: u64,
    pub name: String,
    pub ascii_name: String,
    pub alternate_names: Vec<String>,
    pub latitude: f64,
    pub longitude: f64,
    /// `P` populated place, `A` country or administrative area, ...
    pub feature_class: char,
    pub feature_code: String,
    pub country_code: String,
    pub population: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GazetteerError {
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
    #[error("country code {0:?} is not two letters")]
    CountryCode(String),
    #[error("entry has an empty name")]
    EmptyName,
}

impl GazetteerEntry {
    pub fn validate(&self) -> Result<(), GazetteerError> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(GazetteerError::Latitude(self.latitude));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return Err(GazetteerError::Longitude(self.longitude));
        }
        if self.country_code.len() != 2
            || !self.country_code.chars().all(|c| c.is_ascii_alphabetic())
        {
            return Err(GazetteerError::CountryCode(self.country_code.clone()));
        }
        if self.name.trim().is_empty() {
            return Err(GazetteerError::EmptyName);
        }
        Ok(())
    }

    /// Country-level entry: class `A` with a `PCL*` feature code.
    pub fn is_country(&self) -> bool {
        self.feature_class == 'A' && self.feature_code.starts_with("PCL")
    }

    /// Every surface the entry is indexed under.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        core::iter::once(self.name.as_str())
            .chain(core::iter::once(self.ascii_name.as_str()))
            .chain(self.alternate_names.iter().map(String::as_str))
            .filter(|n| !n.trim().is_empty())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GazetteerStats {
    pub rows: usize,
    /// Distinct normalized lookup keys.
    pub distinct_names: usize,
    /// Country-level entries.
    pub countries: usize,
    /// Populated places (class `P`).
    pub places: usize,
    /// Distinct country codes across all rows.
    pub country_codes: usize,
}

/// Normalized-name index over gazetteer entries. Keys are case- and
/// accent-folded, so `Concepción`, `CONCEPCION` and `concepcion` meet.
#[derive(Debug, Clone, Default)]
pub struct GazetteerIndex {
    entries: Vec<GazetteerEntry>,
    keys: HashMap<String, Vec<u32>>,
    country_codes: BTreeSet<String>,
    max_key_words: usize,
}

impl GazetteerIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = GazetteerEntry>) -> Self {
        let mut index = Self::new();
        for e in entries {
            index.insert(e);
        }
        index
    }

    /// Adds an entry under its name, ASCII name and every alternate name.
    pub fn insert(&mut self, entry: GazetteerEntry) {
        let id = self.entries.len() as u32;
        for name in entry.names() {
            let key = toponym_key(name);
            if key.is_empty() {
                continue;
            }
            self.max_key_words = self.max_key_words.max(key.split(' ').count());
            let slot = self.keys.entry(key).or_default();
            if slot.last() != Some(&id) {
                slot.push(id);
            }
        }
        self.country_codes.insert(entry.country_code.clone());
        self.entries.push(entry);
    }

    pub fn lookup(&self, name: &str) -> Vec<&GazetteerEntry> {
        self.lookup_key(&toponym_key(name))
    }

    /// Lookup by an already normalized key.
    pub fn lookup_key(&self, key: &str) -> Vec<&GazetteerEntry> {
        self.keys
            .get(key)
            .map(|ids| ids.iter().map(|&i| &self.entries[i as usize]).collect())
            .unwrap_or_default()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.keys.contains_key(key)
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Most words in any key.
    pub fn max_key_words(&self) -> usize {
        self.max_key_words
    }

    pub fn stats(&self) -> GazetteerStats {
        GazetteerStats {
            rows: self.entries.len(),
            distinct_names: self.keys.len(),
            countries: self.entries.iter().filter(|e| e.is_country()).count(),
            places: self
                .entries
                .iter()
                .filter(|e| e.feature_class == 'P')
                .count(),
            country_codes: self.country_codes.len(),
        }
    }
}
