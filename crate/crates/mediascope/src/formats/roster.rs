use std::collections::HashSet;
use std::io::{BufRead, Write};

use mediascope_core::analytics::{AudienceThresholds, MediumKind, MediumProfile};
use mediascope_core::TweetRecord;
use serde::{Deserialize, Serialize};

use super::FormatError;

/// One line of the media roster: a follower snapshot per outlet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub handle: String,
    pub name: String,
    pub followers: u64,
    pub kind: String,
}

impl RosterEntry {
    pub fn profile(&self, thresholds: &AudienceThresholds) -> Result<MediumProfile, FormatError> {
        let kind: MediumKind = self.kind.parse().map_err(|e| FormatError::Invalid(format!("{}: {e}", self.handle)))?;
        Ok(MediumProfile::new(&self.handle, &self.name, self.followers, kind, thresholds))
    }
}

/// Reads the roster and derives each outlet's audience class.
pub fn read_roster(reader: impl BufRead, thresholds: &AudienceThresholds) -> Result<Vec<MediumProfile>, FormatError> {
    let mut out: Vec<MediumProfile> = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: RosterEntry = serde_json::from_str(&line).map_err(|e| FormatError::line(i + 1, e.to_string()))?;
        if !seen.insert(handle_key(&entry.handle)) {
            return Err(FormatError::line(i + 1, format!("duplicate handle {}", entry.handle)));
        }
        out.push(entry.profile(thresholds).map_err(|e| FormatError::line(i + 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn write_roster(entries: &[RosterEntry], mut out: impl Write) -> std::io::Result<()> {
    for e in entries {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn handle_key(handle: &str) -> String {
    handle.trim().trim_start_matches('@').to_lowercase()
}

/// Marks records whose medium is not in the roster (ignoring case and a
/// leading `@`) and returns how many were marked.
pub fn flag_unknown_media(records: &mut [TweetRecord], roster: &[MediumProfile]) -> usize {
    let known: HashSet<String> = roster.iter().map(|p| handle_key(&p.handle)).collect();
    let mut flagged = 0;
    for r in records {
        r.unknown_medium = !known.contains(&handle_key(&r.medium_handle));
        flagged += usize::from(r.unknown_medium);
    }
    flagged
}

#[cfg(test)]
mod tests {
    use super::*;
    use mediascope_core::analytics::AudienceClass;

    #[test]
    fn roster_derives_audience_class() {
        let text = concat!(
            r#"{"handle":"Cooperativa","name":"Cooperativa","followers":2500000,"kind":"radio"}"#,
            "\n",
            r#"{"handle":"latercera","name":"La Tercera","followers":500000,"kind":"print"}"#,
        );
        let roster = read_roster(text.as_bytes(), &AudienceThresholds::default()).unwrap();
        assert_eq!(roster[0].audience_class, AudienceClass::High);
        assert_eq!(roster[1].audience_class, AudienceClass::Low);
    }

    #[test]
    fn unknown_kind_and_duplicates_fail() {
        let bad = r#"{"handle":"x","name":"X","followers":1,"kind":"blog"}"#;
        assert!(read_roster(bad.as_bytes(), &AudienceThresholds::default()).is_err());
        let dup = format!("{0}\n{0}", r#"{"handle":"x","name":"X","followers":1,"kind":"tv"}"#);
        assert!(matches!(read_roster(dup.as_bytes(), &AudienceThresholds::default()), Err(FormatError::Line { line: 2, .. })));
    }
}
