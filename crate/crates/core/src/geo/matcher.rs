use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{GazetteerEntry, GazetteerIndex};
use crate::nlp::{Span, Token, TokenKind};
use crate::text::toponym_key;

/// Covers multiword toponyms such as "Viña del Mar".
pub const DEFAULT_MAX_NGRAM: usize = 3;

/// Tags that mark a lowercase single word as a verb or function word, which
/// is never read as a toponym ("los precios caen" is not Caen). Matched as
/// tag prefixes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectTags {
    pub prefixes: Vec<String>,
}

impl Default for RejectTags {
    fn default() -> Self {
        let prefixes = [
            "V", "ART", "DM", "PREP", "PDEL", "PAL", "CC", "CQUE", "CSUB", "PPC", "PPO", "PPX",
            "REL", "SE", "NEG", "QU", "INT",
        ];
        RejectTags {
            prefixes: prefixes.iter().map(|p| String::from(*p)).collect(),
        }
    }
}

impl RejectTags {
    pub fn rejects(&self, tag: Option<&str>) -> bool {
        tag.is_some_and(|t| self.prefixes.iter().any(|p| t.starts_with(p.as_str())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToponymCandidate<'a> {
    pub surface: String,
    pub span: Span,
    pub entries: Vec<&'a GazetteerEntry>,
}

/// Longest-match-first scan over runs of word tokens.
///
/// At each position the longest n-gram (up to `max_ngram` words) whose
/// normalized form is a gazetteer key wins and the scan resumes after it,
/// so accepted candidates never overlap. A single word written in lowercase
/// and tagged as a verb or function word is skipped.
pub fn match_toponyms<'a>(
    tokens: &[Token],
    index: &'a GazetteerIndex,
    max_ngram: usize,
    reject: &RejectTags,
) -> Vec<ToponymCandidate<'a>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].kind != TokenKind::Word {
            i += 1;
            continue;
        }
        let run_len = tokens[i..]
            .iter()
            .take_while(|t| t.kind == TokenKind::Word)
            .count();
        let mut matched = 0;
        for n in (1..=max_ngram.min(run_len)).rev() {
            let words = &tokens[i..i + n];
            if n == 1 {
                let t = &words[0];
                let lowercase = !t.surface.chars().any(char::is_uppercase);
                if lowercase && reject.rejects(t.pos.as_deref()) {
                    continue;
                }
            }
            let joined: Vec<&str> = words.iter().map(|t| t.surface.as_str()).collect();
            let key = toponym_key(&joined.join(" "));
            let entries = index.lookup_key(&key);
            if entries.is_empty() {
                continue;
            }
            let span = Span {
                start: words[0].span.start,
                end: words[n - 1].span.end,
            };
            out.push(ToponymCandidate {
                surface: joined.join(" "),
                span,
                entries,
            });
            matched = n;
            break;
        }
        i += matched.max(1);
    }
    out
}

/// Coordinates and identity of a resolved gazetteer entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceRef {
    pub geoname_id: u64,
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub feature_class: char,
    pub feature_code: String,
    pub country_code: String,
    pub population: u64,
}

impl From<&GazetteerEntry> for PlaceRef {
    fn from(e: &GazetteerEntry) -> Self {
        PlaceRef {
            geoname_id: e.geoname_id,
            name: e.name.clone(),
            latitude: e.latitude,
            longitude: e.longitude,
            feature_class: e.feature_class,
            feature_code: e.feature_code.clone(),
            country_code: e.country_code.clone(),
            population: e.population,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MentionScope {
    /// City, town or region inside the news item's country.
    Locality,
    /// A country name; kept whatever the news item's country.
    Country,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoMention {
    pub surface: String,
    pub span: Span,
    pub entry: PlaceRef,
    pub scope: MentionScope,
    /// Filters the resolution went through, in order.
    pub notes: Vec<String>,
}

fn pick<'a>(
    entries: impl Iterator<Item = &'a GazetteerEntry>,
) -> Option<(&'a GazetteerEntry, usize)> {
    let mut count = 0;
    let best = entries.inspect(|_| count += 1).min_by(|a, b| {
        b.population
            .cmp(&a.population)
            .then(a.geoname_id.cmp(&b.geoname_id))
    });
    best.map(|b| (b, count))
}

/// Resolves each candidate to one entry.
///
/// A candidate naming a country resolves to that country. Otherwise only
/// entries in `country_hint` survive; among several, the most populous wins,
/// then the lowest id. Candidates with nothing left are dropped.
pub fn disambiguate(candidates: &[ToponymCandidate<'_>], country_hint: &str) -> Vec<GeoMention> {
    let mut out = Vec::new();
    for c in candidates {
        let mut notes = Vec::new();
        let (entry, scope) =
            if let Some((e, _)) = pick(c.entries.iter().copied().filter(|e| e.is_country())) {
                notes.push(String::from("country_level"));
                (e, MentionScope::Country)
            } else {
                let in_country = c.entries.iter().copied().filter(|e| {
                    !e.is_country() && e.country_code.eq_ignore_ascii_case(country_hint)
                });
                let Some((e, n)) = pick(in_country) else {
                    continue;
                };
                notes.push(String::from("in_country"));
                if n > 1 {
                    notes.push(String::from("highest_population"));
                }
                (e, MentionScope::Locality)
            };
        out.push(GeoMention {
            surface: c.surface.clone(),
            span: c.span,
            entry: PlaceRef::from(entry),
            scope,
            notes,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoAggregate {
    pub geoname_id: u64,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub count: u64,
}

/// Mention counts per place, most mentioned first, then by id.
pub fn aggregate_geo<'a>(mentions: impl IntoIterator<Item = &'a GeoMention>) -> Vec<GeoAggregate> {
    let mut by_id: BTreeMap<u64, GeoAggregate> = BTreeMap::new();
    for m in mentions {
        by_id
            .entry(m.entry.geoname_id)
            .or_insert_with(|| GeoAggregate {
                geoname_id: m.entry.geoname_id,
                name: m.entry.name.clone(),
                lat: m.entry.latitude,
                lon: m.entry.longitude,
                count: 0,
            })
            .count += 1;
    }
    let mut out: Vec<GeoAggregate> = by_id.into_values().collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then(a.geoname_id.cmp(&b.geoname_id)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlp::tokenize;
    use alloc::string::ToString;
    use alloc::vec;

    fn entry(id: u64, name: &str, cc: &str, code: &str, pop: u64) -> GazetteerEntry {
        GazetteerEntry {
            geoname_id: id,
            name: name.to_string(),
            ascii_name: crate::text::accent_fold(name),
            alternate_names: vec![],
            latitude: -39.8,
            longitude: -73.2,
            feature_class: if code.starts_with("PCL") { 'A' } else { 'P' },
            feature_code: code.to_string(),
            country_code: cc.to_string(),
            population: pop,
        }
    }

    fn tagged(text: &str, tags: &[&str]) -> Vec<Token> {
        let mut toks = tokenize(text);
        for (t, tag) in toks.iter_mut().zip(tags) {
            t.pos = Some(tag.to_string());
        }
        toks
    }

    fn index() -> GazetteerIndex {
        GazetteerIndex::from_entries([
            entry(1, "Valdivia", "CL", "PPLA", 150_000),
            entry(2, "Valdivia", "CO", "PPL", 5_000),
            entry(3, "Caen", "FR", "PPLA2", 110_000),
            entry(4, "Viña del Mar", "CL", "PPL", 330_000),
            entry(5, "Mar", "CL", "PPL", 10),
            entry(6, "Argentina", "AR", "PCLI", 44_000_000),
        ])
    }

    #[test]
    fn lowercase_verb_rejected() {
        let idx = index();
        let toks = tagged("los precios caen hoy", &["ART", "NC", "VLfin", "ADV"]);
        assert!(match_toponyms(&toks, &idx, 3, &RejectTags::default()).is_empty());
        let toks = tagged("visitó Caen ayer", &["VLfin", "NP", "ADV"]);
        let c = match_toponyms(&toks, &idx, 3, &RejectTags::default());
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].entries[0].country_code, "FR");
        // Hint CL drops the only (French) entry.
        assert!(disambiguate(&c, "CL").is_empty());
        assert_eq!(disambiguate(&c, "FR").len(), 1);
    }

    #[test]
    fn longest_match_wins() {
        let idx = index();
        let toks = tagged(
            "Temporal en Viña del Mar",
            &["NC", "PREP", "NP", "PDEL", "NP"],
        );
        let c = match_toponyms(&toks, &idx, 3, &RejectTags::default());
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].surface, "Viña del Mar");
        assert_eq!(
            &"Temporal en Viña del Mar"[c[0].span.start..c[0].span.end],
            "Viña del Mar"
        );
        let short = match_toponyms(&toks, &idx, 1, &RejectTags::default());
        assert_eq!(short.len(), 1);
        assert_eq!(short[0].surface, "Mar");
    }

    #[test]
    fn in_country_rule() {
        let idx = index();
        let toks = tagged("Lluvias en Valdivia", &["NC", "PREP", "NP"]);
        let m = disambiguate(
            &match_toponyms(&toks, &idx, 3, &RejectTags::default()),
            "CL",
        );
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].entry.geoname_id, 1);
        assert_eq!(m[0].scope, MentionScope::Locality);
    }

    #[test]
    fn population_then_id() {
        let big = entry(20, "San Pedro", "CL", "PPL", 150_000);
        let small = entry(10, "San Pedro", "CL", "PPL", 900);
        let tie = entry(30, "San Pedro", "CL", "PPL", 150_000);
        let cand = ToponymCandidate {
            surface: "San Pedro".to_string(),
            span: Span { start: 0, end: 9 },
            entries: vec![&small, &big, &tie],
        };
        let m = disambiguate(&[cand], "CL");
        assert_eq!(m[0].entry.geoname_id, 20);
        assert!(m[0].notes.iter().any(|n| n == "highest_population"));
    }

    #[test]
    fn countries_bypass_hint() {
        let idx = index();
        let toks = tagged("Gol de Argentina", &["NC", "PREP", "NP"]);
        let m = disambiguate(
            &match_toponyms(&toks, &idx, 3, &RejectTags::default()),
            "CL",
        );
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].scope, MentionScope::Country);
        assert_eq!(m[0].entry.country_code, "AR");
    }

    #[test]
    fn aggregate_counts() {
        assert!(aggregate_geo(&[]).is_empty());
        let idx = index();
        let toks = tagged("Valdivia", &["NP"]);
        let one = disambiguate(
            &match_toponyms(&toks, &idx, 3, &RejectTags::default()),
            "CL",
        );
        let all: Vec<GeoMention> = (0..3).flat_map(|_| one.clone()).collect();
        let agg = aggregate_geo(&all);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].count, 3);
        assert_eq!(agg[0].geoname_id, 1);
    }

    #[test]
    fn empty_tokens() {
        assert!(match_toponyms(&[], &index(), 3, &RejectTags::default()).is_empty());
    }
}
