//! Indicators over stored documents, as JSON and as a plain-text digest.
//!
//! Volume and concentration count emissions (every tweet); topic and geo
//! figures count unique documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use chrono_tz::Tz;
use mediascope_core::analytics::{
    check_reported_totals, tendency_flags, top_k_share, topic_shares, volume_series, AudienceClass, Granularity, GroupBy,
    MediumKind, MediumProfile, TendencyFlags, TendencyThresholds, TopicShares, VolumeSeries,
};
use mediascope_core::classify::{EvalReport, TopicLabel};
use mediascope_core::geo::{aggregate_geo, GeoAggregate};
use mediascope_core::NewsDoc;
use serde::{Deserialize, Serialize};

use crate::config::ReportConfig;

pub fn emission_times<'a>(docs: impl IntoIterator<Item = &'a NewsDoc>) -> Vec<DateTime<Utc>> {
    docs.into_iter().flat_map(|d| d.emissions.iter().map(|e| e.published_at)).collect()
}

pub fn volume(docs: &[&NewsDoc], granularity: Granularity, tz: Tz) -> VolumeSeries {
    volume_series(emission_times(docs.iter().copied()), granularity, tz)
}

/// Emissions per medium handle, sorted by handle.
pub fn emissions_per_medium(docs: &[&NewsDoc]) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for e in docs.iter().flat_map(|d| &d.emissions) {
        *counts.entry(&e.medium_handle).or_default() += 1;
    }
    counts.into_iter().map(|(h, c)| (h.to_string(), c)).collect()
}

/// Topic shares over classified documents.
pub fn topics(docs: &[&NewsDoc], group_by: GroupBy) -> Vec<TopicShares> {
    topic_shares(docs.iter().filter_map(|d| d.topic.map(|t| (d.medium_handle.as_str(), t))), group_by)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TendencyRow {
    pub group: String,
    pub doc_count: u64,
    pub flags: TendencyFlags,
}

/// Tendency flags per medium, followed by the corpus-wide row.
pub fn tendencies(docs: &[&NewsDoc], thresholds: &TendencyThresholds) -> Vec<TendencyRow> {
    let mut groups = topics(docs, GroupBy::Medium);
    groups.extend(topics(docs, GroupBy::All));
    groups
        .iter()
        .map(|g| TendencyRow { group: g.group.clone(), doc_count: g.doc_count, flags: tendency_flags(g, thresholds) })
        .collect()
}

pub fn geo(docs: &[&NewsDoc]) -> Vec<GeoAggregate> {
    aggregate_geo(docs.iter().flat_map(|d| &d.geo_mentions))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub k: usize,
    pub share: Option<f64>,
    pub media: usize,
    pub emissions: u64,
}

pub fn concentration(docs: &[&NewsDoc], k: usize) -> Concentration {
    let counts = emissions_per_medium(docs);
    Concentration { k, share: top_k_share(&counts, k), media: counts.len(), emissions: counts.iter().map(|(_, c)| c).sum() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediumRow {
    pub handle: String,
    pub display_name: String,
    pub follower_count: u64,
    pub medium_kind: MediumKind,
    pub audience_class: AudienceClass,
    pub emissions: u64,
    pub unique_docs: u64,
}

/// Roster rows with their production, most emissions first, then handle.
pub fn media_table(roster: &[MediumProfile], docs: &[&NewsDoc]) -> Vec<MediumRow> {
    let emissions: BTreeMap<String, u64> = emissions_per_medium(docs).into_iter().collect();
    let mut unique: BTreeMap<&str, u64> = BTreeMap::new();
    for d in docs {
        *unique.entry(&d.medium_handle).or_default() += 1;
    }
    let mut rows: Vec<MediumRow> = roster
        .iter()
        .map(|p| MediumRow {
            handle: p.handle.clone(),
            display_name: p.display_name.clone(),
            follower_count: p.follower_count,
            medium_kind: p.medium_kind,
            audience_class: p.audience_class,
            emissions: emissions.get(&p.handle).copied().unwrap_or(0),
            unique_docs: unique.get(p.handle.as_str()).copied().unwrap_or(0),
        })
        .collect();
    rows.sort_by(|a, b| b.emissions.cmp(&a.emissions).then_with(|| a.handle.cmp(&b.handle)));
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub timezone: String,
    pub emissions: u64,
    pub unique_docs: usize,
    pub monthly: VolumeSeries,
    pub daily: VolumeSeries,
    pub media: Vec<MediumRow>,
    pub concentration: Concentration,
    pub topics: Vec<TopicShares>,
    pub tendencies: Vec<TendencyRow>,
    pub geo: Vec<GeoAggregate>,
    /// Mismatches between configured reference figures and the data.
    pub checks: Vec<String>,
}

pub fn build_report(docs: &[&NewsDoc], roster: &[MediumProfile], tz: Tz, config: &ReportConfig) -> Report {
    let monthly = volume(docs, Granularity::Month, tz);
    let checks = check_reported_totals(&monthly, config.reported_total, config.reported_monthly_mean);
    for c in &checks {
        log::warn!("{c}");
    }
    let mut topic_rows = topics(docs, GroupBy::Medium);
    topic_rows.extend(topics(docs, GroupBy::All));
    Report {
        timezone: tz.name().to_string(),
        emissions: monthly.total(),
        unique_docs: docs.len(),
        daily: volume(docs, Granularity::Day, tz),
        monthly,
        media: media_table(roster, docs),
        concentration: concentration(docs, config.top_k),
        topics: topic_rows,
        tendencies: tendencies(docs, &TendencyThresholds::default()),
        geo: geo(docs),
        checks,
    }
}

/// `0.958333` → `95.8%`, or `95,8%` when localized; absent → `-`.
pub fn percent(value: Option<f64>, localized: bool) -> String {
    match value {
        None => "-".to_string(),
        Some(v) => {
            let s = format!("{:.1}%", v * 100.0);
            if localized {
                s.replace('.', ",")
            } else {
                s
            }
        }
    }
}

fn decimal(v: f64, digits: usize, localized: bool) -> String {
    let s = format!("{v:.digits$}");
    if localized {
        s.replace('.', ",")
    } else {
        s
    }
}

/// Per-topic precision and recall laid out as Temas / Precisión /
/// Exhaustividad, one decimal.
pub fn eval_table(report: &EvalReport, localized: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<18}{:>12}{:>16}", "Temas", "Precisión", "Exhaustividad");
    for c in &report.per_class {
        let _ = writeln!(out, "{:<18}{:>12}{:>16}", c.label.display_name(), percent(c.precision, localized), percent(c.recall, localized));
    }
    let _ = writeln!(
        out,
        "{:<18}{:>12}{:>16}",
        "Promedio",
        percent(report.macro_precision, localized),
        percent(report.macro_recall, localized)
    );
    let _ = writeln!(out, "({} folds, pooled confusion matrix, {} documents)", report.folds, report.total());
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Plain-text digest: volumes, production per medium, audience classes,
/// topic distribution, tendencies and mentioned localities.
pub fn render_text(report: &Report, localized: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Emissions: {}  unique news: {}  timezone: {}", report.emissions, report.unique_docs, report.timezone);

    let _ = writeln!(out, "\nEmissions per month");
    for b in &report.monthly.buckets {
        let _ = writeln!(out, "  {}  {:>9}", b.start.format("%Y-%m"), b.count);
    }
    if let Some(mean) = report.monthly.mean() {
        let _ = writeln!(out, "  mean     {:>12}", decimal(mean, 2, localized));
    }

    let _ = writeln!(out, "\nEmissions per day");
    for b in &report.daily.buckets {
        let _ = writeln!(out, "  {}  {:>7}", b.start, b.count);
    }

    let _ = writeln!(out, "\nEmissions per medium");
    for m in &report.media {
        let _ = writeln!(out, "  {:<28}{:>9}{:>9}", m.display_name, m.emissions, m.unique_docs);
    }
    let c = &report.concentration;
    let _ = writeln!(out, "  top {} of {} media: {} of emissions", c.k, c.media, percent(c.share, localized));

    let _ = writeln!(out, "\nAudience classes (followers)");
    for class in [AudienceClass::High, AudienceClass::Medium, AudienceClass::Low] {
        let names: Vec<&str> = report.media.iter().filter(|m| m.audience_class == class).map(|m| m.display_name.as_str()).collect();
        let label = match class {
            AudienceClass::High => "high (> 2,000,000)",
            AudienceClass::Medium => "medium (> 500,000)",
            AudienceClass::Low => "low",
        };
        let _ = writeln!(out, "  {label:<20} {}", names.join(", "));
    }

    let _ = writeln!(out, "\nTopic distribution");
    let _ = write!(out, "  {:<16}{:>7}", "group", "docs");
    for l in TopicLabel::ALL {
        let short: String = l.as_str().chars().take(6).collect();
        let _ = write!(out, "{short:>8}");
    }
    let _ = writeln!(out);
    for g in &report.topics {
        let _ = write!(out, "  {:<16}{:>7}", g.group, g.doc_count);
        for l in TopicLabel::ALL {
            let _ = write!(out, "{:>8}", percent(Some(g.share(l)), localized));
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "\nTendencies (sports+entertainment > 50%, economy+politics > 25%, judicial > 10%)");
    for t in &report.tendencies {
        let f = &t.flags;
        let _ = writeln!(
            out,
            "  {:<16} sports+ent {:<4} econ+pol {:<4} judicial {}",
            t.group,
            yes_no(f.sports_entertainment),
            yes_no(f.economy_politics),
            yes_no(f.judicial)
        );
    }

    let _ = writeln!(out, "\nLocalities mentioned");
    for g in &report.geo {
        let _ = writeln!(out, "  {:<24}{:>7}  ({}, {})", g.name, g.count, decimal(g.lat, 4, localized), decimal(g.lon, 4, localized));
    }

    if !report.checks.is_empty() {
        let _ = writeln!(out, "\nChecks");
        for c in &report.checks {
            let _ = writeln!(out, "  {c}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mediascope_core::classify::EvalReport;

    #[test]
    fn percent_formats() {
        assert_eq!(percent(Some(23.0 / 24.0), false), "95.8%");
        assert_eq!(percent(Some(23.0 / 26.0), true), "88,5%");
        assert_eq!(percent(None, false), "-");
    }

    #[test]
    fn eval_table_has_one_row_per_topic() {
        let mut m = [[0u64; 10]; 10];
        m[0][0] = 23;
        m[0][1] = 3;
        m[1][0] = 1;
        m[1][1] = 10;
        let table = eval_table(&EvalReport::from_confusion(m, 10, vec![]), true);
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("Temas"));
        assert!(lines[1].starts_with("Accidentes") && lines[1].contains("95,8%") && lines[1].ends_with("88,5%"));
        assert!(lines[3].starts_with("Ecología") && lines[3].trim_end().ends_with('-'));
        assert_eq!(lines.len(), 13);
    }
}
