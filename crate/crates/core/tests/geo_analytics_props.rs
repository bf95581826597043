use std::collections::BTreeMap;

use chrono::{Duration, TimeZone, Utc};
use chrono_tz::America::Santiago;
use mediascope_core::analytics::{
    audience_class, tendency_flags, top_k_share, topic_shares, volume_series, AudienceClass,
    Granularity, GroupBy, TendencyThresholds,
};
use mediascope_core::classify::TopicLabel;
use mediascope_core::geo::{
    aggregate_geo, disambiguate, match_toponyms, GazetteerEntry, GazetteerIndex, MentionScope,
    RejectTags,
};
use mediascope_core::nlp::tokenize;
use mediascope_core::text::toponym_key;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SYLLABLES: [&str; 12] = [
    "val", "di", "via", "san", "ta", "cruz", "pe", "mon", "tt", "ri", "ca", "lo",
];

fn random_name(rng: &mut ChaCha8Rng) -> String {
    let words = rng.gen_range(1..=3);
    (0..words)
        .map(|_| {
            let w: String = (0..rng.gen_range(1..4))
                .map(|_| SYLLABLES[rng.gen_range(0..SYLLABLES.len())])
                .collect();
            let mut c = w.chars();
            c.next()
                .unwrap()
                .to_uppercase()
                .chain(c)
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn random_entry(id: u64, rng: &mut ChaCha8Rng) -> GazetteerEntry {
    let country = rng.gen_bool(0.05);
    GazetteerEntry {
        geoname_id: id,
        name: random_name(rng),
        ascii_name: random_name(rng),
        alternate_names: (0..rng.gen_range(0..3)).map(|_| random_name(rng)).collect(),
        latitude: rng.gen_range(-90.0..=90.0),
        longitude: rng.gen_range(-180.0..=180.0),
        feature_class: if country { 'A' } else { 'P' },
        feature_code: if country { "PCLI".into() } else { "PPL".into() },
        country_code: ["CL", "AR", "FR", "PE"][rng.gen_range(0..4)].into(),
        population: rng.gen_range(0..5_000_000),
    }
}

#[test]
fn every_name_resolves_to_its_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let entries: Vec<GazetteerEntry> = (1..=100_000).map(|id| random_entry(id, &mut rng)).collect();
    let index = GazetteerIndex::from_entries(entries.clone());
    assert_eq!(index.len(), 100_000);
    for e in &entries {
        for name in e.names() {
            assert!(
                index
                    .lookup(name)
                    .iter()
                    .any(|hit| hit.geoname_id == e.geoname_id),
                "{name}"
            );
        }
    }
}

#[test]
fn mentions_are_sound_and_non_nested() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let entries: Vec<GazetteerEntry> = (1..=400).map(|id| random_entry(id, &mut rng)).collect();
    let index = GazetteerIndex::from_entries(entries.clone());
    let filler = ["el", "sismo", "en", "de", "ayer", "la", "marcha"];
    let mut all = Vec::new();
    for _ in 0..300 {
        let words: Vec<String> = (0..rng.gen_range(1..20))
            .map(|_| {
                if rng.gen_bool(0.3) {
                    entries[rng.gen_range(0..entries.len())].name.clone()
                } else {
                    filler[rng.gen_range(0..filler.len())].to_string()
                }
            })
            .collect();
        let text = words.join(" ");
        let tokens = tokenize(&text);
        let candidates = match_toponyms(&tokens, &index, 3, &RejectTags::default());
        for pair in candidates.windows(2) {
            assert!(pair[0].span.end <= pair[1].span.start);
        }
        for c in &candidates {
            assert_eq!(&text[c.span.start..c.span.end], c.surface);
            assert!(!index.lookup_key(&toponym_key(&c.surface)).is_empty());
        }
        let hint = ["CL", "AR"][rng.gen_range(0..2)];
        let mentions = disambiguate(&candidates, hint);
        for m in &mentions {
            assert!(m.span.end <= text.len());
            match m.scope {
                MentionScope::Locality => assert_eq!(m.entry.country_code, hint),
                MentionScope::Country => assert_eq!(m.entry.feature_class, 'A'),
            }
        }
        for a in &mentions {
            for b in &mentions {
                let nested =
                    a.span != b.span && b.span.start <= a.span.start && a.span.end <= b.span.end;
                assert!(!nested);
            }
        }
        all.extend(mentions);
    }
    let agg = aggregate_geo(&all);
    assert_eq!(agg.iter().map(|a| a.count).sum::<u64>(), all.len() as u64);
    assert!(agg
        .windows(2)
        .all(|w| (std::cmp::Reverse(w[0].count), w[0].geoname_id)
            < (std::cmp::Reverse(w[1].count), w[1].geoname_id)));
}

fn labels() -> impl Strategy<Value = Vec<(usize, usize)>> {
    proptest::collection::vec((0usize..4, 0usize..10), 0..200)
}

proptest! {
    #[test]
    fn topic_shares_match_counting_oracle(docs in labels()) {
        let handles = ["@a", "@b", "@c", "@d"];
        let pairs: Vec<(&str, TopicLabel)> = docs.iter().map(|&(h, l)| (handles[h], TopicLabel::ALL[l])).collect();
        for group_by in [GroupBy::Medium, GroupBy::All] {
            let groups = topic_shares(pairs.iter().copied(), group_by);
            for g in &groups {
                let members: Vec<&(&str, TopicLabel)> = pairs.iter().filter(|(h, _)| group_by == GroupBy::All || *h == g.group).collect();
                prop_assert_eq!(g.doc_count, members.len() as u64);
                let total: f64 = g.shares.values().sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
                for label in TopicLabel::ALL {
                    let n = members.iter().filter(|(_, l)| *l == label).count();
                    prop_assert!((g.share(label) - n as f64 / members.len() as f64).abs() <= 1e-12);
                }
                prop_assert_eq!(tendency_flags(g, &TendencyThresholds::default()), tendency_flags(g, &TendencyThresholds::default()));
            }
        }
    }

    #[test]
    fn top_k_share_is_monotone(counts in proptest::collection::vec(0u64..10_000, 1..40)) {
        let media: Vec<(String, u64)> = counts.iter().enumerate().map(|(i, c)| (format!("@m{i:02}"), *c)).collect();
        let mut prev = 0.0;
        for k in 0..=media.len() + 1 {
            if let Some(s) = top_k_share(&media, k) {
                prop_assert!(s + 1e-15 >= prev);
                prop_assert!(s <= 1.0 + 1e-12);
                prev = s;
            }
        }
    }

    #[test]
    fn audience_class_preserves_order(a in 0u64..5_000_000, b in 0u64..5_000_000) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(audience_class(lo) <= audience_class(hi));
    }

    #[test]
    fn volume_series_conserves_counts(offsets in proptest::collection::vec(0i64..(180 * 24 * 60), 0..300)) {
        let start = Utc.with_ymd_and_hms(2015, 6, 1, 4, 0, 0).unwrap();
        let stamps: Vec<_> = offsets.iter().map(|m| start + Duration::minutes(*m)).collect();
        for g in [Granularity::Day, Granularity::Month] {
            let series = volume_series(stamps.iter().copied(), g, Santiago);
            prop_assert_eq!(series.total(), stamps.len() as u64);
            let starts: Vec<_> = series.buckets.iter().map(|b| b.start).collect();
            let mut sorted = starts.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted, starts);
        }
    }
}

#[test]
fn audience_boundaries_are_strict() {
    assert_eq!(audience_class(2_000_000), AudienceClass::Medium);
    assert_eq!(audience_class(2_000_001), AudienceClass::High);
    assert_eq!(audience_class(500_000), AudienceClass::Low);
    assert_eq!(audience_class(500_001), AudienceClass::Medium);
}

#[test]
fn day_buckets_are_contiguous() {
    let stamps = [
        Utc.with_ymd_and_hms(2015, 6, 1, 12, 0, 0).unwrap(),
        Utc.with_ymd_and_hms(2015, 6, 5, 12, 0, 0).unwrap(),
    ];
    let series = volume_series(stamps, Granularity::Day, Santiago);
    let counts: BTreeMap<_, _> = series
        .buckets
        .iter()
        .map(|b| (b.start.to_string(), b.count))
        .collect();
    assert_eq!(counts.len(), 5);
    assert_eq!(counts.values().sum::<u64>(), 2);
}
