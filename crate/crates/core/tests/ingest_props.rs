use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use chrono_tz::America::Santiago;
use mediascope_core::ingest::{
    canonicalize_url, dedupe_news, dedupe_stream, extract_article, ExtractConfig, FetchStatus,
    TweetRecord, YearMonth,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn base_urls() -> Vec<String> {
    (0..50)
        .map(|i| match i % 3 {
            0 => format!("https://www.medio{i}.cl/nacional/2015/06/nota-{i}"),
            1 => format!("http://noticias{i}.cl/articulo?id={i}"),
            _ => format!("https://medio{i}.com/{i}/deportes/gol-de-chile"),
        })
        .collect()
}

fn perturb(base: &str, rng: &mut ChaCha8Rng) -> String {
    let (scheme, rest) = base.split_once("://").unwrap();
    let (host, path) = rest.split_once('/').unwrap();
    let mut scheme = scheme.to_string();
    let mut host = host.to_string();
    if rng.gen_bool(0.5) {
        scheme = scheme.to_uppercase();
    }
    if rng.gen_bool(0.5) {
        host = host.to_uppercase();
    }
    if rng.gen_bool(0.3) {
        host.push_str(if scheme.eq_ignore_ascii_case("https") {
            ":443"
        } else {
            ":80"
        });
    }
    let (path, query) = match path.split_once('?') {
        Some((p, q)) => (p.to_string(), Some(q.to_string())),
        None => (path.to_string(), None),
    };
    let mut path = path;
    if rng.gen_bool(0.5) {
        path.push('/');
    }
    let mut params: Vec<String> = query.into_iter().collect();
    let tracking = [
        "utm_source=twitter",
        "utm_medium=social",
        "fbclid=IwAR0x",
        "gclid=abc",
        "UTM_Campaign=junio",
    ];
    for t in tracking {
        if rng.gen_bool(0.4) {
            params.push(t.to_string());
        }
    }
    params.shuffle(rng);
    // The real parameter keeps its position relative to nothing else, so
    // order among kept params is unaffected.
    let mut out = format!("{scheme}://{host}/{path}");
    if !params.is_empty() {
        out.push('?');
        out.push_str(&params.join("&"));
    }
    if rng.gen_bool(0.4) {
        out.push_str("#comentarios");
    }
    out
}

#[test]
fn perturbed_variants_collapse_to_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let bases = base_urls();
    let mut forms = BTreeSet::new();
    for (i, base) in bases.iter().cycle().take(500).enumerate() {
        let variant = perturb(base, &mut rng);
        let canonical = canonicalize_url(&variant).unwrap();
        assert_eq!(
            canonical,
            canonicalize_url(base).unwrap(),
            "variant {i}: {variant}"
        );
        forms.insert(canonical);
    }
    assert_eq!(forms.len(), 50);
}

fn record(id: usize, handle: &str, day: u32, hour: u32, text: &str, urls: &[&str]) -> TweetRecord {
    TweetRecord {
        tweet_id: format!("t{id}"),
        medium_handle: handle.to_string(),
        published_at: Utc.with_ymd_and_hms(2015, 6, day, hour, 0, 0).unwrap(),
        text: text.to_string(),
        urls: urls.iter().map(|u| u.to_string()).collect(),
        unknown_medium: false,
    }
}

fn random_stream(rng: &mut ChaCha8Rng) -> Vec<TweetRecord> {
    let urls = [
        "https://a.cl/1",
        "https://a.cl/1?utm_source=x",
        "https://b.cl/2",
        "https://b.cl/2/",
        "no es url",
        "",
    ];
    let texts = [
        "Sismo en Valdivia",
        "sismo  en VALDIVIA",
        "Gol de Chile",
        "Plan de gobierno",
    ];
    (0..rng.gen_range(0..40))
        .map(|i| {
            let u = urls[rng.gen_range(0..urls.len())];
            let list: Vec<&str> = if u.is_empty() { vec![] } else { vec![u] };
            record(
                i,
                ["@a", "@b"][rng.gen_range(0..2)],
                rng.gen_range(2..29),
                rng.gen_range(0..24),
                texts[rng.gen_range(0..texts.len())],
                &list,
            )
        })
        .collect()
}

#[test]
fn dedupe_properties_on_random_streams() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let june = YearMonth::new(2015, 6);
    for _ in 0..200 {
        let stream = random_stream(&mut rng);
        let out = dedupe_news(&stream, june, Santiago, "CL");
        assert!(out.docs.len() <= stream.len());
        assert_eq!(out.emissions, stream.len());
        assert_eq!(
            out.docs.iter().map(|d| d.emissions.len()).sum::<usize>(),
            stream.len()
        );
        assert_eq!(out.docs.len() + out.duplicates, stream.len());
        let ids: BTreeSet<&str> = out.docs.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids.len(), out.docs.len());
        let urls: Vec<&String> = out
            .docs
            .iter()
            .filter_map(|d| d.canonical_url.as_ref())
            .collect();
        assert_eq!(urls.iter().collect::<BTreeSet<_>>().len(), urls.len());
        for d in &out.docs {
            assert!(FetchStatus::ALL.contains(&d.fetch_status));
            assert!(d.fetch_status != FetchStatus::Ok);
        }

        let mut shuffled = stream.clone();
        shuffled.shuffle(&mut rng);
        assert_eq!(dedupe_news(&shuffled, june, Santiago, "CL"), out);
        assert_eq!(dedupe_news(&stream, june, Santiago, "CL"), out);
    }
}

#[test]
fn distinct_keys_are_all_kept() {
    let stream: Vec<TweetRecord> = (0..30)
        .map(|i| record(i, "@a", 10, 12, "x", &[&format!("https://a.cl/{i}")]))
        .collect();
    let out = dedupe_news(&stream, YearMonth::new(2015, 6), Santiago, "CL");
    assert_eq!(out.docs.len(), 30);
}

#[test]
fn months_dedupe_separately() {
    let mut may = record(0, "@a", 1, 2, "x", &["https://a.cl/1"]);
    // 02:00 UTC on June 1st is still May 31st in Santiago (UTC-3 in 2015).
    may.tweet_id = "may".into();
    let june = record(1, "@a", 15, 12, "x", &["https://a.cl/1"]);
    let out = dedupe_stream(&[may, june], Santiago, "CL");
    assert_eq!(out.docs.len(), 2);
    assert_ne!(out.docs[0].doc_id, out.docs[1].doc_id);
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(
        host in "[a-z]{1,10}\\.(cl|com|org)",
        segments in proptest::collection::vec("[a-zA-Z0-9_-]{0,8}", 0..4),
        query in proptest::collection::vec(("(utm_[a-z]{1,5}|fbclid|id|q|p)", "[a-z0-9]{0,5}"), 0..4),
        fragment in proptest::option::of("[a-z]{1,5}"),
        upper in any::<bool>(),
    ) {
        let mut url = format!("{}://{}/{}", if upper { "HTTPS" } else { "https" }, host, segments.join("/"));
        if !query.is_empty() {
            let q: Vec<String> = query.iter().map(|(k, v)| format!("{k}={v}")).collect();
            url = format!("{url}?{}", q.join("&"));
        }
        if let Some(f) = fragment {
            url = format!("{url}#{f}");
        }
        let once = canonicalize_url(&url).unwrap();
        prop_assert_eq!(canonicalize_url(&once).unwrap(), once.clone());
        prop_assert!(!once.contains("utm_") && !once.contains("fbclid") && !once.contains('#'));
    }

    #[test]
    fn extraction_never_panics(html in "([<>/a-zñÁé &;#]|<p>|</p>|<div>|</div>|<!--|-->){0,80}") {
        let _ = extract_article(&html, &ExtractConfig::default());
    }
}
