//! Seeded generators for fixtures and benchmarks.
//!
//! Everything here is a pure function of its seed. The shipped reference
//! tables under `data/` are embedded so a fixture directory is complete on
//! its own.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use chrono_tz::Tz;
use mediascope_core::analytics::AudienceThresholds;
use mediascope_core::classify::TopicLabel;
use mediascope_core::geo::{GazetteerEntry, GeoMention, MentionScope, PlaceRef};
use mediascope_core::ingest::{doc_id_for, Emission, FetchStatus, NewsDoc, TweetRecord, YearMonth};
use mediascope_core::nlp::Span;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formats::{read_gazetteer, read_roster, write_labeled_corpus, write_tweet_stream, LabeledDoc};

pub const TAGGED_CORPUS: &str = include_str!("../data/tagged_corpus.tsv");
pub const LEMMA_RULES: &str = include_str!("../data/lemma_rules.tsv");
pub const LEMMA_EXCEPTIONS: &str = include_str!("../data/lemma_exceptions.tsv");
pub const LEMMA_TESTSET: &str = include_str!("../data/lemma_testset.tsv");
pub const FREQUENCY_LIST: &str = include_str!("../data/freq_list.tsv");
pub const GAZETTEER: &str = include_str!("../data/gazetteer_fixture.tsv");
pub const ROSTER: &str = include_str!("../data/roster.ndjson");

/// Emissions per month, June to November 2015.
pub const MONTHLY_EMISSIONS_2015: [(i32, u32, u64); 6] = [
    (2015, 6, 120_571),
    (2015, 7, 119_704),
    (2015, 8, 124_910),
    (2015, 9, 103_739),
    (2015, 10, 123_952),
    (2015, 11, 129_042),
];

pub const OCTOBER_EMISSIONS: usize = 123_952;
pub const OCTOBER_UNIQUE: usize = 65_572;

/// Share of emissions produced by the ten most active media.
pub const TOP10_SHARE: f64 = 0.68;

/// The ten most active media, most active first.
pub const TOP_PRODUCERS: [&str; 10] =
    ["t13", "24horas", "ahoranoticias", "cooperativa", "biobio", "adnradiochile", "publimetro", "emol", "latercera", "soychile"];

/// Disjoint topical vocabularies, 20 singular forms per topic.
pub const TOPIC_VOCAB: [(TopicLabel, [&str; 20]); 10] = [
    (
        TopicLabel::Accidentes,
        [
            "choque", "colisión", "volcamiento", "atropello", "camión", "conductor", "ambulancia", "herido", "carretera",
            "incendio", "bombero", "derrumbe", "naufragio", "explosión", "rescate", "lesionado", "accidente", "tránsito",
            "velocidad", "siniestro",
        ],
    ),
    (
        TopicLabel::Deportes,
        [
            "gol", "estadio", "entrenador", "campeonato", "jugador", "torneo", "hincha", "delantero", "arquero", "tenista",
            "clásico", "fútbol", "copa", "medalla", "atleta", "marcador", "cancha", "goleador", "árbitro", "camiseta",
        ],
    ),
    (
        TopicLabel::Ecologia,
        [
            "glaciar", "contaminación", "reciclaje", "bosque", "humedal", "sequía", "ecosistema", "biodiversidad", "residuo",
            "fauna", "flora", "carbono", "ambientalista", "océano", "plástico", "clima", "ballena", "deforestación", "smog",
            "parque",
        ],
    ),
    (
        TopicLabel::Economia,
        [
            "dólar", "bolsa", "inflación", "mercado", "exportación", "cobre", "inversión", "desempleo", "banco",
            "crecimiento", "precio", "impuesto", "peso", "arancel", "comercio", "empresa", "presupuesto", "ahorro",
            "crédito", "deuda",
        ],
    ),
    (
        TopicLabel::Entretenimiento,
        [
            "cantante", "concierto", "festival", "película", "actor", "teleserie", "disco", "escenario", "farándula", "cine",
            "actriz", "humorista", "gira", "estreno", "álbum", "rockero", "show", "espectáculo", "artista", "telenovela",
        ],
    ),
    (
        TopicLabel::Judicial,
        [
            "fiscal", "tribunal", "juez", "querella", "imputado", "condena", "fiscalía", "sentencia", "juicio",
            "formalización", "abogado", "recurso", "querellante", "prisión", "cárcel", "delito", "veredicto", "jurado",
            "fraude", "testigo",
        ],
    ),
    (
        TopicLabel::Politica,
        [
            "senador", "diputado", "ministro", "gobierno", "reforma", "candidato", "elección", "partido", "congreso",
            "votación", "alcalde", "militante", "oposición", "coalición", "constitución", "presidenta", "gabinete",
            "parlamentario", "primaria", "encuesta",
        ],
    ),
    (
        TopicLabel::Salud,
        [
            "hospital", "paciente", "médico", "vacuna", "influenza", "enfermedad", "consultorio", "cirugía", "tratamiento",
            "epidemia", "medicamento", "enfermera", "urgencia", "diagnóstico", "cáncer", "trasplante", "minsal", "contagio",
            "síntoma", "clínica",
        ],
    ),
    (
        TopicLabel::Sociedad,
        [
            "vecino", "familia", "estudiante", "profesor", "colegio", "pensión", "marcha", "barrio", "vivienda", "comunidad",
            "migrante", "niño", "mujer", "jubilado", "protesta", "campamento", "transporte", "educación", "universidad",
            "sindicato",
        ],
    ),
    (
        TopicLabel::Tecnologia,
        [
            "aplicación", "teléfono", "internet", "software", "robot", "satélite", "computador", "smartphone", "startup",
            "algoritmo", "ciberseguridad", "hacker", "videojuego", "tablet", "innovación", "programador", "chip", "drone",
            "servidor", "plataforma",
        ],
    ),
];

pub fn vocabulary(label: TopicLabel) -> &'static [&'static str; 20] {
    &TOPIC_VOCAB[label.ordinal()].1
}

/// Writes the shipped reference tables into `dir` under their usual names.
pub fn write_reference_data(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in [
        ("tagged_corpus.tsv", TAGGED_CORPUS),
        ("lemma_rules.tsv", LEMMA_RULES),
        ("lemma_exceptions.tsv", LEMMA_EXCEPTIONS),
        ("freq_list.tsv", FREQUENCY_LIST),
        ("gazetteer.tsv", GAZETTEER),
        ("roster.ndjson", ROSTER),
    ] {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// Handles of the shipped roster, in file order.
pub fn roster_handles() -> Vec<String> {
    read_roster(ROSTER.as_bytes(), &AudienceThresholds::default())
        .expect("shipped roster parses")
        .into_iter()
        .map(|p| p.handle)
        .collect()
}

pub fn gazetteer_entries() -> Vec<GazetteerEntry> {
    let load = read_gazetteer(GAZETTEER.as_bytes()).expect("shipped gazetteer parses");
    let mut entries: Vec<GazetteerEntry> = load.index.entries().to_vec();
    entries.sort_by_key(|e| e.geoname_id);
    entries
}

/// Splits `total` proportionally to `weights` with largest-remainder
/// rounding, so the parts sum to `total` exactly.
pub fn apportion(total: u64, weights: &[f64]) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut parts: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let mut left = total - parts.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    for i in order.into_iter().cycle() {
        if left == 0 {
            break;
        }
        parts[i] += 1;
        left -= 1;
    }
    parts
}

/// Emissions per medium over the shipped roster: the ten top producers
/// account for `top_share` of `total` and every one of them out-produces
/// every other medium.
pub fn media_counts(total: u64, top_share: f64) -> Vec<(String, u64)> {
    let top_total = (total as f64 * top_share).round() as u64;
    let top_weights: Vec<f64> = (0..10).map(|i| 1.0 - 0.05 * i as f64).collect();
    let rest: Vec<String> = roster_handles().into_iter().filter(|h| !TOP_PRODUCERS.contains(&h.as_str())).collect();
    let rest_weights: Vec<f64> = (0..rest.len()).map(|i| 1.0 - 0.02 * i as f64).collect();
    let mut out: Vec<(String, u64)> =
        TOP_PRODUCERS.iter().map(|h| h.to_string()).zip(apportion(top_total, &top_weights)).collect();
    out.extend(rest.into_iter().zip(apportion(total - top_total, &rest_weights)));
    out
}

/// Start of the local month and start of the next, in UTC.
pub fn month_bounds(month: YearMonth, tz: Tz) -> (DateTime<Utc>, DateTime<Utc>) {
    let start = |ym: YearMonth| {
        let date = NaiveDate::from_ymd_opt(ym.year, ym.month, 1).expect("valid month");
        tz.from_local_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight"))
            .earliest()
            .expect("local midnight exists")
            .with_timezone(&Utc)
    };
    (start(month), start(month.next()))
}

fn random_instant(rng: &mut ChaCha8Rng, (start, end): (DateTime<Utc>, DateTime<Utc>)) -> DateTime<Utc> {
    start + Duration::seconds(rng.gen_range(0..(end - start).num_seconds()))
}

/// `count` instants in each listed local month, sorted.
pub fn monthly_timestamps(months: &[(i32, u32, u64)], tz: Tz, seed: u64) -> Vec<DateTime<Utc>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &(year, month, count) in months {
        let bounds = month_bounds(YearMonth::new(year, month), tz);
        out.extend((0..count).map(|_| random_instant(&mut rng, bounds)));
    }
    out.sort();
    out
}

/// A surface variant of `url` that canonicalizes back to it.
fn url_variant(url: &str, rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => url.to_string(),
        1 => format!("{url}?utm_source=twitter&utm_medium=social"),
        2 => format!("{url}/"),
        3 => format!("{url}#comentarios"),
        4 => url.replacen("https://www.", "HTTPS://WWW.", 1),
        _ => url.replacen(".cl/", ".cl:443/", 1),
    }
}

fn text_variant(text: &str, rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..3) {
        0 => text.to_string(),
        1 => text.to_uppercase(),
        _ => text.replace(' ', "  "),
    }
}

/// One local month of tweets announcing exactly `unique` news items over
/// `emissions` tweets. About one item in twenty has no link and is keyed by
/// its text. Repeats use surface variants of the URL or text.
pub fn duplicated_stream(month: YearMonth, emissions: usize, unique: usize, tz: Tz, seed: u64) -> Vec<TweetRecord> {
    assert!(unique >= 1 && emissions >= unique);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let handles = roster_handles();
    let bounds = month_bounds(month, tz);
    let mut copies = vec![1usize; unique];
    for _ in unique..emissions {
        copies[rng.gen_range(0..unique)] += 1;
    }
    let mut out = Vec::with_capacity(emissions);
    for (item, &n) in copies.iter().enumerate() {
        let handle = &handles[item % handles.len()];
        let text = format!("Noticia {item} de {handle} sobre la jornada");
        let url = (item % 20 != 0).then(|| format!("https://www.{handle}.cl/{month}/nota-{item}"));
        for copy in 0..n {
            let (text, urls) = match &url {
                Some(u) => (text.clone(), vec![url_variant(u, &mut rng)]),
                None => (text_variant(&text, &mut rng), Vec::new()),
            };
            out.push(TweetRecord {
                tweet_id: format!("{month}-{item}-{copy}"),
                medium_handle: handle.clone(),
                published_at: random_instant(&mut rng, bounds),
                text,
                urls,
                unknown_medium: false,
            });
        }
    }
    out.shuffle(&mut rng);
    out
}

/// October 2015: 123,952 emissions of 65,572 distinct news items.
pub fn october_stream(tz: Tz, seed: u64) -> Vec<TweetRecord> {
    duplicated_stream(YearMonth::new(2015, 10), OCTOBER_EMISSIONS, OCTOBER_UNIQUE, tz, seed)
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn topical_sentence(label: TopicLabel, rng: &mut ChaCha8Rng) -> String {
    let vocab = vocabulary(label);
    let w: Vec<&str> = vocab.choose_multiple(rng, 3).copied().collect();
    format!("{} del {} con el {}.", capitalize(w[0]), w[1], w[2])
}

/// Bags of topical words: `per_class` documents per topic, each drawing
/// 6 to 12 words from its own vocabulary only.
pub fn separable_bags(per_class: usize, seed: u64) -> Vec<(Vec<String>, TopicLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for label in TopicLabel::ALL {
        for _ in 0..per_class {
            let n = rng.gen_range(6..=12);
            let bag = (0..n).map(|_| vocabulary(label).choose(&mut rng).expect("vocabulary").to_string()).collect();
            out.push((bag, label));
        }
    }
    out
}

/// Labeled news texts built from the topical vocabularies.
pub fn separable_corpus(per_class: usize, seed: u64) -> Vec<LabeledDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for label in TopicLabel::ALL {
        for i in 0..per_class {
            let sentences: Vec<String> = (0..rng.gen_range(2..=4)).map(|_| topical_sentence(label, &mut rng)).collect();
            out.push(LabeledDoc { id: format!("{}-{i:03}", label.as_str()), text: sentences.join(" "), label });
        }
    }
    out
}

fn mention(entry: &GazetteerEntry) -> GeoMention {
    let scope = if entry.is_country() { MentionScope::Country } else { MentionScope::Locality };
    GeoMention {
        surface: entry.name.clone(),
        span: Span { start: 0, end: entry.name.len() },
        entry: PlaceRef::from(entry),
        scope,
        notes: vec![if entry.is_country() { "country_level".into() } else { "in_country".into() }],
    }
}

/// Annotated documents for index benchmarks: random media, topics (one in
/// ten unclassified), June to November 2015 timestamps, skewed lemma
/// draws from a 300-word vocabulary and up to two place mentions.
pub fn store_docs(n: usize, tz: Tz, seed: u64) -> Vec<NewsDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let handles = roster_handles();
    let places: Vec<GazetteerEntry> = gazetteer_entries().into_iter().filter(|e| e.is_country() || e.country_code == "CL").collect();
    let start = month_bounds(YearMonth::new(2015, 6), tz).0;
    let end = month_bounds(YearMonth::new(2015, 11), tz).1;
    (0..n)
        .map(|i| {
            let published_at = random_instant(&mut rng, (start, end));
            let medium = handles[rng.gen_range(0..handles.len())].clone();
            let mut lemmas: Vec<String> = (0..rng.gen_range(3..=12))
                .map(|_| {
                    let u: f64 = rng.gen();
                    format!("lema{}", (300.0 * u * u) as usize)
                })
                .collect();
            lemmas.sort();
            lemmas.dedup();
            let topic = (rng.gen_range(0..10) != 0).then(|| TopicLabel::ALL[rng.gen_range(0..10)]);
            let geo_mentions = (0..rng.gen_range(0..=2)).map(|_| mention(places.choose(&mut rng).expect("places"))).collect();
            let emissions = (0..rng.gen_range(1..=3))
                .map(|k| Emission {
                    tweet_id: format!("s{i}-{k}"),
                    medium_handle: medium.clone(),
                    published_at: published_at + Duration::minutes(7 * k),
                })
                .collect();
            NewsDoc {
                doc_id: doc_id_for(YearMonth::of(&published_at, tz), &format!("synthetic:{i}")),
                medium_handle: medium,
                published_at,
                tweet_text: format!("Nota sintética {i}"),
                canonical_url: Some(format!("https://www.ejemplo.cl/nota/{i}")),
                extra_urls: Vec::new(),
                title: Some(format!("Titular {i}")),
                body: Some(lemmas.join(" ")),
                fetch_status: FetchStatus::Ok,
                topic,
                classified_from: None,
                keywords: lemmas.iter().take(3).cloned().collect(),
                lemmas,
                geo_mentions,
                country_hint: "CL".into(),
                emissions,
            }
        })
        .collect()
}

/// How a fixture document's link behaves when scraped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkPlan {
    /// Article page that extracts cleanly.
    Article,
    /// Page listed with status 404.
    NotFound,
    /// URL the stub does not know.
    Unlisted,
    /// Page made of links only; extraction finds no body.
    Boilerplate,
    Broken,
    None,
}

impl LinkPlan {
    pub fn expected_status(self) -> FetchStatus {
        match self {
            LinkPlan::Article => FetchStatus::Ok,
            LinkPlan::NotFound | LinkPlan::Unlisted | LinkPlan::Boilerplate => FetchStatus::FetchError,
            LinkPlan::Broken => FetchStatus::BrokenLink,
            LinkPlan::None => FetchStatus::NoLink,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureDoc {
    pub medium: String,
    pub topic: TopicLabel,
    pub link: LinkPlan,
    /// Geoname ids mentioned in the text the classifier will see.
    pub places: Vec<u64>,
    pub emissions: usize,
}

/// What the pipeline must report on a fixture, stage by stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub lines: usize,
    pub records: usize,
    pub invalid_lines: usize,
    pub emissions: usize,
    pub unique_docs: usize,
    pub duplicates: usize,
    pub fetch_status: BTreeMap<String, usize>,
    pub with_lemmas: usize,
    pub classified: usize,
    pub topics: BTreeMap<String, usize>,
    pub geo_mentions: usize,
    pub docs_with_geo: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub seed: u64,
    pub docs: Vec<FixtureDoc>,
    pub expected: ExpectedCounts,
    /// Files written, relative to the fixture directory.
    pub files: Vec<String>,
}

pub const FIXTURE_CONFIG: &str = "mediascope.toml";

const CITIES: [(u64, &str); 12] = [
    (3868707, "Valdivia"),
    (3871336, "Santiago"),
    (3893894, "Concepción"),
    (3882428, "Los Ángeles"),
    (3868121, "Viña del Mar"),
    (3884373, "La Serena"),
    (3874960, "Puerto Montt"),
    (3870011, "Temuco"),
    (3899539, "Antofagasta"),
    (3887127, "Iquique"),
    (3895088, "Chillán"),
    (3874787, "Punta Arenas"),
];
const ARGENTINA: u64 = 3865483;

fn plan_link(i: usize) -> LinkPlan {
    match i % 20 {
        0..=13 => LinkPlan::Article,
        14 => LinkPlan::NotFound,
        15 => LinkPlan::Unlisted,
        16 => LinkPlan::Boilerplate,
        17 => LinkPlan::Broken,
        _ => LinkPlan::None,
    }
}

fn article_page(title: &str, paragraphs: &[String]) -> String {
    let mut html = format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{title}</title></head>\n<body>\n\
         <nav><ul><li><a href=\"/\">Portada</a></li><li><a href=\"/nacional\">Nacional</a></li>\
         <li><a href=\"/mundo\">Mundo</a></li></ul></nav>\n<div class=\"nota\">\n"
    );
    for p in paragraphs {
        html.push_str(&format!("<p>{p}</p>\n"));
    }
    html.push_str("</div>\n<footer><a href=\"/contacto\">Contacto</a> | <a href=\"/terminos\">Términos</a></footer>\n</body></html>\n");
    html
}

fn boilerplate_page() -> String {
    let links: String = (0..12)
        .map(|k| format!("<a href=\"https://www.ejemplo.cl/secciones/categoria/subcategoria/archivo/{k}\">{k}</a>"))
        .collect();
    format!("<html><head><title>Portada</title></head><body><div>{links}</div></body></html>\n")
}

/// Writes a self-contained pipeline fixture with `docs` distinct news items
/// and returns its manifest. The directory gets the tweet stream, stub
/// pages, reference tables, a labeled corpus, a config file and
/// `manifest.json`.
///
/// Item `i` is about `TopicLabel::ALL[i % 10]`, names `i % 3` Chilean
/// cities (plus Argentina when `i % 11 == 0`) and, when `i % 7 == 0`, the
/// phrase "los precios caen". Its link follows a 20-item cycle: 14
/// articles, then a 404, an unlisted URL, a boilerplate page, a broken
/// link and two tweets without links. Items with `i % 10` equal to 3 or 7
/// are tweeted again once or twice. Three bad lines are appended to the
/// stream.
pub fn write_pipeline_fixture(dir: &Path, docs: usize, seed: u64) -> io::Result<FixtureManifest> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let handles = roster_handles();
    fs::create_dir_all(dir.join("pages"))?;
    write_reference_data(dir)?;

    let mut manifest = FixtureManifest { seed, docs: Vec::new(), expected: ExpectedCounts::default(), files: Vec::new() };
    let mut tweets: Vec<TweetRecord> = Vec::new();
    let mut pages = String::from("# url\tstatus\tfile\n");
    for i in 0..docs {
        let topic = TopicLabel::ALL[i % 10];
        let link = plan_link(i);
        let medium = handles[i % handles.len()].clone();
        let mut places: Vec<(u64, &str)> = (0..i % 3).map(|k| CITIES[(i + 5 * k) % CITIES.len()]).collect();
        if i % 11 == 0 {
            places.push((ARGENTINA, "Argentina"));
        }
        let mut sentences: Vec<String> = (0..3).map(|_| topical_sentence(topic, &mut rng)).collect();
        for (_, name) in &places {
            sentences.push(format!("Informan desde {name}."));
        }
        if i % 7 == 0 {
            sentences.push("Afirman que los precios caen.".into());
        }
        let title = format!("{} y {}", capitalize(vocabulary(topic)[i % 20]), vocabulary(topic)[(i + 7) % 20]);
        let url = format!("https://www.{medium}.cl/2015/10/nota-{i}");
        let (text, urls) = match link {
            LinkPlan::Article => (format!("{title} ({i})"), vec![url.clone()]),
            LinkPlan::None => (format!("{} ({i})", sentences.join(" ")), vec![]),
            LinkPlan::Broken => (sentences.join(" "), vec![format!("ht!tp://roto.cl/nota/{i}")]),
            _ => (sentences.join(" "), vec![url.clone()]),
        };
        match link {
            LinkPlan::Article => {
                let file = format!("nota-{i}.html");
                fs::write(dir.join("pages").join(&file), article_page(&title, &sentences))?;
                pages.push_str(&format!("{url}\t200\t{file}\n"));
            }
            LinkPlan::NotFound => pages.push_str(&format!("{url}\t404\t-\n")),
            LinkPlan::Boilerplate => {
                let file = format!("portada-{i}.html");
                fs::write(dir.join("pages").join(&file), boilerplate_page())?;
                pages.push_str(&format!("{url}\t200\t{file}\n"));
            }
            _ => {}
        }
        let day = (i % 28) as u32 + 1;
        let first = Utc.with_ymd_and_hms(2015, 10, day, rng.gen_range(12..22), rng.gen_range(0..60), 0).unwrap();
        let copies = match i % 10 {
            3 => 2,
            7 => 3,
            _ => 1,
        };
        for c in 0..copies {
            let (text, urls) = match (c, link) {
                (0, _) | (_, LinkPlan::Broken) => (text.clone(), urls.clone()),
                (_, LinkPlan::None) => (text_variant(&text, &mut rng), vec![]),
                _ => (text.clone(), vec![url_variant(&url, &mut rng)]),
            };
            tweets.push(TweetRecord {
                tweet_id: format!("{}", 650_000_000_000_000_000u64 + (i * 10 + c) as u64),
                medium_handle: medium.clone(),
                published_at: first + Duration::minutes(11 * c as i64),
                text,
                urls,
                unknown_medium: false,
            });
        }
        manifest.docs.push(FixtureDoc {
            medium,
            topic,
            link,
            places: places.iter().map(|(id, _)| *id).collect(),
            emissions: copies,
        });
    }
    tweets.sort_by(|a, b| a.published_at.cmp(&b.published_at).then(a.tweet_id.cmp(&b.tweet_id)));

    let mut stream = Vec::new();
    write_tweet_stream(&tweets, &mut stream)?;
    stream.extend_from_slice(b"{\"tweet_id\": \"truncated\n");
    stream.extend_from_slice(b"{\"tweet_id\":\"999\",\"medium\":\"emol\",\"created_at\":\"31/10/2015\",\"text\":\"fecha mala\"}\n");
    if let Some(first) = tweets.first() {
        write_tweet_stream(std::iter::once(first), &mut stream)?;
    }
    fs::write(dir.join("tweets.ndjson"), stream)?;
    fs::write(dir.join("pages").join("pages.tsv"), pages)?;

    let mut corpus = Vec::new();
    write_labeled_corpus(&separable_corpus(20, seed ^ 0x5eed), &mut corpus)?;
    fs::write(dir.join("labeled_corpus.ndjson"), corpus)?;
    fs::write(dir.join(FIXTURE_CONFIG), fixture_config(seed))?;

    let e = &mut manifest.expected;
    let bad_lines = if tweets.is_empty() { 2 } else { 3 };
    e.records = tweets.len();
    e.lines = tweets.len() + bad_lines;
    e.invalid_lines = bad_lines;
    e.emissions = tweets.len();
    e.unique_docs = docs;
    e.duplicates = tweets.len() - docs;
    for d in &manifest.docs {
        *e.fetch_status.entry(d.link.expected_status().as_str().to_string()).or_default() += 1;
        *e.topics.entry(d.topic.as_str().to_string()).or_default() += 1;
        e.geo_mentions += d.places.len();
        e.docs_with_geo += usize::from(!d.places.is_empty());
    }
    e.with_lemmas = docs;
    e.classified = docs;
    manifest.files = [
        "tweets.ndjson",
        "pages/pages.tsv",
        "labeled_corpus.ndjson",
        "tagged_corpus.tsv",
        "lemma_rules.tsv",
        "lemma_exceptions.tsv",
        "freq_list.tsv",
        "gazetteer.tsv",
        "roster.ndjson",
        FIXTURE_CONFIG,
        "manifest.json",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let json = serde_json::to_vec_pretty(&manifest).map_err(io::Error::other)?;
    fs::write(dir.join("manifest.json"), json)?;
    Ok(manifest)
}

fn fixture_config(seed: u64) -> String {
    format!(
        "[paths]\n\
         tweets = \"tweets.ndjson\"\n\
         gazetteer = \"gazetteer.tsv\"\n\
         tagged_corpus = \"tagged_corpus.tsv\"\n\
         labeled_corpus = \"labeled_corpus.ndjson\"\n\
         lemma_rules = \"lemma_rules.tsv\"\n\
         lemma_exceptions = \"lemma_exceptions.tsv\"\n\
         frequency_list = \"freq_list.tsv\"\n\
         media_roster = \"roster.ndjson\"\n\
         store = \"store\"\n\
         stub_pages = \"pages\"\n\
         \n\
         [ingest]\n\
         fetcher = \"stub\"\n\
         workers = 4\n\
         \n\
         [classifier]\n\
         seed = {seed}\n"
    )
}
