//! Pipeline configuration: one TOML file, with `section.key=value`
//! overrides from the command line. Relative paths resolve against the
//! config file's directory.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono_tz::Tz;
use mediascope_core::classify::SvmParams;
use serde::{Deserialize, Serialize};

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "MEDIASCOPE_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parsing config: {0}")]
    Parse(String),
    #[error("bad override {0:?}: expected section.key=value")]
    Override(String),
    #[error("{field}: {} does not exist", path.display())]
    MissingPath { field: &'static str, path: PathBuf },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub tweets: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub tagged_corpus: Option<PathBuf>,
    pub labeled_corpus: Option<PathBuf>,
    pub lemma_rules: Option<PathBuf>,
    pub lemma_exceptions: Option<PathBuf>,
    pub frequency_list: Option<PathBuf>,
    pub media_roster: Option<PathBuf>,
    pub store: Option<PathBuf>,
    /// Directory with `pages.tsv` for the stub fetcher.
    pub stub_pages: Option<PathBuf>,
    /// Pretrained models; trained from the corpora when absent.
    pub tagger_model: Option<PathBuf>,
    pub classifier_model: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetcherMode {
    Live,
    Stub,
    Offline,
}

impl FromStr for FetcherMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "live" => Ok(FetcherMode::Live),
            "stub" => Ok(FetcherMode::Stub),
            "offline" => Ok(FetcherMode::Offline),
            other => Err(ConfigError::Invalid(format!("unknown fetcher mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub timezone: String,
    pub country_hint: String,
    pub fetcher: FetcherMode,
    pub fetch_timeout_secs: u64,
    pub workers: usize,
    pub min_density: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            timezone: "America/Santiago".into(),
            country_hint: "CL".into(),
            fetcher: FetcherMode::Offline,
            fetch_timeout_secs: 10,
            workers: 4,
            min_density: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NlpConfig {
    pub hmm_alpha: f64,
    pub keywords_k: usize,
    pub commonness_cutoff: usize,
}

impl Default for NlpConfig {
    fn default() -> Self {
        NlpConfig { hmm_alpha: 0.01, keywords_k: 5, commonness_cutoff: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub c: f64,
    pub epochs: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub folds: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let p = SvmParams::default();
        ClassifierConfig { c: p.c, epochs: p.epochs, tolerance: p.tolerance, seed: p.seed, folds: 10 }
    }
}

impl ClassifierConfig {
    pub fn svm_params(&self) -> SvmParams {
        SvmParams { c: self.c, epochs: self.epochs, tolerance: self.tolerance, seed: self.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeoConfig {
    pub max_ngram: usize,
}

impl Default for GeoConfig {
    fn default() -> Self {
        GeoConfig { max_ngram: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Concentration is reported for the top `top_k` media.
    pub top_k: usize,
    /// Externally reported figures to cross-check against the data.
    pub reported_total: Option<u64>,
    pub reported_monthly_mean: Option<f64>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { top_k: 10, reported_total: None, reported_monthly_mean: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub bind: String,
    /// Kept wide so out-of-range values reach validation instead of
    /// failing to parse.
    pub port: i64,
    /// Allowed CORS origins; `*` allows any.
    pub cors_origins: Vec<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig { bind: "127.0.0.1".into(), port: 8080, cors_origins: vec!["http://localhost:5173".into()] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub ingest: IngestConfig,
    pub nlp: NlpConfig,
    pub classifier: ClassifierConfig,
    pub geo: GeoConfig,
    pub report: ReportConfig,
    pub server: ServerConfig,
}

fn set_override(table: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let bad = || ConfigError::Override(spec.to_string());
    let (key, raw) = spec.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.len() != 2 || parts.iter().any(|p| p.is_empty()) {
        return Err(bad());
    }
    // Bare words are strings; anything TOML can read as a value keeps its type.
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let section = table.entry(parts[0]).or_insert_with(|| toml::Value::Table(toml::Table::new()));
    section.as_table_mut().ok_or_else(bad)?.insert(parts[1].to_string(), value);
    Ok(())
}

impl PipelineConfig {
    /// Parses TOML text, applies overrides and resolves relative paths
    /// against `base`.
    pub fn from_toml(text: &str, overrides: &[String], base: &Path) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for o in overrides {
            set_override(&mut table, o)?;
        }
        let mut config: PipelineConfig = table.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        config.resolve(base);
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        PipelineConfig::from_toml(&text, overrides, path.parent().unwrap_or(Path::new(".")))
    }

    /// Loads `path`, else the file named by `MEDIASCOPE_CONFIG`, else the
    /// defaults with overrides relative to the working directory.
    pub fn discover(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        match path.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from)) {
            Some(p) => PipelineConfig::load(&p, overrides),
            None => PipelineConfig::from_toml("", overrides, Path::new(".")),
        }
    }

    fn resolve(&mut self, base: &Path) {
        let p = &mut self.paths;
        for path in [
            &mut p.tweets,
            &mut p.gazetteer,
            &mut p.tagged_corpus,
            &mut p.labeled_corpus,
            &mut p.lemma_rules,
            &mut p.lemma_exceptions,
            &mut p.frequency_list,
            &mut p.media_roster,
            &mut p.store,
            &mut p.stub_pages,
            &mut p.tagger_model,
            &mut p.classifier_model,
        ]
        .into_iter()
        .flatten()
        {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    pub fn timezone(&self) -> Result<Tz, ConfigError> {
        self.ingest.timezone.parse().map_err(|_| ConfigError::Invalid(format!("unknown timezone {:?}", self.ingest.timezone)))
    }

    pub fn port(&self) -> Result<u16, ConfigError> {
        u16::try_from(self.server.port)
            .ok()
            .filter(|p| *p >= 1)
            .ok_or_else(|| ConfigError::Invalid(format!("port {} outside [1, 65535]", self.server.port)))
    }

    /// Checks scalar settings and that every configured input path exists.
    /// The store directory may be absent (it is created on first write).
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.timezone()?;
        self.port()?;
        if self.ingest.country_hint.len() != 2 {
            return Err(ConfigError::Invalid(format!("country_hint {:?} is not a two-letter code", self.ingest.country_hint)));
        }
        if self.nlp.hmm_alpha.is_nan() || self.nlp.hmm_alpha <= 0.0 {
            return Err(ConfigError::Invalid("nlp.hmm_alpha must be positive".into()));
        }
        if self.classifier.c.is_nan() || self.classifier.c <= 0.0 || self.classifier.folds < 2 {
            return Err(ConfigError::Invalid("classifier.c must be positive and folds at least 2".into()));
        }
        if self.geo.max_ngram == 0 || self.nlp.keywords_k == 0 {
            return Err(ConfigError::Invalid("geo.max_ngram and nlp.keywords_k must be at least 1".into()));
        }
        let p = &self.paths;
        let inputs = [
            ("paths.tweets", &p.tweets),
            ("paths.gazetteer", &p.gazetteer),
            ("paths.tagged_corpus", &p.tagged_corpus),
            ("paths.labeled_corpus", &p.labeled_corpus),
            ("paths.lemma_rules", &p.lemma_rules),
            ("paths.lemma_exceptions", &p.lemma_exceptions),
            ("paths.frequency_list", &p.frequency_list),
            ("paths.media_roster", &p.media_roster),
            ("paths.stub_pages", &p.stub_pages),
            ("paths.tagger_model", &p.tagger_model),
            ("paths.classifier_model", &p.classifier_model),
        ];
        for (field, path) in inputs {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(ConfigError::MissingPath { field, path: path.clone() });
                }
            }
        }
        Ok(())
    }

    /// The path in `slot`, or an error naming the missing setting.
    pub fn require<'a>(&self, field: &'static str, slot: &'a Option<PathBuf>) -> Result<&'a Path, ConfigError> {
        slot.as_deref().ok_or_else(|| ConfigError::Invalid(format!("{field} is not set")))
    }
}
