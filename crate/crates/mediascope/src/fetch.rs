//! Page fetchers: a live HTTP client, a deterministic stub and an offline
//! fetcher that fails every request.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;
use std::time::Duration;

use mediascope_core::ingest::{canonicalize_url, FetchError, FetchResponse, Fetcher};

use crate::config::{FetcherMode, PipelineConfig};
use crate::formats::{read_file, FormatError};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

/// Blocking HTTP client. Non-2xx responses are returned, not raised, so
/// the scraper can record them.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build();
        HttpFetcher { agent: config.into() }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new(DEFAULT_TIMEOUT)
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str) -> Result<FetchResponse, FetchError> {
        let mut response = self.agent.get(url).call().map_err(|e| match e {
            ureq::Error::Timeout(_) => FetchError::Timeout,
            other => FetchError::Transport(other.to_string()),
        })?;
        let status = response.status().as_u16();
        let content_type = response.headers().get("content-type").and_then(|v| v.to_str().ok()).map(str::to_string);
        let body = response.body_mut().read_to_vec().map_err(|e| FetchError::Transport(e.to_string()))?;
        Ok(FetchResponse { status, body, content_type })
    }
}

/// Canned responses keyed by canonical URL. Unknown URLs answer 404.
#[derive(Debug, Clone, Default)]
pub struct StubFetcher {
    pages: BTreeMap<String, FetchResponse>,
}

fn key(url: &str) -> String {
    canonicalize_url(url).unwrap_or_else(|_| url.to_string())
}

impl StubFetcher {
    pub fn new() -> Self {
        StubFetcher::default()
    }

    pub fn insert(&mut self, url: &str, response: FetchResponse) {
        self.pages.insert(key(url), response);
    }

    pub fn html(mut self, url: &str, status: u16, body: &str) -> Self {
        let response = FetchResponse { status, body: body.as_bytes().to_vec(), content_type: Some("text/html; charset=utf-8".into()) };
        self.insert(url, response);
        self
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    /// Loads `pages.tsv` from `dir`: one `url<TAB>status<TAB>file` line per
    /// page, with `file` relative to `dir` (`-` for an empty body).
    pub fn from_dir(dir: &Path) -> Result<Self, FormatError> {
        let manifest = dir.join("pages.tsv");
        let rows = read_file(&manifest, |r| {
            let mut rows = Vec::new();
            for (i, line) in r.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                let f: Vec<&str> = line.split('\t').collect();
                let status = f.get(1).and_then(|s| s.trim().parse::<u16>().ok());
                match (f.len(), status) {
                    (3, Some(status)) => rows.push((f[0].to_string(), status, f[2].to_string())),
                    _ => return Err(FormatError::Line { line: i + 1, message: "expected url<TAB>status<TAB>file".into() }),
                }
            }
            Ok(rows)
        })?;
        let mut stub = StubFetcher::new();
        for (url, status, file) in rows {
            let body = if file == "-" {
                Vec::new()
            } else {
                let path = dir.join(&file);
                std::fs::read(&path).map_err(|e| FormatError::File { path, source: Box::new(e.into()) })?
            };
            stub.insert(&url, FetchResponse { status, body, content_type: Some("text/html; charset=utf-8".into()) });
        }
        Ok(stub)
    }
}

impl Fetcher for StubFetcher {
    fn fetch(&self, url: &str) -> Result<FetchResponse, FetchError> {
        Ok(self.pages.get(&key(url)).cloned().unwrap_or(FetchResponse { status: 404, body: Vec::new(), content_type: None }))
    }
}

/// Fails every request, leaving linked documents as `fetch_error`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OfflineFetcher;

impl Fetcher for OfflineFetcher {
    fn fetch(&self, _url: &str) -> Result<FetchResponse, FetchError> {
        Err(FetchError::Transport("offline mode".into()))
    }
}

/// The fetcher selected by `ingest.fetcher`.
pub fn fetcher_from(config: &PipelineConfig) -> Result<Box<dyn Fetcher + Send + Sync>, FormatError> {
    Ok(match config.ingest.fetcher {
        FetcherMode::Live => Box::new(HttpFetcher::new(Duration::from_secs(config.ingest.fetch_timeout_secs))),
        FetcherMode::Offline => Box::new(OfflineFetcher),
        FetcherMode::Stub => {
            let dir = config
                .paths
                .stub_pages
                .as_deref()
                .ok_or_else(|| FormatError::Invalid("ingest.fetcher = \"stub\" needs paths.stub_pages".into()))?;
            Box::new(StubFetcher::from_dir(dir)?)
        }
    })
}
