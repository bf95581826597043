use alloc::string::{String, ToString};
use alloc::vec::Vec;
use url::{Position, Url};

/// Query parameters dropped during canonicalization. Entries ending in `*`
/// are prefixes.
pub const TRACKING_PARAMS: &[&str] = &["utm_*", "fbclid", "gclid"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonicalizeError {
    #[error("unparseable url: {0}")]
    Parse(String),
    #[error("url has no host: {0}")]
    NoHost(String),
}

fn is_tracking(key: &str) -> bool {
    let key = key.to_ascii_lowercase();
    TRACKING_PARAMS.iter().any(|p| match p.strip_suffix('*') {
        Some(prefix) => key.starts_with(prefix),
        None => key == *p,
    })
}

/// Canonical form used as the dedup key: lowercase scheme and host, no
/// default port, no fragment, no tracking parameters, no trailing slash.
pub fn canonicalize_url(raw: &str) -> Result<String, CanonicalizeError> {
    let mut url = Url::parse(raw.trim()).map_err(|_| CanonicalizeError::Parse(raw.to_string()))?;
    if url.host_str().is_none_or(str::is_empty) {
        return Err(CanonicalizeError::NoHost(raw.to_string()));
    }
    url.set_fragment(None);

    let kept: Vec<String> = url
        .query()
        .unwrap_or("")
        .split('&')
        .filter(|pair| !pair.is_empty())
        .filter(|pair| !is_tracking(pair.split('=').next().unwrap_or("")))
        .map(ToString::to_string)
        .collect();
    if kept.is_empty() {
        url.set_query(None);
    } else {
        url.set_query(Some(&kept.join("&")));
    }

    let trimmed = url.path().trim_end_matches('/').to_string();
    if !trimmed.is_empty() {
        url.set_path(&trimmed);
    }

    // Root paths serialize as "/"; drop it so "http://a.cl/" and "http://a.cl" agree.
    let mut out = String::from(&url[..Position::BeforePath]);
    if url.path() != "/" {
        out.push_str(url.path());
    }
    out.push_str(&url[Position::AfterPath..]);
    Ok(out)
}
