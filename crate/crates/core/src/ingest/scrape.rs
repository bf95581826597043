use alloc::string::String;
use alloc::vec::Vec;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{FetchStatus, NewsDoc};

/// Raw reply of a page fetch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchResponse {
    pub status: u16,
    pub body: Vec<u8>,
    pub content_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FetchError {
    #[error("request timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
}

/// Page source for [`resolve_and_scrape`]. Production code plugs in an HTTP
/// client; tests plug in canned pages.
pub trait Fetcher {
    fn fetch(&self, url: &str) -> Result<FetchResponse, FetchError>;
}

impl<F: Fetcher + ?Sized> Fetcher for &F {
    fn fetch(&self, url: &str) -> Result<FetchResponse, FetchError> {
        (**self).fetch(url)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleContent {
    pub title: String,
    pub body: String,
    pub extracted_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    /// Minimum text chars per (text + markup) char for a block to count as content.
    pub min_density: f64,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { min_density: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedText {
    pub title: String,
    pub body: String,
}

const BLOCK_TAGS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "br",
    "dd",
    "div",
    "dl",
    "dt",
    "figcaption",
    "figure",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "header",
    "hr",
    "html",
    "li",
    "main",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "td",
    "th",
    "title",
    "tr",
    "ul",
];

const SKIPPED_TAGS: &[&str] = &["script", "style", "noscript", "template", "svg", "head"];

#[derive(Default)]
struct Block {
    text: String,
    text_chars: usize,
    markup_chars: usize,
    in_title: bool,
    in_h1: bool,
}

impl Block {
    fn push_text(&mut self, raw: &str) {
        let decoded = decode_entities(raw);
        for c in decoded.chars() {
            if c.is_whitespace() {
                if !self.text.is_empty() && !self.text.ends_with(' ') {
                    self.text.push(' ');
                }
            } else {
                self.text.push(c);
            }
        }
    }

    fn finish(mut self) -> Option<Block> {
        let trimmed = self.text.trim_end().len();
        self.text.truncate(trimmed);
        self.text_chars = self.text.chars().count();
        Some(self)
    }

    fn density(&self) -> f64 {
        let total = self.text_chars + self.markup_chars;
        if total == 0 {
            0.0
        } else {
            self.text_chars as f64 / total as f64
        }
    }
}

struct TagInfo<'a> {
    name: &'a str,
    closing: bool,
    len: usize,
}

fn parse_tag(s: &str) -> Option<TagInfo<'_>> {
    let end = s.find('>')?;
    let inner = &s[1..end];
    let (closing, rest) = match inner.strip_prefix('/') {
        Some(r) => (true, r),
        None => (false, inner),
    };
    let name_end = rest
        .find(|c: char| c.is_whitespace() || c == '/' || c == '>')
        .unwrap_or(rest.len());
    let name = &rest[..name_end];
    if name.is_empty() || !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    Some(TagInfo {
        name,
        closing,
        len: end + 1,
    })
}

fn eq_ignore_case(list: &[&str], name: &str) -> bool {
    list.iter().any(|t| t.eq_ignore_ascii_case(name))
}

/// Finds the end of a skipped element such as `<script>`, returning the byte
/// offset just past its closing tag.
fn skip_element(html: &str, from: usize, name: &str) -> usize {
    let lower = html[from..].to_ascii_lowercase();
    let needle = alloc::format!("</{}", name.to_ascii_lowercase());
    match lower.find(&needle) {
        Some(pos) => {
            let close_start = from + pos;
            match html[close_start..].find('>') {
                Some(gt) => close_start + gt + 1,
                None => html.len(),
            }
        }
        None => html.len(),
    }
}

/// Extracts the title and main text of an HTML page.
///
/// The page is cut into blocks at block-level tags. Each block's density is
/// its visible text length over text plus markup length. The body is the
/// contiguous run of blocks at or above `min_density` carrying the most
/// text; blocks without visible text neither count nor break a run. Returns
/// `None` when no block qualifies.
pub fn extract_article(html: &str, config: &ExtractConfig) -> Option<ExtractedText> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut current = Block::default();
    let mut title = String::new();
    let mut h1 = String::new();
    let mut in_title = false;
    let mut in_h1 = false;
    let mut pos = 0;

    let bytes = html.as_bytes();
    while pos < html.len() {
        if bytes[pos] == b'<' {
            let rest = &html[pos..];
            if rest.starts_with("<!--") {
                let end = rest.find("-->").map(|e| pos + e + 3).unwrap_or(html.len());
                current.markup_chars += html[pos..end].chars().count();
                pos = end;
                continue;
            }
            if rest.starts_with("<!") || rest.starts_with("<?") {
                let end = rest.find('>').map(|e| pos + e + 1).unwrap_or(html.len());
                pos = end;
                continue;
            }
            if let Some(tag) = parse_tag(rest) {
                let tag_end = pos + tag.len;
                if !tag.closing && eq_ignore_case(SKIPPED_TAGS, tag.name) {
                    // <title> lives in <head>; pull it out before skipping.
                    let end = skip_element(html, tag_end, tag.name);
                    if tag.name.eq_ignore_ascii_case("head") {
                        title = head_title(&html[tag_end..end]);
                    }
                    pos = end;
                    continue;
                }
                if eq_ignore_case(BLOCK_TAGS, tag.name) {
                    if tag.closing {
                        current.markup_chars += tag.len;
                    }
                    current.in_title = in_title;
                    current.in_h1 = in_h1;
                    if let Some(b) = core::mem::take(&mut current).finish() {
                        blocks.push(b);
                    }
                    if !tag.closing {
                        current.markup_chars += tag.len;
                    }
                    if tag.name.eq_ignore_ascii_case("title") {
                        in_title = !tag.closing;
                    }
                    if tag.name.eq_ignore_ascii_case("h1") {
                        in_h1 = !tag.closing;
                    }
                } else {
                    current.markup_chars += tag.len;
                }
                pos = tag_end;
                continue;
            }
        }
        let step = html[pos..].chars().next().map_or(1, char::len_utf8);
        let next = html[pos + step..]
            .find('<')
            .map(|n| pos + step + n)
            .unwrap_or(html.len());
        current.push_text(&html[pos..next]);
        pos = next;
    }
    current.in_title = in_title;
    current.in_h1 = in_h1;
    if let Some(b) = current.finish() {
        blocks.push(b);
    }

    let mut content: Vec<&Block> = Vec::new();
    for b in &blocks {
        if b.in_title {
            if title.is_empty() {
                title = b.text.clone();
            }
            continue;
        }
        if b.in_h1 && h1.is_empty() && b.text_chars > 0 {
            h1 = b.text.clone();
        }
        content.push(b);
    }

    let mut best: Option<(usize, usize, usize)> = None; // (chars, start, end)
    let mut run_start: Option<usize> = None;
    let mut run_chars = 0;
    for (i, b) in content.iter().enumerate() {
        if b.text_chars == 0 {
            continue;
        }
        if b.density() >= config.min_density {
            if run_start.is_none() {
                run_start = Some(i);
                run_chars = 0;
            }
            run_chars += b.text_chars;
            if best.is_none_or(|(c, _, _)| run_chars > c) {
                best = Some((run_chars, run_start.unwrap_or(i), i));
            }
        } else {
            run_start = None;
        }
    }
    let (_, start, end) = best?;
    let body = content[start..=end]
        .iter()
        .filter(|b| b.text_chars > 0)
        .map(|b| b.text.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    if body.is_empty() {
        return None;
    }
    if title.is_empty() {
        title = h1;
    }
    Some(ExtractedText { title, body })
}

fn head_title(head: &str) -> String {
    let lower = head.to_ascii_lowercase();
    let Some(open) = lower.find("<title") else {
        return String::new();
    };
    let Some(gt) = head[open..].find('>') else {
        return String::new();
    };
    let start = open + gt + 1;
    let end = lower[start..]
        .find("</title")
        .map(|e| start + e)
        .unwrap_or(head.len());
    let mut b = Block::default();
    b.push_text(&head[start..end]);
    String::from(b.text.trim())
}

/// Decodes the character references common in Spanish news pages.
pub(crate) fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return String::from(s);
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail[1..]
            .find(';')
            .filter(|&semi| semi <= 10)
            .and_then(|semi| {
                let name = &tail[1..=semi];
                decode_entity(name).map(|c| (c, semi + 2))
            });
        match decoded {
            Some((c, used)) => {
                out.push(c);
                rest = &tail[used..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_entity(name: &str) -> Option<char> {
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return char::from_u32(code);
    }
    Some(match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => ' ',
        "aacute" => 'á',
        "eacute" => 'é',
        "iacute" => 'í',
        "oacute" => 'ó',
        "uacute" => 'ú',
        "Aacute" => 'Á',
        "Eacute" => 'É',
        "Iacute" => 'Í',
        "Oacute" => 'Ó',
        "Uacute" => 'Ú',
        "ntilde" => 'ñ',
        "Ntilde" => 'Ñ',
        "uuml" => 'ü',
        "Uuml" => 'Ü',
        "iexcl" => '¡',
        "iquest" => '¿',
        "laquo" => '«',
        "raquo" => '»',
        "ldquo" => '“',
        "rdquo" => '”',
        "lsquo" => '‘',
        "rsquo" => '’',
        "mdash" => '—',
        "ndash" => '–',
        "hellip" => '…',
        _ => return None,
    })
}

fn is_textual(content_type: Option<&str>) -> bool {
    match content_type {
        None => true,
        Some(ct) => {
            let ct = ct.to_ascii_lowercase();
            ct.starts_with("text/") || ct.contains("html") || ct.contains("xml")
        }
    }
}

/// Fetches a stub's canonical URL and fills title and body.
///
/// Never fails: remote problems land in `fetch_status`. Documents without a
/// URL end as `no_link`; unparseable links stay `broken_link`.
pub fn resolve_and_scrape<F: Fetcher + ?Sized>(
    mut doc: NewsDoc,
    fetcher: &F,
    config: &ExtractConfig,
) -> NewsDoc {
    doc.title = None;
    doc.body = None;
    let Some(url) = doc.canonical_url.clone() else {
        if doc.fetch_status != FetchStatus::BrokenLink {
            doc.fetch_status = FetchStatus::NoLink;
        }
        return doc;
    };
    doc.fetch_status = FetchStatus::FetchError;
    let Ok(resp) = fetcher.fetch(&url) else {
        return doc;
    };
    if !(200..300).contains(&resp.status) || !is_textual(resp.content_type.as_deref()) {
        return doc;
    }
    let html = String::from_utf8_lossy(&resp.body);
    if let Some(ExtractedText { title, body }) = extract_article(&html, config) {
        doc.title = if title.is_empty() { None } else { Some(title) };
        doc.body = Some(body);
        doc.fetch_status = FetchStatus::Ok;
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAGE: &str = r#"<!DOCTYPE html>
<html><head><title>Sismo sacude La Serena</title>
<script>var tracking = "lots of script text that must never show up in the body";</script>
<style>.x{color:red}</style></head>
<body>
<nav><ul><li><a href="/">Portada</a></li><li><a href="/deportes">Deportes</a></li><li><a href="/politica">Política</a></li></ul></nav>
<div class="article">
<p>Un sismo de magnitud 8,3 sacudió la zona centro norte del país durante la noche del miércoles.</p>
<p>La Oficina Nacional de Emergencia ordenó evacuar el borde costero de La Serena y Coquimbo.</p>
<p>Las autoridades informaron daños menores en viviendas &amp; caminos.</p>
</div>
<footer><a href="/terminos">Términos</a> | <a href="/contacto">Contacto</a></footer>
</body></html>"#;

    #[test]
    fn extracts_dominant_div() {
        let got = extract_article(PAGE, &ExtractConfig::default()).unwrap();
        assert_eq!(got.title, "Sismo sacude La Serena");
        assert_eq!(
            got.body,
            "Un sismo de magnitud 8,3 sacudió la zona centro norte del país durante la noche del miércoles.\n\
             La Oficina Nacional de Emergencia ordenó evacuar el borde costero de La Serena y Coquimbo.\n\
             Las autoridades informaron daños menores en viviendas & caminos."
        );
    }

    #[test]
    fn link_farm_has_no_content() {
        let html = r#"<ul><li><a href="/a/very/long/path">x</a></li><li><a href="/b/very/long/path">y</a></li></ul>"#;
        assert_eq!(extract_article(html, &ExtractConfig::default()), None);
    }

    #[test]
    fn multibyte_text_after_tag() {
        let html = "<div><p>ÁREA VERDE: Ñuñoa inaugura un parque de cuatro hectáreas junto al canal San Carlos.</p></div>";
        let got = extract_article(html, &ExtractConfig::default()).unwrap();
        assert!(got.body.starts_with("ÁREA VERDE"));
        // Stray '<' followed by a multibyte character.
        let _ = extract_article("<p>a <Ñ b</p><<é", &ExtractConfig::default());
    }

    #[test]
    fn entities() {
        assert_eq!(
            decode_entities("a &amp; b &#233; &#xF1; &bogus; &"),
            "a & b é ñ &bogus; &"
        );
    }
}
