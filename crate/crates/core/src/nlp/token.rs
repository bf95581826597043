use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Number,
    Punctuation,
    Url,
    Mention,
    Hashtag,
}

/// Byte offsets into the source text, half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub span: Span,
    pub kind: TokenKind,
    pub pos: Option<String>,
    pub lemma: Option<String>,
}

impl Token {
    pub fn new(surface: &str, start: usize, kind: TokenKind) -> Token {
        Token {
            surface: String::from(surface),
            span: Span {
                start,
                end: start + surface.len(),
            },
            kind,
            pos: None,
            lemma: None,
        }
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn is_capitalized(&self) -> bool {
        self.surface.chars().next().is_some_and(char::is_uppercase)
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || unicode_mark(c)
}

fn unicode_mark(c: char) -> bool {
    unicode_normalization::char::is_combining_mark(c)
}

/// Trailing characters never kept at the end of a URL token.
const URL_TRAILERS: &[char] = &[
    '.', ',', ';', ':', '!', '?', ')', ']', '}', '»', '"', '\'', '”', '’',
];

fn scan_url(s: &str) -> Option<usize> {
    let lower_prefix: String = s.chars().take(8).flat_map(char::to_lowercase).collect();
    if !(lower_prefix.starts_with("http://")
        || lower_prefix.starts_with("https://")
        || lower_prefix.starts_with("www."))
    {
        return None;
    }
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    let trimmed = s[..end].trim_end_matches(URL_TRAILERS);
    Some(trimmed.len())
}

fn scan_while(s: &str, pred: impl Fn(char) -> bool) -> usize {
    s.char_indices()
        .find(|&(_, c)| !pred(c))
        .map(|(i, _)| i)
        .unwrap_or(s.len())
}

fn scan_word(s: &str) -> usize {
    let mut end = scan_while(s, is_word_char);
    // Internal hyphens and apostrophes join word pieces: "socio-económico".
    loop {
        let rest = &s[end..];
        let Some(joiner) = rest
            .chars()
            .next()
            .filter(|c| matches!(c, '-' | '\'' | '’'))
        else {
            break;
        };
        let after = &rest[joiner.len_utf8()..];
        if after.chars().next().is_some_and(char::is_alphabetic) {
            end += joiner.len_utf8() + scan_while(after, is_word_char);
        } else {
            break;
        }
    }
    end
}

fn scan_number(s: &str) -> usize {
    let mut end = scan_while(s, |c| c.is_ascii_digit());
    // "2.000.000", "95,8"
    loop {
        let rest = &s[end..];
        let mut chars = rest.chars();
        match (chars.next(), chars.next()) {
            (Some('.' | ','), Some(d)) if d.is_ascii_digit() => {
                end += 1 + scan_while(&rest[1..], |c| c.is_ascii_digit());
            }
            _ => break,
        }
    }
    end
}

/// Splits text into word, number, punctuation, URL, mention and hashtag
/// tokens. Whitespace is dropped; every other character lands in exactly one
/// token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().unwrap_or(' ');
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let (len, kind) = if let Some(len) = scan_url(rest).filter(|&l| l > 0) {
            (len, TokenKind::Url)
        } else if (c == '@' || c == '#')
            && rest[1..]
                .chars()
                .next()
                .is_some_and(|n| n.is_alphanumeric() || n == '_')
        {
            let len = 1 + scan_while(&rest[1..], |n| is_word_char(n) || n == '_');
            (
                len,
                if c == '@' {
                    TokenKind::Mention
                } else {
                    TokenKind::Hashtag
                },
            )
        } else if c.is_ascii_digit() {
            (scan_number(rest), TokenKind::Number)
        } else if is_word_char(c) {
            (scan_word(rest), TokenKind::Word)
        } else {
            (c.len_utf8(), TokenKind::Punctuation)
        };
        tokens.push(Token::new(&rest[..len], pos, kind));
        pos += len;
    }
    tokens
}
