use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};

use crate::ingest::Project;

/// Characters MediaWiki leaves unescaped in article paths.
const TITLE_SET: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~')
    .remove(b';')
    .remove(b'@')
    .remove(b'$')
    .remove(b'!')
    .remove(b'*')
    .remove(b'(')
    .remove(b')')
    .remove(b',')
    .remove(b'/')
    .remove(b':');

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub url: String,
    pub word_count: u64,
    pub cyrillic_ratio: f64,
}

pub fn canonical_url(title: &str, lang: &str, project: Project) -> String {
    let path = title.trim().replace(' ', "_");
    format!("https://{lang}.{}/wiki/{}", project.domain(), utf8_percent_encode(&path, TITLE_SET))
}

/// Any character of the basic Cyrillic block.
pub fn is_cyrillic_token(token: &str) -> bool {
    token.chars().any(|c| ('\u{0400}'..='\u{04FF}').contains(&c))
}

pub fn compute_metadata(text: &str, title: &str, lang: &str, project: Project) -> Metadata {
    let mut words = 0u64;
    let mut cyrillic = 0u64;
    for token in text.split_whitespace() {
        words += 1;
        cyrillic += u64::from(is_cyrillic_token(token));
    }
    let cyrillic_ratio = if words == 0 { 0.0 } else { cyrillic as f64 / words as f64 };
    Metadata { url: canonical_url(title, lang, project), word_count: words, cyrillic_ratio }
}
