//! First regex pass: removes the bulkiest noise before node parsing.

use std::sync::OnceLock;

use regex::Regex;

use super::config::LanguageTables;

fn patterns() -> &'static [(Regex, &'static str)] {
    static P: OnceLock<Vec<(Regex, &'static str)>> = OnceLock::new();
    P.get_or_init(|| {
        [
            (r"(?s)<!--.*?-->", ""),
            (r"(?is)<references(?:\s[^>]*)?>.*?</references\s*>", ""),
            (r"(?i)<references(?:\s[^>]*)?/>", ""),
            (r"(?m)^[ \t]*-{4,}[ \t]*$", ""),
            // bold / italic quote runs
            (r"'{2,}", ""),
        ]
        .into_iter()
        .map(|(p, r)| (Regex::new(p).expect("valid pre-clean pattern"), r))
        .collect()
    })
}

/// Strip comments, file/image links, reference lists, horizontal rules and
/// bold/italic markers. Everything else is left for the parser.
pub fn pre_clean(wikitext: &str, tables: &LanguageTables) -> String {
    let mut text = remove_file_links(wikitext, tables);
    for (re, rep) in patterns() {
        if let std::borrow::Cow::Owned(s) = re.replace_all(&text, *rep) {
            text = s;
        }
    }
    text
}

/// Remove `[[File:...]]`-style links, captions and nested links included.
pub(crate) fn remove_file_links(text: &str, tables: &LanguageTables) -> String {
    let b = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    let mut i = 0;
    while i + 1 < b.len() {
        if b[i] == b'[' && b[i + 1] == b'[' && is_file_target(&text[i + 2..], tables) {
            if let Some(end) = matching_close(b, i) {
                out.push_str(&text[pos..i]);
                pos = end;
                i = end;
                continue;
            }
        }
        i += 1;
    }
    out.push_str(&text[pos..]);
    out
}

fn is_file_target(after: &str, tables: &LanguageTables) -> bool {
    let head = after.trim_start().trim_start_matches(':');
    let Some(colon) = head.find(':') else { return false };
    if head[..colon].contains(['|', ']', '[', '\n']) {
        return false;
    }
    tables.is_file(&head[..colon])
}

/// End offset (exclusive) of the `]]` balancing the `[[` at `open`.
fn matching_close(b: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = open;
    while i + 1 < b.len() {
        if b[i] == b'[' && b[i + 1] == b'[' {
            depth += 1;
            i += 2;
        } else if b[i] == b']' && b[i + 1] == b']' {
            depth -= 1;
            i += 2;
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += 1;
        }
    }
    None
}
