//! HTML-like tag handling.

use std::sync::OnceLock;

use regex::Regex;

use super::config::TagPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagAction {
    /// Remove the tag and everything inside it.
    Destroy,
    /// Keep the tag and its content verbatim.
    Preserve,
    /// Remove the tag, keep its content.
    Strip,
}

/// One tag occurrence and what was done with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagEvent {
    pub name: String,
    pub action: TagAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Open,
    Close,
    SelfClose,
}

struct Tag {
    start: usize,
    end: usize,
    name: String,
    kind: Kind,
}

fn tag_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"<(/?)([A-Za-z][A-Za-z0-9]*)((?:\s[^<>\n]*?)?)\s*(/?)>").unwrap())
}

fn scan(text: &str) -> Vec<Tag> {
    tag_re()
        .captures_iter(text)
        .map(|c| {
            let m = c.get(0).unwrap();
            let kind = if !c[1].is_empty() {
                Kind::Close
            } else if !c[4].is_empty() {
                Kind::SelfClose
            } else {
                Kind::Open
            };
            Tag { start: m.start(), end: m.end(), name: c[2].to_ascii_lowercase(), kind }
        })
        .collect()
}

fn matching_close(tags: &[Tag], open: usize) -> Option<usize> {
    let name = &tags[open].name;
    let mut depth = 0usize;
    for (j, t) in tags.iter().enumerate().skip(open) {
        if &t.name != name {
            continue;
        }
        match t.kind {
            Kind::Open => depth += 1,
            Kind::Close => {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            }
            Kind::SelfClose => {}
        }
    }
    None
}

/// Apply `policy` to every tag in `text`.
pub fn apply_tag_policy(text: &str, policy: &TagPolicy) -> String {
    apply_tag_policy_traced(text, policy).0
}

/// Like [`apply_tag_policy`], also reporting the action taken for each tag
/// occurrence in source order. Tags inside a destroyed element are reported
/// as destroyed.
pub fn apply_tag_policy_traced(text: &str, policy: &TagPolicy) -> (String, Vec<TagEvent>) {
    let tags = scan(text);
    let mut out = String::with_capacity(text.len());
    let mut events = Vec::with_capacity(tags.len());
    let mut pos = 0;
    let mut i = 0;
    while i < tags.len() {
        let t = &tags[i];
        out.push_str(&text[pos..t.start]);
        pos = t.end;
        let action = policy.action(&t.name);
        match action {
            TagAction::Destroy if t.kind == Kind::Open => {
                if let Some(j) = matching_close(&tags, i) {
                    events.extend(tags[i..=j].iter().map(|t| TagEvent { name: t.name.clone(), action }));
                    pos = tags[j].end;
                    i = j + 1;
                    continue;
                }
            }
            TagAction::Destroy => {}
            TagAction::Preserve => out.push_str(&text[t.start..t.end]),
            TagAction::Strip if t.name == "br" => out.push('\n'),
            TagAction::Strip => {}
        }
        events.push(TagEvent { name: t.name.clone(), action });
        i += 1;
    }
    out.push_str(&text[pos..]);
    (out, events)
}

/// Tags whose content is not wikitext and must not be parsed as such.
pub const OPAQUE_TAGS: &[&str] = &[
    "math", "chem", "ce", "code", "syntaxhighlight", "source", "pre", "nowiki", "score", "hiero", "timeline",
    "gallery", "templatedata", "graph", "mapframe", "imagemap",
];

const MARK_OPEN: char = '\u{E000}';
const MARK_CLOSE: char = '\u{E001}';

fn opaque_res() -> &'static (Regex, Regex, Regex) {
    static R: OnceLock<(Regex, Regex, Regex)> = OnceLock::new();
    R.get_or_init(|| {
        let names = OPAQUE_TAGS.join("|");
        (
            Regex::new(&format!(r"(?i)<({names})(\s[^<>]*)?>")).unwrap(),
            Regex::new(&format!(r"(?i)</({names})\s*>")).unwrap(),
            Regex::new("\u{E000}(\\d+)\u{E001}").unwrap(),
        )
    })
}

/// Content of opaque elements, set aside while the wikitext is cleaned.
#[derive(Debug, Default)]
pub struct Masks {
    slots: Vec<(String, String)>,
}

impl Masks {
    /// Replace the inner content of opaque elements with placeholders. The
    /// tags themselves stay in place.
    pub fn mask(text: &str) -> (String, Masks) {
        let text: String = text.chars().filter(|&c| c != MARK_OPEN && c != MARK_CLOSE).collect();
        let (open_re, close_re, _) = opaque_res();
        let mut masks = Masks::default();
        let mut out = String::with_capacity(text.len());
        let mut pos = 0;
        while let Some(open) = open_re.captures_at(&text, pos) {
            let m = open.get(0).unwrap();
            out.push_str(&text[pos..m.end()]);
            pos = m.end();
            if m.as_str().ends_with("/>") {
                continue;
            }
            let name = open[1].to_ascii_lowercase();
            let close = close_re.captures_iter(&text[pos..]).find(|c| c[1].eq_ignore_ascii_case(&name));
            if let Some(close) = close {
                let start = pos + close.get(0).unwrap().start();
                out.push(MARK_OPEN);
                out.push_str(&masks.slots.len().to_string());
                out.push(MARK_CLOSE);
                masks.slots.push((name, text[pos..start].to_string()));
                pos = start;
            }
        }
        out.push_str(&text[pos..]);
        (out, masks)
    }

    /// Put back the content of every placeholder whose tag name passes
    /// `select`.
    pub fn restore(&self, text: &str, select: impl Fn(&str) -> bool) -> String {
        if self.slots.is_empty() {
            return text.to_string();
        }
        opaque_res()
            .2
            .replace_all(text, |c: &regex::Captures| {
                let slot = c[1].parse::<usize>().ok().and_then(|i| self.slots.get(i));
                match slot {
                    Some((name, inner)) if select(name) => inner.clone(),
                    _ => c[0].to_string(),
                }
            })
            .into_owned()
    }
}
