//! A small wikitext parser: templates, wikilinks, external links and
//! comments become nodes, everything else is text.
//!
//! Bracket pairs are matched up front with one stack pass, so a construct is
//! only parsed as a node when its closer exists inside the enclosing range.
//! Unbalanced openers stay in the text for the later string passes.
//! Rendering a parsed tree reproduces the source exactly.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Text(String),
    Comment { body: String, closed: bool },
    Template(Template),
    Link(Link),
    ExternalLink(ExternalLink),
}

/// `{{name|param|key=value}}`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub name: Vec<Node>,
    pub params: Vec<Vec<Node>>,
    /// Byte length of the template in the source, braces included.
    pub source_len: usize,
}

/// `[[target|text]]`; `parts[0]` is the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub parts: Vec<Vec<Node>>,
}

/// `[url label]`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalLink {
    pub url: String,
    pub separator: String,
    pub label: Vec<Node>,
}

impl Template {
    pub fn name_text(&self) -> String {
        render(&self.name).trim().to_string()
    }

    /// Parameter values in source order, with `key=` stripped from named ones.
    pub fn values(&self) -> Vec<Vec<Node>> {
        self.params.iter().map(|p| split_named(p).1).collect()
    }
}

impl Link {
    pub fn target(&self) -> String {
        render(&self.parts[0]).trim().to_string()
    }
}

/// Split a parameter at its first top-level `=` if that occurs in the
/// leading text nodes.
fn split_named(param: &[Node]) -> (Option<String>, Vec<Node>) {
    let mut key = String::new();
    for (i, node) in param.iter().enumerate() {
        match node {
            Node::Text(t) => {
                if let Some(eq) = t.find('=') {
                    key.push_str(&t[..eq]);
                    let mut value = Vec::with_capacity(param.len() - i);
                    let rest = &t[eq + 1..];
                    if !rest.is_empty() {
                        value.push(Node::Text(rest.to_string()));
                    }
                    value.extend(param[i + 1..].iter().cloned());
                    return (Some(key.trim().to_string()), value);
                }
                key.push_str(t);
            }
            Node::Comment { .. } => {}
            _ => break,
        }
    }
    (None, param.to_vec())
}

/// Source text of `nodes`.
pub fn render(nodes: &[Node]) -> String {
    let mut out = String::new();
    render_into(nodes, &mut out);
    out
}

fn render_into(nodes: &[Node], out: &mut String) {
    for node in nodes {
        match node {
            Node::Text(t) => out.push_str(t),
            Node::Comment { body, closed } => {
                out.push_str("<!--");
                out.push_str(body);
                if *closed {
                    out.push_str("-->");
                }
            }
            Node::Template(t) => {
                out.push_str("{{");
                render_into(&t.name, out);
                for p in &t.params {
                    out.push('|');
                    render_into(p, out);
                }
                out.push_str("}}");
            }
            Node::Link(l) => {
                out.push_str("[[");
                for (i, p) in l.parts.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    render_into(p, out);
                }
                out.push_str("]]");
            }
            Node::ExternalLink(e) => {
                out.push('[');
                out.push_str(&e.url);
                out.push_str(&e.separator);
                render_into(&e.label, out);
                out.push(']');
            }
        }
    }
}

/// Matching closer positions for `{{` and `[[` openers.
#[derive(Debug, Default)]
pub(crate) struct Pairs {
    braces: HashMap<usize, usize>,
    links: HashMap<usize, usize>,
}

impl Pairs {
    pub(crate) fn scan(src: &str) -> Pairs {
        let b = src.as_bytes();
        let mut pairs = Pairs::default();
        let mut brace_stack = Vec::new();
        let mut link_stack = Vec::new();
        let mut i = 0;
        while i < b.len() {
            if b[i..].starts_with(b"<!--") {
                i = match find(b, i + 4, b.len(), b"-->") {
                    Some(c) => c + 3,
                    None => b.len(),
                };
            } else if b[i..].starts_with(b"{{") {
                brace_stack.push(i);
                i += 2;
            } else if b[i..].starts_with(b"}}") {
                if let Some(open) = brace_stack.pop() {
                    pairs.braces.insert(open, i);
                }
                i += 2;
            } else if b[i..].starts_with(b"[[") {
                link_stack.push(i);
                i += 2;
            } else if b[i..].starts_with(b"]]") {
                if let Some(open) = link_stack.pop() {
                    pairs.links.insert(open, i);
                }
                i += 2;
            } else {
                i += 1;
            }
        }
        pairs
    }

    fn brace_close(&self, open: usize, end: usize) -> Option<usize> {
        self.braces.get(&open).copied().filter(|&c| c + 2 <= end)
    }

    fn link_close(&self, open: usize, end: usize) -> Option<usize> {
        self.links.get(&open).copied().filter(|&c| c + 2 <= end)
    }
}

fn find(b: &[u8], from: usize, to: usize, needle: &[u8]) -> Option<usize> {
    if from >= to {
        return None;
    }
    b[from..to].windows(needle.len()).position(|w| w == needle).map(|p| p + from)
}

const URL_SCHEMES: &[&str] = &["http://", "https://", "ftp://", "ftps://", "//", "mailto:", "news:", "irc://"];

pub fn parse(src: &str) -> Vec<Node> {
    let pairs = Pairs::scan(src);
    Parser { src, b: src.as_bytes(), pairs: &pairs }.range(0, src.len())
}

struct Parser<'a> {
    src: &'a str,
    b: &'a [u8],
    pairs: &'a Pairs,
}

impl Parser<'_> {
    fn range(&self, start: usize, end: usize) -> Vec<Node> {
        let mut nodes = Vec::new();
        let mut text_from = start;
        let mut i = start;
        let flush = |nodes: &mut Vec<Node>, from: usize, to: usize| {
            if from < to {
                nodes.push(Node::Text(self.src[from..to].to_string()));
            }
        };
        while i < end {
            let rest = &self.b[i..end];
            if rest.starts_with(b"<!--") {
                flush(&mut nodes, text_from, i);
                let (body_end, next, closed) = match find(self.b, i + 4, end, b"-->") {
                    Some(c) => (c, c + 3, true),
                    None => (end, end, false),
                };
                nodes.push(Node::Comment { body: self.src[i + 4..body_end].to_string(), closed });
                i = next;
                text_from = i;
            } else if let Some(close) = rest.starts_with(b"{{").then(|| self.pairs.brace_close(i, end)).flatten() {
                flush(&mut nodes, text_from, i);
                let mut parts = self.split_pipes(i + 2, close).into_iter();
                let (ns, ne) = parts.next().unwrap_or((i + 2, close));
                let name = self.range(ns, ne);
                let params = parts.map(|(s, e)| self.range(s, e)).collect();
                nodes.push(Node::Template(Template { name, params, source_len: close + 2 - i }));
                i = close + 2;
                text_from = i;
            } else if let Some(close) = rest.starts_with(b"[[").then(|| self.pairs.link_close(i, end)).flatten() {
                flush(&mut nodes, text_from, i);
                let parts = self.split_pipes(i + 2, close).into_iter().map(|(s, e)| self.range(s, e)).collect();
                nodes.push(Node::Link(Link { parts }));
                i = close + 2;
                text_from = i;
            } else if let Some((url_end, close)) = self.external_link(i, end) {
                flush(&mut nodes, text_from, i);
                let url = self.src[i + 1..url_end].to_string();
                let label_start = self.b[url_end..close]
                    .iter()
                    .position(|c| !c.is_ascii_whitespace())
                    .map_or(close, |p| url_end + p);
                nodes.push(Node::ExternalLink(ExternalLink {
                    url,
                    separator: self.src[url_end..label_start].to_string(),
                    label: self.range(label_start, close),
                }));
                i = close + 1;
                text_from = i;
            } else {
                i += 1;
            }
        }
        flush(&mut nodes, text_from, end);
        nodes
    }

    /// `[` + scheme + url, closed by `]` on the same line.
    fn external_link(&self, i: usize, end: usize) -> Option<(usize, usize)> {
        if self.b[i] != b'[' || self.b.get(i + 1) == Some(&b'[') {
            return None;
        }
        let after = &self.b[i + 1..end];
        if !URL_SCHEMES.iter().any(|s| after.len() > s.len() && after[..s.len()].eq_ignore_ascii_case(s.as_bytes())) {
            return None;
        }
        let mut url_end = i + 1;
        while url_end < end && !matches!(self.b[url_end], b' ' | b'\t' | b'\n' | b']' | b'[' | b'<' | b'{' | b'|') {
            url_end += 1;
        }
        let mut j = url_end;
        while j < end {
            match self.b[j] {
                b']' => return Some((url_end, j)),
                b'\n' | b'[' => return None,
                _ => j += 1,
            }
        }
        None
    }

    /// Split `[start, end)` at pipes that are not nested in braces, links or comments.
    fn split_pipes(&self, start: usize, end: usize) -> Vec<(usize, usize)> {
        let mut parts = Vec::new();
        let mut seg = start;
        let mut i = start;
        while i < end {
            let rest = &self.b[i..end];
            if rest.starts_with(b"<!--") {
                i = find(self.b, i + 4, end, b"-->").map_or(end, |c| c + 3);
            } else if let Some(c) = rest.starts_with(b"{{").then(|| self.pairs.brace_close(i, end)).flatten() {
                i = c + 2;
            } else if let Some(c) = rest.starts_with(b"[[").then(|| self.pairs.link_close(i, end)).flatten() {
                i = c + 2;
            } else if self.b[i] == b'|' {
                parts.push((seg, i));
                i += 1;
                seg = i;
            } else {
                i += 1;
            }
        }
        parts.push((seg, end));
        parts
    }
}
