//! Node-level markup removal: categories, templates, links, stray braces.

use super::config::{LanguageTables, TemplateKeepList};
use super::wikicode::{parse, render, Link, Node};

/// Remove category links from `wikitext` and return their names in order of
/// first appearance, prefix and sort key stripped.
pub fn extract_categories(wikitext: &str, tables: &LanguageTables) -> (String, Vec<String>) {
    let mut nodes = parse(wikitext);
    let categories = take_categories(&mut nodes, tables);
    (render(&nodes), categories)
}

/// In-place variant over an already parsed tree. Category links nested in
/// templates or link captions are found as well.
pub fn take_categories(nodes: &mut Vec<Node>, tables: &LanguageTables) -> Vec<String> {
    let mut found = Vec::new();
    collect_categories(nodes, tables, &mut found);
    let mut seen = std::collections::HashSet::new();
    found.retain(|c| seen.insert(c.clone()));
    found
}

fn collect_categories(nodes: &mut Vec<Node>, tables: &LanguageTables, found: &mut Vec<String>) {
    nodes.retain_mut(|node| match node {
        Node::Link(link) => match category_name(link, tables) {
            Some(name) => {
                if !name.is_empty() {
                    found.push(name);
                }
                false
            }
            None => {
                for part in &mut link.parts {
                    collect_categories(part, tables, found);
                }
                true
            }
        },
        Node::Template(t) => {
            collect_categories(&mut t.name, tables, found);
            for p in &mut t.params {
                collect_categories(p, tables, found);
            }
            true
        }
        Node::ExternalLink(e) => {
            collect_categories(&mut e.label, tables, found);
            true
        }
        _ => true,
    });
}

fn category_name(link: &Link, tables: &LanguageTables) -> Option<String> {
    let target = link.target();
    // [[:Category:X]] links to the category page instead of categorising.
    if target.starts_with(':') {
        return None;
    }
    let (ns, name) = target.split_once(':')?;
    tables.is_category(ns).then(|| clean_title(name))
}

fn clean_title(name: &str) -> String {
    name.replace('_', " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

fn template_arg_re() -> &'static regex::Regex {
    static R: std::sync::OnceLock<regex::Regex> = std::sync::OnceLock::new();
    R.get_or_init(|| regex::Regex::new(r"\{\{\{[^{}]*\}\}\}").unwrap())
}

/// Remove template argument markers such as `{{{1|default}}}`, innermost
/// first.
pub fn remove_template_args(text: &str) -> String {
    let mut text = text.to_string();
    while let std::borrow::Cow::Owned(s) = template_arg_re().replace_all(&text, "") {
        text = s;
    }
    text
}

/// Drop comments and templates. Keep-list templates are replaced by their
/// parameter values joined with single spaces.
///
/// A template always encloses its nested templates, so resolving the tree
/// top-down handles longer templates before the shorter ones inside them;
/// children of a discarded template go with it.
pub fn flatten_templates(nodes: Vec<Node>, keep: &TemplateKeepList) -> Vec<Node> {
    let mut out = Vec::with_capacity(nodes.len());
    for node in nodes {
        match node {
            Node::Comment { .. } => {}
            Node::Template(t) => {
                if keep.contains(&t.name_text()) {
                    let mut first = true;
                    for value in t.values() {
                        let value = trim_nodes(flatten_templates(value, keep));
                        if value.is_empty() {
                            continue;
                        }
                        if !first {
                            out.push(Node::Text(" ".into()));
                        }
                        first = false;
                        out.extend(value);
                    }
                }
            }
            Node::Link(mut l) => {
                l.parts = l.parts.into_iter().map(|p| flatten_templates(p, keep)).collect();
                out.push(Node::Link(l));
            }
            Node::ExternalLink(mut e) => {
                e.label = flatten_templates(e.label, keep);
                out.push(Node::ExternalLink(e));
            }
            text @ Node::Text(_) => out.push(text),
        }
    }
    out
}

/// Trim whitespace at both ends of a node sequence; drops it entirely if
/// nothing but whitespace remains.
fn trim_nodes(mut nodes: Vec<Node>) -> Vec<Node> {
    while let Some(Node::Text(t)) = nodes.first_mut() {
        let trimmed = t.trim_start();
        if trimmed.is_empty() {
            nodes.remove(0);
        } else {
            *t = trimmed.to_string();
            break;
        }
    }
    while let Some(Node::Text(t)) = nodes.last_mut() {
        let trimmed = t.trim_end();
        if trimmed.is_empty() {
            nodes.pop();
        } else {
            *t = trimmed.to_string();
            break;
        }
    }
    nodes
}

/// Remove every balanced `{{ ... }}` range, nested pairs included.
/// Unbalanced openers are left alone.
pub fn strip_braces(text: &str) -> String {
    let b = text.as_bytes();
    let mut stack = Vec::new();
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i + 1 < b.len() {
        if b[i] == b'{' && b[i + 1] == b'{' {
            stack.push(i);
            i += 2;
        } else if b[i] == b'}' && b[i + 1] == b'}' {
            if let Some(open) = stack.pop() {
                spans.push((open, i + 2));
            }
            i += 2;
        } else {
            i += 1;
        }
    }
    if spans.is_empty() {
        return text.to_string();
    }
    spans.sort_unstable();
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for (start, end) in spans {
        if start < pos {
            continue; // nested in a span already removed
        }
        out.push_str(&text[pos..start]);
        pos = end;
    }
    out.push_str(&text[pos..]);
    out
}

/// Is `target` a link to another language edition, e.g. `fr:Page`?
pub(crate) fn is_interwiki(target: &str) -> bool {
    let Some((prefix, _)) = target.split_once(':') else { return false };
    if prefix == "simple" {
        return true;
    }
    let mut segments = prefix.split('-');
    let head = segments.next().unwrap_or("");
    (2..=3).contains(&head.len())
        && head.bytes().all(|c| c.is_ascii_lowercase())
        && segments.all(|s| !s.is_empty() && s.bytes().all(|c| c.is_ascii_lowercase()))
}

/// Replace links with their visible text. File links vanish, `[[T|V]]`
/// becomes `V`, `[[T]]` becomes `T`, `[url label]` becomes `label` and a bare
/// bracketed URL disappears. Interlanguage links are left for the final stage.
pub fn simplify_links(nodes: Vec<Node>, tables: &LanguageTables) -> Vec<Node> {
    let mut out = Vec::with_capacity(nodes.len());
    for node in nodes {
        match node {
            Node::Link(link) => {
                let target = link.target();
                let bare = target.trim_start_matches(':');
                if let Some((ns, _)) = bare.split_once(':') {
                    if tables.is_file(ns) || (!target.starts_with(':') && tables.is_category(ns)) {
                        continue;
                    }
                }
                if !target.starts_with(':') && link.parts.len() == 1 && is_interwiki(&target) {
                    out.push(Node::Link(link));
                    continue;
                }
                let mut parts = link.parts.into_iter();
                let target_nodes = parts.next().unwrap_or_default();
                let mut visible: Vec<Node> = Vec::new();
                for (i, part) in parts.enumerate() {
                    if i > 0 {
                        visible.push(Node::Text("|".into()));
                    }
                    visible.extend(part);
                }
                if render(&visible).trim().is_empty() {
                    let shown = render(&simplify_links(target_nodes, tables));
                    out.push(Node::Text(shown.trim().trim_start_matches(':').to_string()));
                } else {
                    out.extend(simplify_links(visible, tables));
                }
            }
            Node::ExternalLink(e) => {
                if !render(&e.label).trim().is_empty() {
                    out.extend(simplify_links(e.label, tables));
                }
            }
            Node::Template(mut t) => {
                t.params = t.params.into_iter().map(|p| simplify_links(p, tables)).collect();
                out.push(Node::Template(t));
            }
            other => out.push(other),
        }
    }
    out
}
