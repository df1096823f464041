//! Last normalization pass over the cleaned text.

use std::sync::OnceLock;

use regex::Regex;

use super::config::CleanConfig;
use super::markup::{flatten_templates, remove_template_args, simplify_links, strip_braces};
use super::wikicode::{parse, render};

struct Patterns {
    interwiki: Regex,
    hanging: Regex,
    heading: Regex,
    magic: Regex,
    closing: Regex,
    param_line: Regex,
    attributes: Regex,
    spaces: Regex,
    newlines: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        interwiki: Regex::new(r"\[\[\s*(?:[a-z]{2,3}(?:-[a-z]+)*|simple)\s*:[^\[\]|\n]*\]\]").unwrap(),
        hanging: Regex::new(r"\{\{[^{}\n|]*\|").unwrap(),
        heading: Regex::new(r"(?m)^=+[ \t]*(.*?)[ \t]*=+[ \t]*$").unwrap(),
        magic: Regex::new(r"__\p{Lu}[\p{Lu}\p{N}_]*?__").unwrap(),
        closing: Regex::new(r"</\s*([A-Za-z][A-Za-z0-9]*)\s*>").unwrap(),
        param_line: Regex::new(r"(?m)^[ \t]*\|[^\n]*=[^\n]*$").unwrap(),
        attributes: Regex::new(
            r#"(?i)\b(?:style|class|align|valign|width|height|colspan|rowspan|bgcolor|border|cellpadding|cellspacing|scope)\s*=\s*"[^"\n]*"\s*\|?"#,
        )
        .unwrap(),
        spaces: Regex::new("[ \t\u{00A0}]+").unwrap(),
        newlines: Regex::new(r"\n{3,}").unwrap(),
    })
}

const RESIDUE: &[&str] = &["{{", "}}", "[[", "]]", "{|", "|}", "<!--", "-->"];

/// Remove whatever markup survived the earlier stages and normalize
/// whitespace: runs of spaces collapse to one, lines are trimmed and at most
/// one blank line separates paragraphs.
pub fn final_clean(text: &str, cfg: &CleanConfig) -> String {
    let p = patterns();
    let text = p.interwiki.replace_all(text, "");
    let text = p.hanging.replace_all(&text, "");

    let nodes = parse(&remove_template_args(&text));
    let nodes = simplify_links(flatten_templates(nodes, &cfg.templates), &cfg.tables);
    let text = strip_braces(&render(&nodes));
    let text = p.heading.replace_all(&text, "$1");

    let text = p.magic.replace_all(&text, "");
    let text = p.closing.replace_all(&text, |c: &regex::Captures| {
        if cfg.tags.preserve.contains(&c[1].to_ascii_lowercase()) {
            c[0].to_string()
        } else {
            String::new()
        }
    });
    let text = p.param_line.replace_all(&text, "");
    let mut text = p.attributes.replace_all(&text, "").into_owned();

    for r in &cfg.tables.replacements {
        // Patterns are checked by CleanConfig::validate.
        if let Ok(re) = Regex::new(&r.pattern) {
            text = re.replace_all(&text, r.replace.as_str()).into_owned();
        }
    }

    loop {
        let before = text.len();
        for marker in RESIDUE {
            if text.contains(marker) {
                text = text.replace(marker, "");
            }
        }
        text = p.magic.replace_all(&text, "").into_owned();
        if text.len() == before {
            break;
        }
    }

    let text = p.spaces.replace_all(&text, " ");
    let text: Vec<&str> = text.split('\n').map(str::trim).collect();
    p.newlines.replace_all(&text.join("\n"), "\n\n").trim().to_string()
}
