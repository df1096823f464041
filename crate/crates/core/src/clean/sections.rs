//! Section filtering and heading enumeration.

use super::config::{SectionMode, SectionPolicy};

/// `(level, title)` when `line` is a wikitext heading such as `== A ==`.
pub fn parse_heading(line: &str) -> Option<(usize, &str)> {
    let line = line.trim_end();
    let open = line.bytes().take_while(|&b| b == b'=').count();
    let close = line.bytes().rev().take_while(|&b| b == b'=').count();
    if open == 0 || close == 0 || open + close >= line.len() {
        return None;
    }
    let level = open.min(close).min(6);
    let title = line[level..line.len() - level].trim();
    (!title.is_empty()).then_some((level, title))
}

/// Key used to compare heading titles.
pub fn normalize_heading(title: &str) -> String {
    let cleaned: String = title.chars().filter(|c| !matches!(c, '\'' | '"' | '[' | ']')).collect();
    cleaned.trim().trim_end_matches(':').split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

struct Section<'a> {
    level: usize,
    title: &'a str,
    heading: &'a str,
    body: Vec<&'a str>,
}

fn split(text: &str) -> (Vec<&str>, Vec<Section<'_>>) {
    let mut lead = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    for line in text.split('\n') {
        if let Some((level, title)) = parse_heading(line) {
            sections.push(Section { level, title, heading: line, body: Vec::new() });
        } else if let Some(s) = sections.last_mut() {
            s.body.push(line);
        } else {
            lead.push(line);
        }
    }
    (lead, sections)
}

fn blank(lines: &[&str]) -> bool {
    lines.iter().all(|l| l.trim().is_empty())
}

/// Keep or drop sections by heading. A listed heading applies to its
/// subsections as well. Sections left without any text, including those
/// whose subsections were all dropped, are removed.
pub fn filter_sections(text: &str, policy: &SectionPolicy) -> String {
    let (lead, sections) = split(text);
    let n = sections.len();

    let mut parent = vec![None; n];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..n {
        while stack.last().is_some_and(|&t| sections[t].level >= sections[i].level) {
            stack.pop();
        }
        parent[i] = stack.last().copied();
        stack.push(i);
    }

    let mut listed = vec![false; n];
    for i in 0..n {
        listed[i] = policy.matches(sections[i].title) || parent[i].is_some_and(|p| listed[p]);
    }
    let selected: Vec<bool> = match policy.mode {
        SectionMode::ExcludeListed => listed.iter().map(|l| !l).collect(),
        SectionMode::IncludeOnlyListed => listed,
    };

    let mut has_text = vec![false; n];
    let mut child_text = vec![false; n];
    for i in (0..n).rev() {
        has_text[i] = selected[i] && (child_text[i] || !blank(&sections[i].body));
        if has_text[i] {
            if let Some(p) = parent[i] {
                child_text[p] = true;
            }
        }
    }

    let keep_lead = match policy.mode {
        SectionMode::ExcludeListed => !blank(&lead),
        SectionMode::IncludeOnlyListed => policy.keep_lead && lead.iter().any(|l| l.trim_start().starts_with('*')),
    };
    let mut out: Vec<&str> = Vec::new();
    if keep_lead {
        out.extend(&lead);
    }
    for (s, keep) in sections.iter().zip(has_text) {
        if keep {
            out.push(s.heading);
            out.extend(&s.body);
        }
    }
    out.join("\n")
}

/// Rewrite headings as `1 Title`, `1.1 Title`, ... on their own lines.
/// Numbering follows nesting, so the shallowest level present is the top.
pub fn enumerate_headings(text: &str) -> String {
    let mut stack: Vec<(usize, u32)> = Vec::new();
    let lines: Vec<String> = text
        .split('\n')
        .map(|line| {
            let Some((level, title)) = parse_heading(line) else { return line.to_string() };
            // A popped entry sat directly under the new heading's parent, so
            // the new heading continues its count.
            let mut popped = 0;
            while stack.last().is_some_and(|&(l, _)| l > level) {
                popped = stack.pop().map_or(0, |(_, n)| n);
            }
            match stack.last_mut() {
                Some((l, n)) if *l == level => *n += 1,
                _ => stack.push((level, popped + 1)),
            }
            let number: Vec<String> = stack.iter().map(|(_, n)| n.to_string()).collect();
            format!("{} {}", number.join("."), title)
        })
        .collect();
    lines.join("\n")
}
