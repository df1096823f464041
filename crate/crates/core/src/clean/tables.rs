//! Table flattening: `{| ... |}` blocks become lines of cell text.

use std::sync::OnceLock;

use regex::Regex;

fn is_open(line: &str) -> bool {
    line.trim_start().starts_with("{|")
}

fn is_close(line: &str) -> bool {
    line.trim_start().starts_with("|}")
}

fn inline_opener() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"([^\n\s])[ \t]*\{\|").unwrap())
}

/// Replace every table with its cell text: cells of a row joined by single
/// spaces, rows on separate lines. Innermost tables go first, so a nested
/// table ends up as plain text inside its parent's cell. Unclosed tables are
/// closed at the end of the text.
pub fn flatten_tables(text: &str) -> String {
    if !text.contains("{|") && !text.contains("|}") {
        return text.to_string();
    }
    let text = inline_opener().replace_all(text, "$1\n{|");
    let mut lines: Vec<String> = text.split('\n').map(str::to_string).collect();

    let mut open = 0usize;
    for line in &lines {
        if is_open(line) {
            open += 1;
        } else if is_close(line) && open > 0 {
            open -= 1;
        }
    }
    lines.extend(std::iter::repeat("|}".to_string()).take(open));

    while let Some((start, end)) = innermost(&lines) {
        let flat = flatten_one(&lines[start..=end]);
        lines.splice(start..=end, flat);
    }
    fallback(&lines.join("\n"))
}

/// First closed table, which cannot contain another unprocessed table.
fn innermost(lines: &[String]) -> Option<(usize, usize)> {
    let mut stack = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if is_open(line) {
            stack.push(i);
        } else if is_close(line) {
            if let Some(start) = stack.pop() {
                return Some((start, i));
            }
        }
    }
    None
}

fn flatten_one(table: &[String]) -> Vec<String> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut row: Vec<String> = Vec::new();
    let last = table.len() - 1;
    for line in &table[1..last] {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("|+") {
            end_row(&mut rows, &mut row);
            rows.push(vec![cell(rest)]);
        } else if t.starts_with("|-") {
            end_row(&mut rows, &mut row);
        } else if let Some(rest) = t.strip_prefix('!') {
            row.extend(rest.split("!!").flat_map(|c| c.split("||")).map(cell));
        } else if let Some(rest) = t.strip_prefix('|') {
            row.extend(rest.split("||").map(cell));
        } else if !t.is_empty() {
            match row.last_mut() {
                Some(c) if !c.is_empty() => {
                    c.push(' ');
                    c.push_str(t);
                }
                Some(c) => c.push_str(t),
                None => row.push(t.to_string()),
            }
        }
    }
    end_row(&mut rows, &mut row);

    let mut out: Vec<String> = rows
        .into_iter()
        .map(|r| r.into_iter().filter(|c| !c.is_empty()).collect::<Vec<_>>().join(" "))
        .filter(|r| !r.is_empty())
        .collect();
    let trailing = table[last].trim_start()[2..].trim();
    if !trailing.is_empty() {
        out.push(trailing.to_string());
    }
    out
}

fn end_row(rows: &mut Vec<Vec<String>>, row: &mut Vec<String>) {
    if !row.is_empty() {
        rows.push(std::mem::take(row));
    }
}

/// Cell text without its `attr="..." |` prefix, whitespace collapsed.
fn cell(raw: &str) -> String {
    let content = match raw.split_once('|') {
        Some((attrs, rest)) if attrs.contains('=') && !attrs.contains("[[") => rest,
        _ => raw,
    };
    content.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn fallback_patterns() -> &'static [Regex; 2] {
    static R: OnceLock<[Regex; 2]> = OnceLock::new();
    R.get_or_init(|| [Regex::new(r"(?s)\{\|.*\|\}").unwrap(), Regex::new(r"\{\||\|\}").unwrap()])
}

/// Whatever the line scanner left: inline tables, stray row blocks and
/// unmatched delimiters.
fn fallback(text: &str) -> String {
    let [greedy, stray] = fallback_patterns();
    let text = greedy.replace_all(text, "");
    let mut out = Vec::new();
    let mut in_rows = false;
    for line in text.split('\n') {
        if line.trim_start().starts_with("|-") {
            in_rows = true;
        } else if line.starts_with('=') {
            in_rows = false;
        }
        if !in_rows {
            out.push(line);
        }
    }
    stray.replace_all(&out.join("\n"), "").into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_table() {
        assert_eq!(flatten_tables("{| \n|-\n| a || b \n|-\n| c || d \n|}"), "a b\nc d");
    }

    #[test]
    fn unclosed_table_at_end() {
        assert_eq!(flatten_tables("Intro\n{|\n| x"), "Intro\nx");
    }

    #[test]
    fn nested_table() {
        let t = "{|\n| outer\n{|\n| in1 || in2\n|}\n| tail\n|}";
        assert_eq!(flatten_tables(t), "outer in1 in2 tail");
    }

    #[test]
    fn headers_captions_attributes() {
        let t = "{| class=\"wikitable\"\n|+ Caption\n! H1 !! H2\n|-\n| style=\"x\" | v1 || v2\n|}";
        assert_eq!(flatten_tables(t), "Caption\nH1 H2\nv1 v2");
    }

    #[test]
    fn cell_continuation_lines() {
        assert_eq!(flatten_tables("{|\n|\nfirst\nsecond\n|}"), "first second");
    }

    #[test]
    fn surrounding_text_kept() {
        assert_eq!(flatten_tables("Before\n{|\n| x\n|}\nAfter"), "Before\nx\nAfter");
    }

    #[test]
    fn stray_markers_removed() {
        assert_eq!(flatten_tables("a |} b"), "a  b");
        assert_eq!(flatten_tables("text\n|}\nmore"), "text\n\nmore");
    }

    #[test]
    fn no_table_identity() {
        assert_eq!(flatten_tables("a | b || c"), "a | b || c");
    }
}
