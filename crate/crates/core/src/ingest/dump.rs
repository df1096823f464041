//! Streaming reader for `pages-articles` XML exports.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use bzip2::read::MultiBzDecoder;
use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl::JsonlWriter;

/// Pages with fewer characters of raw wikitext than this are dropped.
pub const MIN_TEXT_CHARS: usize = 80;

/// Redirect markers recognised at the start of page text, compared
/// case-insensitively. Covers the canonical keyword and the South Slavic wikis.
pub const DEFAULT_REDIRECT_KEYWORDS: &[&str] = &[
    "#REDIRECT",
    "#ПРЕУСМЕРИ",
    "#PREUSMERI",
    "#PREUSMJERI",
    "#PREUSMERITEV",
    "#ПРЕНАСОЧУВАЊЕ",
    "#ПРЕНАСОЧИ",
    "#ПРЕНАСОЧВАНЕ",
    "#ВИЖ",
];

/// One `<page>` of the dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPage {
    #[serde(rename = "id")]
    pub page_id: u64,
    pub title: String,
    #[serde(skip, default)]
    pub namespace: i64,
    pub text: String,
    #[serde(skip, default)]
    pub is_redirect: bool,
}

/// Pull parser over the pages of a dump, in document order, unfiltered.
pub struct DumpReader {
    xml: Reader<BufReader<Box<dyn Read + Send>>>,
    buf: Vec<u8>,
    compressed: bool,
    pages_emitted: u64,
    replaced_chars: u64,
    done: bool,
}

impl DumpReader {
    /// Open an archive. bzip2 input is detected by its magic bytes; anything
    /// else is read as plain XML.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut file = File::open(path).map_err(|e| Error::file(path, e))?;
        let mut magic = [0u8; 3];
        let n = file.read(&mut magic).map_err(|e| Error::file(path, e))?;
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        if n == 3 && &magic == b"BZh" {
            Ok(Self::new(Box::new(MultiBzDecoder::new(file)), true))
        } else {
            Ok(Self::new(Box::new(file), false))
        }
    }

    /// Read uncompressed XML from any source.
    pub fn from_reader(reader: impl Read + Send + 'static) -> Self {
        Self::new(Box::new(reader), false)
    }

    fn new(inner: Box<dyn Read + Send>, compressed: bool) -> Self {
        let mut xml = Reader::from_reader(BufReader::with_capacity(1 << 20, inner));
        xml.config_mut().trim_text(false);
        DumpReader { xml, buf: Vec::with_capacity(1 << 16), compressed, pages_emitted: 0, replaced_chars: 0, done: false }
    }

    /// Number of invalid UTF-8 sequences replaced with U+FFFD so far.
    pub fn replaced_chars(&self) -> u64 {
        self.replaced_chars
    }

    fn byte_offset(&self) -> u64 {
        self.xml.buffer_position() as u64
    }

    fn fail(&self, err: quick_xml::Error) -> Error {
        match err {
            quick_xml::Error::Io(io) if self.compressed => {
                Error::TruncatedArchive { pages_emitted: self.pages_emitted, message: io.to_string() }
            }
            other => Error::Xml { offset: self.byte_offset(), message: other.to_string() },
        }
    }

    fn eof_inside_page(&self) -> Error {
        let message = "unexpected end of input inside <page>".to_string();
        if self.compressed {
            Error::TruncatedArchive { pages_emitted: self.pages_emitted, message }
        } else {
            Error::Xml { offset: self.byte_offset(), message }
        }
    }

    fn decode(&mut self, raw: &[u8]) -> Result<String> {
        let text = match std::str::from_utf8(raw) {
            Ok(s) => std::borrow::Cow::Borrowed(s),
            Err(_) => {
                let lossy = String::from_utf8_lossy(raw);
                self.replaced_chars += lossy.chars().filter(|&c| c == '\u{FFFD}').count() as u64;
                lossy
            }
        };
        quick_xml::escape::unescape(&text)
            .map(|s| s.into_owned())
            .map_err(|e| Error::Xml { offset: self.byte_offset(), message: e.to_string() })
    }

    fn read_page(&mut self) -> Result<RawPage> {
        #[derive(Clone, Copy, PartialEq)]
        enum Field {
            Title,
            Ns,
            Id,
            Text,
            Other,
        }
        fn slot<'a>(f: Field, title: &'a mut String, ns: &'a mut String, id: &'a mut String, text: &'a mut String) -> &'a mut String {
            match f {
                Field::Title => title,
                Field::Ns => ns,
                Field::Id => id,
                _ => text,
            }
        }
        let mut title = String::new();
        let mut ns = String::new();
        let mut id = String::new();
        let mut text = String::new();
        let mut redirect = false;
        // Element path below <page>.
        let mut path: Vec<Vec<u8>> = Vec::new();
        let mut field = Field::Other;

        loop {
            self.buf.clear();
            let event = self.xml.read_event_into(&mut self.buf);
            let event = match event {
                Ok(ev) => ev.into_owned(),
                Err(e) => return Err(self.fail(e)),
            };
            match event {
                Event::Start(e) => {
                    let name = e.local_name().as_ref().to_vec();
                    field = match (path.len(), name.as_slice()) {
                        (0, b"title") => Field::Title,
                        (0, b"ns") => Field::Ns,
                        (0, b"id") => Field::Id,
                        (1, b"text") if path[0] == b"revision" => Field::Text,
                        _ => Field::Other,
                    };
                    if path.is_empty() && name == b"redirect" {
                        redirect = true;
                    }
                    path.push(name);
                }
                Event::Empty(e) => {
                    if path.is_empty() && e.local_name().as_ref() == b"redirect" {
                        redirect = true;
                    }
                }
                Event::End(_) => {
                    if path.pop().is_none() {
                        break;
                    }
                    field = Field::Other;
                }
                Event::Text(t) if field != Field::Other => {
                    let s = self.decode(&t)?;
                    slot(field, &mut title, &mut ns, &mut id, &mut text).push_str(&s);
                }
                Event::CData(t) if field != Field::Other => {
                    let s = String::from_utf8_lossy(&t.into_inner()).into_owned();
                    slot(field, &mut title, &mut ns, &mut id, &mut text).push_str(&s);
                }
                Event::Eof => return Err(self.eof_inside_page()),
                _ => {}
            }
        }

        let page_id = id
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Xml { offset: self.byte_offset(), message: format!("page without a valid id: `{id}`") })?;
        let namespace = ns.trim().parse::<i64>().unwrap_or(0);
        Ok(RawPage { page_id, title: title.trim().to_string(), namespace, text, is_redirect: redirect })
    }
}

impl Iterator for DumpReader {
    type Item = Result<RawPage>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.xml.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => {
                    self.done = true;
                    return Some(Err(self.fail(e)));
                }
            };
            match event {
                Event::Start(e) if e.local_name().as_ref() == b"page" => {
                    let page = self.read_page();
                    match &page {
                        Ok(_) => self.pages_emitted += 1,
                        Err(_) => self.done = true,
                    }
                    return Some(page);
                }
                Event::Eof => {
                    self.done = true;
                    return None;
                }
                _ => {}
            }
        }
    }
}

/// Why a page was left out of the raw corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    Namespace,
    Redirect,
    TooShort,
}

/// Main-namespace, non-redirect, minimum-length filter.
#[derive(Debug, Clone)]
pub struct PageFilter {
    pub min_chars: usize,
    pub redirect_keywords: Vec<String>,
}

impl Default for PageFilter {
    fn default() -> Self {
        PageFilter {
            min_chars: MIN_TEXT_CHARS,
            redirect_keywords: DEFAULT_REDIRECT_KEYWORDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl PageFilter {
    pub fn classify(&self, page: &RawPage) -> Option<SkipReason> {
        if page.namespace != 0 {
            return Some(SkipReason::Namespace);
        }
        if page.is_redirect || self.starts_with_redirect(&page.text) {
            return Some(SkipReason::Redirect);
        }
        if page.text.chars().count() < self.min_chars {
            return Some(SkipReason::TooShort);
        }
        None
    }

    fn starts_with_redirect(&self, text: &str) -> bool {
        let head: String = text.trim_start().chars().take(32).flat_map(char::to_uppercase).collect();
        self.redirect_keywords.iter().any(|k| head.starts_with(&k.to_uppercase()))
    }
}

/// Counters reported by ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub pages_read: u64,
    pub retained: u64,
    pub skipped_namespace: u64,
    pub skipped_redirect: u64,
    pub skipped_short: u64,
    pub replaced_chars: u64,
}

impl IngestStats {
    pub fn skipped(&self) -> u64 {
        self.skipped_namespace + self.skipped_redirect + self.skipped_short
    }

    fn record(&mut self, reason: Option<SkipReason>) {
        self.pages_read += 1;
        match reason {
            None => self.retained += 1,
            Some(SkipReason::Namespace) => self.skipped_namespace += 1,
            Some(SkipReason::Redirect) => self.skipped_redirect += 1,
            Some(SkipReason::TooShort) => self.skipped_short += 1,
        }
    }
}

/// Filtered page stream: only pages passing [`PageFilter`] are yielded,
/// with per-reason counters kept along the way.
pub struct DumpPages {
    reader: DumpReader,
    filter: PageFilter,
    stats: IngestStats,
}

impl DumpPages {
    pub fn new(reader: DumpReader, filter: PageFilter) -> Self {
        DumpPages { reader, filter, stats: IngestStats::default() }
    }

    pub fn stats(&self) -> IngestStats {
        IngestStats { replaced_chars: self.reader.replaced_chars(), ..self.stats.clone() }
    }
}

impl Iterator for DumpPages {
    type Item = Result<RawPage>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let page = match self.reader.next()? {
                Ok(p) => p,
                Err(e) => return Some(Err(e)),
            };
            let reason = self.filter.classify(&page);
            self.stats.record(reason);
            if reason.is_none() {
                return Some(Ok(page));
            }
        }
    }
}

/// Open `archive` and stream its article pages with the default filter.
pub fn parse_dump(archive: impl AsRef<Path>) -> Result<DumpPages> {
    Ok(DumpPages::new(DumpReader::open(archive)?, PageFilter::default()))
}

/// Drain `pages` into a JSONL file of `{"id", "title", "text"}` objects.
pub fn serialize_pages(pages: &mut DumpPages, out: impl AsRef<Path>) -> Result<IngestStats> {
    let mut writer = JsonlWriter::create(out)?;
    for page in pages.by_ref() {
        writer.write(&page?)?;
    }
    writer.finish()?;
    Ok(pages.stats())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page_xml(id: u64, ns: i64, title: &str, text: &str, redirect: bool) -> String {
        let redirect = if redirect { format!("<redirect title=\"{title}\" />") } else { String::new() };
        format!(
            "<page><title>{title}</title><ns>{ns}</ns><id>{id}</id>{redirect}<revision><id>{}</id>\
             <text bytes=\"{}\" xml:space=\"preserve\">{text}</text></revision></page>",
            id + 1000,
            text.len()
        )
    }

    fn dump(pages: &[String]) -> String {
        format!("<mediawiki><siteinfo><sitename>T</sitename></siteinfo>{}</mediawiki>", pages.concat())
    }

    fn pages_of(xml: String) -> DumpPages {
        DumpPages::new(DumpReader::from_reader(std::io::Cursor::new(xml.into_bytes())), PageFilter::default())
    }

    #[test]
    fn emits_main_namespace_article() {
        let text = "x".repeat(100);
        let mut pages = pages_of(dump(&[page_xml(7, 0, "Beograd", &text, false)]));
        let page = pages.next().unwrap().unwrap();
        assert_eq!(page.page_id, 7);
        assert_eq!(page.title, "Beograd");
        assert_eq!(page.text, text);
        assert!(pages.next().is_none());
        assert_eq!(pages.stats().retained, 1);
    }

    #[test]
    fn skips_redirect_element_and_keyword() {
        let body = "y".repeat(120);
        let keyword = format!("#preusmeri [[Drugde]] {body}");
        let mut pages = pages_of(dump(&[
            page_xml(1, 0, "A", &body, true),
            page_xml(2, 0, "B", &keyword, false),
            page_xml(3, 0, "C", &body, false),
        ]));
        let kept: Vec<_> = pages.by_ref().map(|p| p.unwrap().page_id).collect();
        assert_eq!(kept, vec![3]);
        let stats = pages.stats();
        assert_eq!(stats.skipped_redirect, 2);
        assert_eq!(stats.retained, 1);
    }

    #[test]
    fn length_threshold_boundary() {
        let mut pages = pages_of(dump(&[
            page_xml(1, 0, "Short", &"ж".repeat(79), false),
            page_xml(2, 0, "Exact", &"ж".repeat(80), false),
        ]));
        let kept: Vec<_> = pages.by_ref().map(|p| p.unwrap().page_id).collect();
        assert_eq!(kept, vec![2]);
        assert_eq!(pages.stats().skipped_short, 1);
    }

    #[test]
    fn unescapes_entities() {
        let text = format!("a &lt;ref&gt;b&lt;/ref&gt; &amp; {}", "z".repeat(90));
        let mut pages = pages_of(dump(&[page_xml(1, 0, "E", &text, false)]));
        let page = pages.next().unwrap().unwrap();
        assert!(page.text.starts_with("a <ref>b</ref> & "));
    }

    #[test]
    fn malformed_xml_reports_offset() {
        let xml = "<mediawiki><page><title>A</title><ns>0</ns><id>1</id></pag></mediawiki>".to_string();
        let err = pages_of(xml).next().unwrap().unwrap_err();
        match err {
            Error::Xml { offset, .. } => assert!(offset > 0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_dump_yields_nothing() {
        let mut pages = pages_of(dump(&[]));
        assert!(pages.next().is_none());
        assert_eq!(pages.stats(), IngestStats::default());
    }

    #[test]
    fn invalid_utf8_is_replaced_and_counted() {
        let mut bytes = dump(&[page_xml(1, 0, "U", &format!("{}@@", "q".repeat(90)), false)]).into_bytes();
        let at = bytes.windows(2).position(|w| w == b"@@").unwrap();
        bytes[at] = 0xff;
        let mut pages = DumpPages::new(DumpReader::from_reader(std::io::Cursor::new(bytes)), PageFilter::default());
        let page = pages.next().unwrap().unwrap();
        assert!(page.text.contains('\u{FFFD}'));
        assert_eq!(pages.stats().replaced_chars, 1);
    }
}
