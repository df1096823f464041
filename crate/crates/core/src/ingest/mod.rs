//! Dump retrieval and page extraction.

mod descriptor;
mod dump;
mod fetch;

pub use descriptor::{DumpDescriptor, Project, DEFAULT_URL_TEMPLATE};
pub use dump::{
    parse_dump, serialize_pages, DumpPages, DumpReader, IngestStats, PageFilter, RawPage, SkipReason,
    DEFAULT_REDIRECT_KEYWORDS, MIN_TEXT_CHARS,
};
pub use fetch::{fetch_dump, FetchOptions};
