//! Wikitext to plain text.
//!
//! [`clean_article`] runs five stages over one page:
//!
//! 1. a regex pass removing comments, file links and other bulky noise;
//! 2. parsing into nodes and pulling out category links;
//! 3. removal of templates, stray braces, link markup and tables;
//! 4. section filtering and heading enumeration;
//! 5. the tag policy and final normalization, then metadata.

mod config;
mod finalize;
mod markup;
mod metadata;
mod preclean;
mod sections;
mod tables;
mod tags;
mod wikicode;

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    normalize_template_name, CleanConfig, CleanOverrides, LanguageTables, Replacement, SectionMode, SectionPolicy, TagPolicy,
    TemplateKeepList, DEFAULT_TIMEOUT_SECS,
};
pub use finalize::final_clean;
pub use markup::{extract_categories, flatten_templates, remove_template_args, simplify_links, strip_braces};
pub use metadata::{canonical_url, compute_metadata, is_cyrillic_token, Metadata};
pub use preclean::pre_clean;
pub use sections::{enumerate_headings, filter_sections, normalize_heading, parse_heading};
pub use tables::flatten_tables;
pub use tags::{apply_tag_policy, apply_tag_policy_traced, Masks, TagAction, TagEvent, OPAQUE_TAGS};
pub use wikicode::{parse, render, ExternalLink, Link, Node, Template};

use crate::error::Result;
use crate::ingest::RawPage;
use crate::jsonl::{for_each_batch, JsonlWriter};

/// A cleaned article as written to `clean.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanArticle {
    #[serde(rename = "id")]
    pub page_id: u64,
    pub title: String,
    pub url: String,
    pub text: String,
    pub categories: Vec<String>,
    pub word_count: u64,
    pub cyrillic_ratio: f64,
}

/// Why an article produced no output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dropped {
    Timeout,
    Empty,
}

impl fmt::Display for Dropped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dropped::Timeout => "timed out",
            Dropped::Empty => "empty after cleaning",
        })
    }
}

/// Time budget checked between stages.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(Instant);

impl Deadline {
    pub fn after(budget: Duration) -> Deadline {
        Deadline(Instant::now() + budget)
    }

    fn check(&self) -> Result<(), Dropped> {
        if Instant::now() > self.0 {
            Err(Dropped::Timeout)
        } else {
            Ok(())
        }
    }
}

/// Clean one page with the configured per-article time budget.
pub fn clean_article(page: &RawPage, cfg: &CleanConfig) -> Result<CleanArticle, Dropped> {
    clean_article_until(page, cfg, Deadline::after(Duration::from_secs(cfg.timeout_secs)))
}

pub fn clean_article_until(page: &RawPage, cfg: &CleanConfig, deadline: Deadline) -> Result<CleanArticle, Dropped> {
    let (text, masks) = Masks::mask(&page.text);

    let text = pre_clean(&text, &cfg.tables);
    deadline.check()?;

    let mut nodes = parse(&remove_template_args(&text));
    let categories = markup::take_categories(&mut nodes, &cfg.tables);
    deadline.check()?;

    let nodes = simplify_links(flatten_templates(nodes, &cfg.templates), &cfg.tables);
    let text = flatten_tables(&strip_braces(&render(&nodes)));
    deadline.check()?;

    let text = enumerate_headings(&filter_sections(&text, &cfg.sections));
    deadline.check()?;

    let text = masks.restore(&text, |name| cfg.tags.action(name) != TagAction::Preserve);
    let text = final_clean(&apply_tag_policy(&text, &cfg.tags), cfg);
    let text = masks.restore(&text, |_| true);
    deadline.check()?;

    if text.is_empty() {
        return Err(Dropped::Empty);
    }
    let meta = compute_metadata(&text, &page.title, &cfg.language, cfg.project);
    Ok(CleanArticle {
        page_id: page.page_id,
        title: page.title.clone(),
        url: meta.url,
        text,
        categories,
        word_count: meta.word_count,
        cyrillic_ratio: meta.cyrillic_ratio,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanStats {
    pub read: u64,
    pub written: u64,
    pub dropped_empty: u64,
    pub dropped_timeout: u64,
}

/// Clean a raw JSONL file on `workers` threads. Output keeps input order.
pub fn clean_file(input: &Path, output: &Path, cfg: &CleanConfig, workers: usize) -> Result<CleanStats> {
    cfg.validate()?;
    let pool = crate::thread_pool(workers)?;
    let mut writer = JsonlWriter::create(output)?;
    let mut stats = CleanStats::default();
    for_each_batch(input, crate::BATCH, |batch: Vec<RawPage>| {
        stats.read += batch.len() as u64;
        let results: Vec<_> = pool.install(|| batch.par_iter().map(|p| clean_article(p, cfg)).collect());
        for (page, result) in batch.iter().zip(results) {
            match result {
                Ok(article) => writer.write(&article)?,
                Err(reason) => {
                    log::warn!("dropping page {} ({}): {reason}", page.page_id, page.title);
                    match reason {
                        Dropped::Empty => stats.dropped_empty += 1,
                        Dropped::Timeout => stats.dropped_timeout += 1,
                    }
                }
            }
        }
        Ok(())
    })?;
    stats.written = writer.finish()?;
    Ok(stats)
}
