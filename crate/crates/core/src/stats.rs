//! Corpus reports and token-profile distances.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clean::CleanArticle;
use crate::encode::{count_tokens, merge_counts};
use crate::error::{Error, Result};
use crate::ingest::Project;
use crate::jsonl::{for_each_batch, JsonlReader};

pub const DEFAULT_TOP: usize = 100;

/// Relative token frequencies of a corpus and its `k` most frequent tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqProfile {
    /// Most frequent first, ties in lexicographic order.
    pub tokens: Vec<String>,
    /// Frequencies of every token in the corpus, summing to one.
    pub rel_freq: HashMap<String, f64>,
}

impl FreqProfile {
    pub fn from_counts(counts: &HashMap<String, u64>, k: usize) -> Result<FreqProfile> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        let mut ranked: Vec<(&String, u64)> = counts.iter().filter(|(_, &n)| n > 0).map(|(t, &n)| (t, n)).collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(FreqProfile {
            tokens: ranked.iter().take(k.max(1)).map(|(t, _)| (*t).clone()).collect(),
            rel_freq: ranked.iter().map(|&(t, n)| (t.clone(), n as f64 / total as f64)).collect(),
        })
    }

    pub fn freq(&self, token: &str) -> f64 {
        self.rel_freq.get(token).copied().unwrap_or(0.0)
    }
}

/// Profile of a set of articles, tokenized as for encoding.
pub fn profile<'a>(corpus: impl IntoIterator<Item = &'a CleanArticle>, k: usize) -> Result<FreqProfile> {
    let texts: Vec<&str> = corpus.into_iter().map(|a| a.text.as_str()).collect();
    FreqProfile::from_counts(&count_tokens(texts), k)
}

pub fn profile_file(path: &Path, k: usize, workers: usize) -> Result<FreqProfile> {
    let pool = crate::thread_pool(workers)?;
    let mut counts = HashMap::new();
    for_each_batch(path, crate::BATCH, |batch: Vec<CleanArticle>| {
        let part = pool.install(|| count_tokens(batch.par_iter().map(|a| a.text.as_str())));
        counts = merge_counts(std::mem::take(&mut counts), part);
        Ok(())
    })?;
    FreqProfile::from_counts(&counts, k)
}

/// Which tokens the two profiles are compared on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Top tokens of the first profile.
    #[default]
    First,
    /// Top tokens of either profile.
    Union,
}

pub fn reference_axis(p: &FreqProfile, q: &FreqProfile, axis: Axis) -> Vec<String> {
    match axis {
        Axis::First => p.tokens.clone(),
        Axis::Union => {
            let mut seen = HashSet::new();
            p.tokens.iter().chain(&q.tokens).filter(|t| seen.insert(t.as_str())).cloned().collect()
        }
    }
}

fn zscores(v: &[f64], name: &str) -> Result<Vec<f64>> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateProfile(format!("{name} has no variance over the axis")));
    }
    Ok(v.iter().map(|x| (x - mean) / sd).collect())
}

fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateProfile("zero vector over the axis".into()));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// `1 - cos` of the two profiles projected onto `axis`, each vector
/// z-scored over its own entries first. Lies in `[0, 2]`.
pub fn cosine_delta(p: &FreqProfile, q: &FreqProfile, axis: &[String]) -> Result<f64> {
    cosine_distance(p, q, axis, true)
}

/// Like [`cosine_delta`]; without `standardize` the raw relative
/// frequencies are compared.
pub fn cosine_distance(p: &FreqProfile, q: &FreqProfile, axis: &[String], standardize: bool) -> Result<f64> {
    if axis.is_empty() {
        return Err(Error::DegenerateProfile("empty reference axis".into()));
    }
    let pv: Vec<f64> = axis.iter().map(|t| p.freq(t)).collect();
    let qv: Vec<f64> = axis.iter().map(|t| q.freq(t)).collect();
    let (pv, qv) = if standardize { (zscores(&pv, "first profile")?, zscores(&qv, "second profile")?) } else { (pv, qv) };
    Ok(1.0 - cosine(&pv, &qv)?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub articles: u64,
    pub words: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub articles: u64,
    pub words: u64,
    /// Keyed by `lang.project`, taken from article URLs.
    pub projects: BTreeMap<String, Counts>,
}

impl CorpusReport {
    pub fn add(&mut self, article: &CleanArticle) {
        self.articles += 1;
        self.words += article.word_count;
        let c = self.projects.entry(dataset_of(&article.url)).or_default();
        c.articles += 1;
        c.words += article.word_count;
    }
}

fn dataset_of(url: &str) -> String {
    let host = url.strip_prefix("https://").and_then(|r| r.split('/').next()).unwrap_or("");
    match host.split_once('.') {
        Some((lang, domain)) => match Project::from_domain(domain) {
            Some(p) => format!("{lang}.{p}"),
            None => host.to_string(),
        },
        None => "unknown".to_string(),
    }
}

/// Before/after comparison of a filtering step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub before: CorpusReport,
    pub after: CorpusReport,
    pub article_reduction_pct: f64,
    pub word_reduction_pct: f64,
    pub warnings: Vec<String>,
}

fn reduction(before: u64, after: u64) -> f64 {
    if before == 0 {
        0.0
    } else {
        100.0 * (before as f64 - after as f64) / before as f64
    }
}

pub fn report<'a>(
    before: impl IntoIterator<Item = &'a CleanArticle>,
    after: impl IntoIterator<Item = &'a CleanArticle>,
) -> FilterReport {
    let mut r = FilterReport::default();
    let mut ids = HashSet::new();
    for a in before {
        r.before.add(a);
        ids.insert(a.page_id);
    }
    let mut strays = 0u64;
    for a in after {
        r.after.add(a);
        strays += u64::from(!ids.contains(&a.page_id));
    }
    finish(r, strays)
}

/// [`report`] over two JSONL files.
pub fn report_files(before: &Path, after: &Path) -> Result<FilterReport> {
    let mut r = FilterReport::default();
    let mut ids = HashSet::new();
    for a in JsonlReader::<CleanArticle>::open(before)? {
        let a = a?;
        r.before.add(&a);
        ids.insert(a.page_id);
    }
    let mut strays = 0u64;
    for a in JsonlReader::<CleanArticle>::open(after)? {
        let a = a?;
        r.after.add(&a);
        strays += u64::from(!ids.contains(&a.page_id));
    }
    Ok(finish(r, strays))
}

fn finish(mut r: FilterReport, strays: u64) -> FilterReport {
    if strays > 0 {
        let msg = format!("{strays} article(s) in the filtered corpus are missing from the original");
        log::warn!("{msg}");
        r.warnings.push(msg);
    }
    r.article_reduction_pct = reduction(r.before.articles, r.after.articles);
    r.word_reduction_pct = reduction(r.before.words, r.after.words);
    r
}

impl FilterReport {
    /// Plain-text table, one row per dataset plus a total row.
    pub fn render(&self) -> String {
        let mut rows: Vec<(String, Counts, Counts)> = self
            .before
            .projects
            .iter()
            .map(|(k, b)| (k.clone(), *b, self.after.projects.get(k).copied().unwrap_or_default()))
            .collect();
        rows.push((
            "Total".into(),
            Counts { articles: self.before.articles, words: self.before.words },
            Counts { articles: self.after.articles, words: self.after.words },
        ));
        let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(5).max(7);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>15}  {:>14}  {:>13}  {:>12}",
            "Dataset", "Articles Before", "Articles After", "Words Before", "Words After"
        );
        for (name, b, a) in rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>15}  {:>14}  {:>13}  {:>12}",
                name, b.articles, a.articles, b.words, a.words
            );
        }
        let _ = writeln!(
            out,
            "Reduction: {:.2}% articles, {:.2}% words",
            self.article_reduction_pct, self.word_reduction_pct
        );
        out
    }
}
