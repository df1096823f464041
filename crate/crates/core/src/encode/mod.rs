//! Tokenization, vocabulary and fixed-prefix integer encoding.

mod vocab;

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

pub use vocab::{Vocabulary, DEFAULT_MIN_FREQ, UNKNOWN};

use crate::clean::CleanArticle;
use crate::error::Result;
use crate::jsonl::{for_each_batch, JsonlWriter};

/// Articles with more words than this are not encoded.
pub const DEFAULT_MAX_WORDS: u64 = 2000;
/// Number of leading tokens encoded per article.
pub const DEFAULT_PREFIX: usize = 500;

fn token_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"[\p{L}\p{M}]+|\p{Nd}+|\S").unwrap())
}

/// Lowercased tokens of `text`: letter runs, `"0"` for each digit run, and
/// every other non-space character on its own.
pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    token_re().find_iter(text).map(|m| {
        let t = m.as_str();
        if t.starts_with(|c: char| c.is_numeric()) {
            "0".to_string()
        } else {
            t.to_lowercase()
        }
    })
}

pub fn tokenize(text: &str) -> Vec<String> {
    tokens(text).collect()
}

/// Token counts over many texts.
pub fn count_tokens<'a>(texts: impl IntoParallelIterator<Item = &'a str>) -> HashMap<String, u64> {
    texts
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, u64>, text| {
            for t in tokens(text) {
                *acc.entry(t).or_insert(0) += 1;
            }
            acc
        })
        .reduce(HashMap::new, merge_counts)
}

pub(crate) fn merge_counts(mut a: HashMap<String, u64>, b: HashMap<String, u64>) -> HashMap<String, u64> {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (t, n) in b {
        *a.entry(t).or_insert(0) += n;
    }
    a
}

pub fn build_vocabulary<'a>(articles: impl IntoIterator<Item = &'a CleanArticle>, min_freq: u64) -> Vocabulary {
    let texts: Vec<&str> = articles.into_iter().map(|a| a.text.as_str()).collect();
    Vocabulary::from_counts(count_tokens(texts), min_freq)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedArticle {
    #[serde(rename = "id")]
    pub page_id: u64,
    pub vector: Vec<u32>,
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeParams {
    pub min_freq: u64,
    pub max_words: u64,
    pub prefix: usize,
}

impl Default for EncodeParams {
    fn default() -> Self {
        EncodeParams { min_freq: DEFAULT_MIN_FREQ, max_words: DEFAULT_MAX_WORDS, prefix: DEFAULT_PREFIX }
    }
}

/// `None` for articles over the word limit; otherwise the indices of the
/// first `prefix` tokens.
pub fn encode_article(article: &CleanArticle, vocab: &Vocabulary, params: &EncodeParams) -> Option<EncodedArticle> {
    if article.word_count > params.max_words {
        return None;
    }
    Some(EncodedArticle {
        page_id: article.page_id,
        vector: tokens(&article.text).take(params.prefix).map(|t| vocab.index(&t)).collect(),
        categories: article.categories.clone(),
    })
}

pub fn write_encoded<'a>(records: impl IntoIterator<Item = &'a EncodedArticle>, out: &Path) -> Result<u64> {
    crate::jsonl::write_all(out, records)
}

pub fn read_encoded(path: &Path) -> Result<Vec<EncodedArticle>> {
    crate::jsonl::read_all(path)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeStats {
    pub articles: u64,
    pub encoded: u64,
    pub excluded_long: u64,
    pub vocabulary: u64,
    pub tokens: u64,
}

/// Two passes over a cleaned corpus: count tokens and build the vocabulary,
/// then encode every article within the word limit.
pub fn encode_file(
    clean: &Path,
    encoded: &Path,
    vocab_path: &Path,
    params: &EncodeParams,
    workers: usize,
) -> Result<EncodeStats> {
    if params.min_freq == 0 || params.max_words == 0 || params.prefix == 0 {
        return Err(crate::Error::Config("encoding parameters must be positive".into()));
    }
    let pool = crate::thread_pool(workers)?;
    let mut counts = HashMap::new();
    for_each_batch(clean, crate::BATCH, |batch: Vec<CleanArticle>| {
        let part = pool.install(|| count_tokens(batch.par_iter().map(|a| a.text.as_str())));
        counts = merge_counts(std::mem::take(&mut counts), part);
        Ok(())
    })?;
    let mut stats = EncodeStats { tokens: counts.values().sum(), ..Default::default() };
    let vocab = Vocabulary::from_counts(counts, params.min_freq);
    vocab.save(vocab_path)?;
    stats.vocabulary = vocab.len() as u64;

    let mut writer = JsonlWriter::create(encoded)?;
    for_each_batch(clean, crate::BATCH, |batch: Vec<CleanArticle>| {
        stats.articles += batch.len() as u64;
        let out: Vec<_> = pool.install(|| batch.par_iter().map(|a| encode_article(a, &vocab, params)).collect());
        for record in out {
            match record {
                Some(r) => writer.write(&r)?,
                None => stats.excluded_long += 1,
            }
        }
        Ok(())
    })?;
    stats.encoded = writer.finish()?;
    Ok(stats)
}
