use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::knee::KneeResult;
use super::score::SimilarityRecord;
use crate::clean::CleanArticle;
use crate::error::Result;
use crate::jsonl::{JsonlReader, JsonlWriter};

/// Aggregates of every compared article, ascending. Articles that were
/// compared but never cleared the pair threshold contribute zeros.
pub fn knee_pool(records: &BTreeMap<u64, SimilarityRecord>) -> Vec<f64> {
    let mut pool: Vec<f64> = records.values().map(|r| r.aggregate).collect();
    pool.sort_by(f64::total_cmp);
    pool
}

/// Articles whose aggregate is strictly above the cutoff. Nothing is removed
/// without a knee.
pub fn removal_set<'a>(
    records: &'a BTreeMap<u64, SimilarityRecord>,
    knee: &KneeResult,
) -> BTreeMap<u64, &'a SimilarityRecord> {
    if !knee.found {
        return BTreeMap::new();
    }
    records.iter().filter(|(_, r)| r.aggregate > knee.cutoff).map(|(&id, r)| (id, r)).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub articles: u64,
    pub words: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneCounts {
    pub before: CorpusCounts,
    pub after: CorpusCounts,
    pub removed: u64,
}

/// Copy `clean` to `kept` without the removed articles, listing those in
/// `manifest` as `{"id", "aggregate", "top_scores"}` lines.
pub fn prune_corpus(
    clean: &Path,
    kept: &Path,
    manifest: &Path,
    records: &BTreeMap<u64, SimilarityRecord>,
    knee: &KneeResult,
) -> Result<PruneCounts> {
    if !knee.found {
        log::warn!("no knee in the score curve; keeping every article");
    }
    let removed = removal_set(records, knee);
    let mut counts = PruneCounts::default();
    let mut out = JsonlWriter::create(kept)?;
    let mut gone = JsonlWriter::create(manifest)?;
    for article in JsonlReader::<CleanArticle>::open(clean)? {
        let article = article?;
        counts.before.articles += 1;
        counts.before.words += article.word_count;
        match removed.get(&article.page_id) {
            Some(record) => {
                gone.write(record)?;
                counts.removed += 1;
            }
            None => {
                counts.after.articles += 1;
                counts.after.words += article.word_count;
                out.write(&article)?;
            }
        }
    }
    out.finish()?;
    gone.finish()?;
    Ok(counts)
}
