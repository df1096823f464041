//! Near-duplicate pruning: trigram MinHash inside category buckets, top-3
//! aggregation per article, a knee cutoff over all aggregates.

mod knee;
mod minhash;
mod prune;
mod score;

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use knee::{find_knee, KneeResult, DEFAULT_SENSITIVITY};
pub use minhash::{
    jaccard, minhash, signature_similarity, trigram_set, MinHashSignature, MinHasher, Trigram, DEFAULT_PERMUTATIONS,
};
pub use prune::{knee_pool, prune_corpus, removal_set, CorpusCounts, PruneCounts};
pub use score::{aggregate_score, score_buckets, ScoreOptions, Scores, SimilarityRecord, TopScores, DEFAULT_THRESHOLD, TOP_K};

use crate::encode::EncodedArticle;
use crate::error::{Error, Result};
use crate::jsonl::for_each_batch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DedupParams {
    pub perms: usize,
    pub threshold: f64,
    pub seed: u64,
    pub sensitivity: f64,
}

impl DedupParams {
    pub fn new(seed: u64) -> DedupParams {
        DedupParams { perms: DEFAULT_PERMUTATIONS, threshold: DEFAULT_THRESHOLD, seed, sensitivity: DEFAULT_SENSITIVITY }
    }

    pub fn validate(&self) -> Result<()> {
        if self.perms == 0 || !(0.0..1.0).contains(&self.threshold) || !(self.sensitivity > 0.0) {
            return Err(Error::Config(format!("invalid dedup parameters: {self:?}")));
        }
        Ok(())
    }
}

/// Written next to the pruned corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DedupSummary {
    pub before: CorpusCounts,
    pub after: CorpusCounts,
    pub removed: u64,
    pub compared_articles: u64,
    pub pairs_compared: u64,
    pub knee: KneeResult,
    pub params: DedupParams,
}

/// Signatures for the articles in `wanted`.
pub fn signatures_for(
    encoded: &Path,
    wanted: &HashSet<u64>,
    hasher: &MinHasher,
    pool: &rayon::ThreadPool,
) -> Result<HashMap<u64, MinHashSignature>> {
    let mut out = HashMap::with_capacity(wanted.len());
    for_each_batch(encoded, crate::BATCH, |batch: Vec<EncodedArticle>| {
        let sigs: Vec<_> = pool.install(|| {
            batch
                .par_iter()
                .filter(|e| wanted.contains(&e.page_id))
                .map(|e| (e.page_id, hasher.sign_vector(&e.vector)))
                .collect()
        });
        out.extend(sigs);
        Ok(())
    })?;
    Ok(out)
}

/// Full dedup stage over files: sign, score, find the knee, prune.
pub fn dedup_files(
    clean: &Path,
    encoded: &Path,
    buckets: &Path,
    kept: &Path,
    removed: &Path,
    params: &DedupParams,
    workers: usize,
) -> Result<DedupSummary> {
    params.validate()?;
    let pool = crate::thread_pool(workers)?;
    let buckets = crate::cluster::read_manifest(buckets)?;
    let wanted: HashSet<u64> = buckets.iter().flat_map(|b| b.members.iter().copied()).collect();
    let hasher = MinHasher::new(params.perms, params.seed);
    let signatures = signatures_for(encoded, &wanted, &hasher, &pool)?;
    let opts = ScoreOptions { threshold: params.threshold, dedupe_pairs: true };
    let scores = pool.install(|| score_buckets(&buckets, &signatures, &opts))?;
    let knee = find_knee(&knee_pool(&scores.records), params.sensitivity);
    log::info!(
        "{} articles compared in {} pairs; knee found={} cutoff={:.4}",
        scores.records.len(),
        scores.pairs_compared,
        knee.found,
        knee.cutoff
    );
    let counts = prune_corpus(clean, kept, removed, &scores.records, &knee)?;
    Ok(DedupSummary {
        before: counts.before,
        after: counts.after,
        removed: counts.removed,
        compared_articles: scores.records.len() as u64,
        pairs_compared: scores.pairs_compared,
        knee,
        params: *params,
    })
}
