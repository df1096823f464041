use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::minhash::{signature_similarity, MinHashSignature};
use crate::cluster::Bucket;
use crate::error::{Error, Result};

/// Only pairs scoring strictly above this are noted.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Number of best partner scores averaged per article.
pub const TOP_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRecord {
    #[serde(rename = "id")]
    pub page_id: u64,
    pub top_scores: Vec<f64>,
    pub aggregate: f64,
}

/// Mean of the best three scores, missing ones counted as zero.
pub fn aggregate_score(top_scores: &[f64]) -> f64 {
    top_scores.iter().take(TOP_K).fold(0.0, |acc, s| acc + s) / TOP_K as f64
}

/// Best scores of one article, at most one per partner.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TopScores(Vec<(f64, u64)>);

impl TopScores {
    pub fn push(&mut self, score: f64, partner: u64) {
        if self.0.iter().any(|&(_, p)| p == partner) {
            return;
        }
        self.0.push((score, partner));
        self.0.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        self.0.truncate(TOP_K);
    }

    /// Top scores of the union of both lists.
    pub fn merge(mut self, other: TopScores) -> TopScores {
        for (s, p) in other.0 {
            self.push(s, p);
        }
        self
    }

    pub fn scores(&self) -> Vec<f64> {
        self.0.iter().map(|&(s, _)| s).collect()
    }
}

fn merge_maps(mut a: HashMap<u64, TopScores>, b: HashMap<u64, TopScores>) -> HashMap<u64, TopScores> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (id, top) in b {
        let slot = a.entry(id).or_default();
        *slot = std::mem::take(slot).merge(top);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreOptions {
    pub threshold: f64,
    /// Score each article pair once even when it shares several buckets.
    pub dedupe_pairs: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions { threshold: DEFAULT_THRESHOLD, dedupe_pairs: true }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Scores {
    pub records: BTreeMap<u64, SimilarityRecord>,
    pub pairs_compared: u64,
}

/// Compare all pairs inside each bucket. Every bucketed article gets a
/// record, with an empty score list if no pair cleared the threshold.
pub fn score_buckets(
    buckets: &[Bucket],
    signatures: &HashMap<u64, MinHashSignature>,
    opts: &ScoreOptions,
) -> Result<Scores> {
    // Buckets of each article, ascending; a pair is scored by the first
    // bucket both belong to.
    let mut memberships: HashMap<u64, Vec<u32>> = HashMap::new();
    for (i, b) in buckets.iter().enumerate() {
        for &m in &b.members {
            if !signatures.contains_key(&m) {
                return Err(Error::MissingSignature(m));
            }
            memberships.entry(m).or_default().push(i as u32);
        }
    }
    let first_common = |x: u64, y: u64| -> Option<u32> {
        let (a, b) = (&memberships[&x], &memberships[&y]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(a[i]),
            }
        }
        None
    };

    let (tops, compared) = buckets
        .par_iter()
        .enumerate()
        .map(|(k, bucket)| -> Result<(HashMap<u64, TopScores>, u64)> {
            let mut local: HashMap<u64, TopScores> = HashMap::new();
            let mut compared = 0u64;
            for (i, &x) in bucket.members.iter().enumerate() {
                for &y in &bucket.members[i + 1..] {
                    if opts.dedupe_pairs && first_common(x, y) != Some(k as u32) {
                        continue;
                    }
                    compared += 1;
                    let s = signature_similarity(&signatures[&x], &signatures[&y])?;
                    if s > opts.threshold {
                        local.entry(x).or_default().push(s, y);
                        local.entry(y).or_default().push(s, x);
                    }
                }
            }
            Ok((local, compared))
        })
        .try_reduce(|| (HashMap::new(), 0), |a, b| Ok((merge_maps(a.0, b.0), a.1 + b.1)))?;

    let records = memberships
        .keys()
        .map(|&id| {
            let top_scores = tops.get(&id).map(TopScores::scores).unwrap_or_default();
            let aggregate = aggregate_score(&top_scores);
            (id, SimilarityRecord { page_id: id, top_scores, aggregate })
        })
        .collect();
    Ok(Scores { records, pairs_compared: compared })
}
