//! Category buckets: the only places where articles are compared.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encode::EncodedArticle;
use crate::error::Result;
use crate::jsonl::{JsonlReader, JsonlWriter};

/// Largest bucket compared pairwise.
pub const DEFAULT_MAX_BUCKET: usize = 3000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub category: String,
    #[serde(rename = "chunk")]
    pub chunk_index: u32,
    pub members: Vec<u64>,
}

impl Bucket {
    pub fn pairs(&self) -> u64 {
        let n = self.members.len() as u64;
        n * n.saturating_sub(1) / 2
    }
}

/// Index every article under each of its categories, then cut groups into
/// consecutive chunks of at most `max_bucket` members in input order.
/// Chunks with a single member are dropped since they hold no pairs.
pub fn bucket_by_category<'a>(
    records: impl IntoIterator<Item = &'a EncodedArticle>,
    max_bucket: usize,
) -> Vec<Bucket> {
    let max_bucket = max_bucket.max(2);
    let mut groups: BTreeMap<&str, (Vec<u64>, HashSet<u64>)> = BTreeMap::new();
    for record in records {
        for category in &record.categories {
            let (members, seen) = groups.entry(category.as_str()).or_default();
            if seen.insert(record.page_id) {
                members.push(record.page_id);
            }
        }
    }
    let mut buckets = Vec::new();
    for (category, (members, _)) in groups {
        for (i, chunk) in members.chunks(max_bucket).enumerate() {
            if chunk.len() >= 2 {
                buckets.push(Bucket { category: category.to_string(), chunk_index: i as u32, members: chunk.to_vec() });
            }
        }
    }
    buckets
}

/// Upper bound on pair comparisons, before cross-bucket deduplication.
pub fn total_pairs(buckets: &[Bucket]) -> u64 {
    buckets.iter().map(Bucket::pairs).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub buckets: u64,
    pub total_pairs: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestLine {
    Bucket(Bucket),
    Summary(ManifestSummary),
}

/// One bucket per line, then a summary line with the pair count.
pub fn write_manifest(path: &Path, buckets: &[Bucket]) -> Result<ManifestSummary> {
    let mut writer = JsonlWriter::create(path)?;
    for b in buckets {
        writer.write(b)?;
    }
    let summary = ManifestSummary { buckets: buckets.len() as u64, total_pairs: total_pairs(buckets) };
    writer.write(&summary)?;
    writer.finish()?;
    Ok(summary)
}

/// Buckets of a manifest. A summary line that disagrees with the bucket
/// count means the file is incomplete.
pub fn read_manifest(path: &Path) -> Result<Vec<Bucket>> {
    let mut buckets = Vec::new();
    for line in JsonlReader::<ManifestLine>::open(path)? {
        match line? {
            ManifestLine::Bucket(b) => buckets.push(b),
            ManifestLine::Summary(s) if s.buckets != buckets.len() as u64 => {
                return Err(crate::Error::Config(format!(
                    "{}: summary lists {} buckets, file has {}",
                    path.display(),
                    s.buckets,
                    buckets.len()
                )));
            }
            ManifestLine::Summary(_) => {}
        }
    }
    Ok(buckets)
}

/// Bucket an encoded JSONL file and write the manifest.
pub fn cluster_file(encoded: &Path, manifest: &Path, max_bucket: usize) -> Result<ManifestSummary> {
    if max_bucket < 2 {
        return Err(crate::Error::Config("max bucket size must be at least 2".into()));
    }
    // Vectors are not needed here.
    let records: Vec<EncodedArticle> = JsonlReader::<EncodedArticle>::open(encoded)?
        .map(|r| r.map(|mut e| {
            e.vector = Vec::new();
            e
        }))
        .collect::<Result<_>>()?;
    write_manifest(manifest, &bucket_by_category(&records, max_bucket))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(id: u64, cats: &[&str]) -> EncodedArticle {
        EncodedArticle { page_id: id, vector: vec![], categories: cats.iter().map(|c| c.to_string()).collect() }
    }

    #[test]
    fn multi_category_membership() {
        let recs = [rec(1, &["A", "B"]), rec(2, &["A"]), rec(3, &["B"]), rec(4, &[])];
        let b = bucket_by_category(&recs, DEFAULT_MAX_BUCKET);
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].category.as_str(), &b[0].members[..]), ("A", &[1, 2][..]));
        assert_eq!((b[1].category.as_str(), &b[1].members[..]), ("B", &[1, 3][..]));
        assert!(b.iter().all(|b| !b.members.contains(&4)));
    }

    #[test]
    fn chunking() {
        let recs: Vec<_> = (0..7000).map(|i| rec(i, &["K"])).collect();
        let b = bucket_by_category(&recs, DEFAULT_MAX_BUCKET);
        let sizes: Vec<usize> = b.iter().map(|b| b.members.len()).collect();
        assert_eq!(sizes, [3000, 3000, 1000]);
        assert_eq!(b[2].members[0], 6000);
        assert_eq!(b.iter().map(|b| b.chunk_index).collect::<Vec<_>>(), [0, 1, 2]);
    }

    #[test]
    fn singletons_dropped_and_pairs_counted() {
        let recs: Vec<_> = (0..5).map(|i| rec(i, &["K"])).chain([rec(9, &["Solo"])]).collect();
        let b = bucket_by_category(&recs, 4);
        assert_eq!(b.len(), 1);
        assert_eq!(total_pairs(&b), 6);
    }

    #[test]
    fn repeated_category_counted_once() {
        let b = bucket_by_category(&[rec(1, &["A", "A"]), rec(2, &["A"])], 10);
        assert_eq!(b[0].members, [1, 2]);
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("buckets.jsonl");
        let b = bucket_by_category(&[rec(1, &["A"]), rec(2, &["A"]), rec(3, &["A"])], 10);
        let s = write_manifest(&path, &b).unwrap();
        assert_eq!(s, ManifestSummary { buckets: 1, total_pairs: 3 });
        assert_eq!(read_manifest(&path).unwrap(), b);
        let last = std::fs::read_to_string(&path).unwrap().lines().last().unwrap().to_string();
        assert_eq!(last, r#"{"buckets":1,"total_pairs":3}"#);
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
        assert!(read_manifest(&path).is_err());
    }

    proptest! {
        #[test]
        fn cap_and_coverage(
            cats in proptest::collection::vec(proptest::collection::vec(0u8..4, 0..4), 0..400),
            cap in 2usize..50,
        ) {
            // Skewed: category 0 gets most articles.
            let recs: Vec<_> = cats
                .iter()
                .enumerate()
                .map(|(i, cs)| {
                    let mut names: Vec<String> = cs.iter().map(|c| format!("C{}", c.min(&1))).collect();
                    names.extend(cs.iter().map(|c| format!("D{c}")));
                    EncodedArticle { page_id: i as u64, vector: vec![], categories: names }
                })
                .collect();
            let buckets = bucket_by_category(&recs, cap);
            prop_assert!(buckets.iter().all(|b| b.members.len() <= cap && b.members.len() >= 2));
            let mut placed: std::collections::HashMap<(u64, &str), usize> = Default::default();
            for b in &buckets {
                let unique: HashSet<_> = b.members.iter().collect();
                prop_assert_eq!(unique.len(), b.members.len());
                for &m in &b.members {
                    *placed.entry((m, b.category.as_str())).or_default() += 1;
                }
            }
            prop_assert!(placed.values().all(|&n| n == 1));
            // Every (article, category) pair is placed unless its chunk had one member.
            let mut group_sizes: std::collections::HashMap<&str, usize> = Default::default();
            for r in &recs {
                let distinct: HashSet<&String> = r.categories.iter().collect();
                for c in distinct {
                    *group_sizes.entry(c.as_str()).or_default() += 1;
                }
            }
            for (c, n) in group_sizes {
                let expected = if n % cap == 1 { n - 1 } else { n };
                let got = placed.keys().filter(|(_, pc)| *pc == c).count();
                prop_assert_eq!(got, expected);
            }
        }
    }
}
