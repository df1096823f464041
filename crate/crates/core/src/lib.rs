//! Corpus construction from MediaWiki dumps.
//!
//! The crate is organised as a chain of batch stages, each reading and
//! writing line-oriented JSON:
//!
//! * [`ingest`]: download a `pages-articles` dump and stream it into raw pages.
//! * [`clean`]: strip wikitext down to plain prose plus categories and metadata.
//! * [`encode`]: tokenize, build a vocabulary and encode article prefixes.
//! * [`cluster`]: bucket encoded articles by category.
//! * [`dedup`]: MinHash scoring inside buckets, knee cutoff and pruning.
//! * [`stats`]: corpus reports and cosine delta between token profiles.
//! * [`pipeline`]: run all of the above from one configuration, with caching.

pub mod clean;
pub mod cluster;
pub mod dedup;
pub mod encode;
mod error;
pub mod ingest;
pub mod jsonl;
pub mod pipeline;
pub mod stats;

pub use clean::{CleanArticle, CleanConfig};
pub use cluster::Bucket;
pub use dedup::{KneeResult, MinHashSignature, SimilarityRecord};
pub use encode::{EncodedArticle, Vocabulary};
pub use error::{Error, Result};
pub use ingest::{DumpDescriptor, Project, RawPage};
pub use pipeline::PipelineConfig;
pub use stats::{CorpusReport, FreqProfile};

/// Records handed to a worker pool at a time by the file-level stages.
pub(crate) const BATCH: usize = 512;

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} worker threads: {e}")))
}
