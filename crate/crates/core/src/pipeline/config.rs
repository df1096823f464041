use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clean::{CleanConfig, CleanOverrides};
use crate::cluster::DEFAULT_MAX_BUCKET;
use crate::dedup::{DedupParams, DEFAULT_PERMUTATIONS, DEFAULT_SENSITIVITY, DEFAULT_THRESHOLD};
use crate::encode::EncodeParams;
use crate::error::{Error, Result};
use crate::ingest::{DumpDescriptor, Project, DEFAULT_URL_TEMPLATE};
use crate::stats::{Axis, DEFAULT_TOP};

/// Overrides the configured working directory.
pub const WORKDIR_ENV: &str = "CORPUSFORGE_WORKDIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsParams {
    pub top: usize,
    pub axis: Axis,
}

impl Default for StatsParams {
    fn default() -> Self {
        StatsParams { top: DEFAULT_TOP, axis: Axis::First }
    }
}

/// Everything one pipeline run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub descriptor: DumpDescriptor,
    pub workdir: PathBuf,
    /// Local dump to use instead of downloading one.
    pub archive: Option<PathBuf>,
    pub clean: CleanConfig,
    pub encode: EncodeParams,
    pub max_bucket: usize,
    pub dedup: DedupParams,
    pub stats: StatsParams,
    pub workers: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    workdir: PathBuf,
    #[serde(default = "default_workers")]
    workers: usize,
    timeout_secs: Option<u64>,
    dump: DumpSection,
    #[serde(default)]
    clean: CleanOverrides,
    #[serde(default)]
    encode: EncodeSection,
    #[serde(default)]
    cluster: ClusterSection,
    dedup: DedupSection,
    #[serde(default)]
    stats: StatsSection,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DumpSection {
    language: String,
    project: Project,
    version: String,
    url_template: Option<String>,
    archive: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct EncodeSection {
    min_freq: Option<u64>,
    max_words: Option<u64>,
    prefix: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ClusterSection {
    max_bucket: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DedupSection {
    seed: u64,
    perms: Option<usize>,
    threshold: Option<f64>,
    sensitivity: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct StatsSection {
    top: Option<usize>,
    axis: Option<Axis>,
}

impl PipelineConfig {
    /// Parse a TOML configuration. Relative paths are resolved against `base`.
    pub fn from_toml_str(s: &str, base: &Path) -> Result<PipelineConfig> {
        let f: FileConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let template = f.dump.url_template.as_deref().unwrap_or(DEFAULT_URL_TEMPLATE);
        let descriptor = DumpDescriptor::with_template(&f.dump.language, f.dump.project, &f.dump.version, template)
            .map_err(|e| Error::Config(e.to_string()))?;
        let mut overrides = f.clean;
        if overrides.timeout_secs.is_none() {
            overrides.timeout_secs = f.timeout_secs;
        }
        let clean = CleanConfig::with_overrides(&f.dump.language, f.dump.project, overrides)?;
        let defaults = EncodeParams::default();
        let cfg = PipelineConfig {
            descriptor,
            workdir: base.join(f.workdir),
            archive: f.dump.archive.map(|a| base.join(a)),
            clean,
            encode: EncodeParams {
                min_freq: f.encode.min_freq.unwrap_or(defaults.min_freq),
                max_words: f.encode.max_words.unwrap_or(defaults.max_words),
                prefix: f.encode.prefix.unwrap_or(defaults.prefix),
            },
            max_bucket: f.cluster.max_bucket.unwrap_or(DEFAULT_MAX_BUCKET),
            dedup: DedupParams {
                perms: f.dedup.perms.unwrap_or(DEFAULT_PERMUTATIONS),
                threshold: f.dedup.threshold.unwrap_or(DEFAULT_THRESHOLD),
                seed: f.dedup.seed,
                sensitivity: f.dedup.sensitivity.unwrap_or(DEFAULT_SENSITIVITY),
            },
            stats: StatsParams {
                top: f.stats.top.unwrap_or(DEFAULT_TOP),
                axis: f.stats.axis.unwrap_or_default(),
            },
            workers: f.workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a configuration file, then apply the working-directory
    /// environment override.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = Self::from_toml_str(&text, base)?;
        if let Some(dir) = std::env::var_os(WORKDIR_ENV).filter(|d| !d.is_empty()) {
            cfg.workdir = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.encode;
        if e.min_freq == 0 || e.max_words == 0 || e.prefix == 0 {
            return Err(Error::Config("encode parameters must be positive".into()));
        }
        if self.max_bucket < 2 {
            return Err(Error::Config("cluster.max_bucket must be at least 2".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        if self.stats.top == 0 {
            return Err(Error::Config("stats.top must be positive".into()));
        }
        self.dedup.validate()?;
        self.clean.validate()
    }
}
