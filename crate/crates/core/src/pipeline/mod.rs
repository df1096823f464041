//! One-command orchestration of every stage with cached intermediates.
//!
//! Each stage writes its outputs under the working directory, first to
//! `*.partial` files that are renamed once the stage succeeds. A stamp
//! records the hashes of the stage's inputs, configuration and outputs; a
//! later run skips the stage while all three still match. Outputs of a
//! failed stage are moved to `quarantine/`.

mod config;
mod stamp;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use config::{PipelineConfig, StatsParams, WORKDIR_ENV};
pub use stamp::{hash_file, hash_files, Stamp};

use crate::error::{Error, Result};
use crate::ingest::{fetch_dump, parse_dump, serialize_pages, FetchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Fetch,
    Ingest,
    Clean,
    Encode,
    Cluster,
    Dedup,
    Stats,
}

impl Stage {
    pub const ALL: [Stage; 7] =
        [Stage::Fetch, Stage::Ingest, Stage::Clean, Stage::Encode, Stage::Cluster, Stage::Dedup, Stage::Stats];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Fetch => "fetch",
            Stage::Ingest => "ingest",
            Stage::Clean => "clean",
            Stage::Encode => "encode",
            Stage::Cluster => "cluster",
            Stage::Dedup => "dedup",
            Stage::Stats => "stats",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}`")))
    }
}

/// File names inside the working directory.
pub mod files {
    pub const RAW: &str = "raw.jsonl";
    pub const CLEAN: &str = "clean.jsonl";
    pub const ENCODED: &str = "encoded.jsonl";
    pub const VOCAB: &str = "vocab.json";
    pub const BUCKETS: &str = "buckets.jsonl";
    pub const CORPUS: &str = "corpus.jsonl";
    pub const REMOVED: &str = "removed.jsonl";
    pub const DEDUP_SUMMARY: &str = "dedup_summary.json";
    pub const REPORT: &str = "report.json";
    pub const SUMMARY: &str = "summary.json";
    pub const STAMPS: &str = "stamps";
    pub const QUARANTINE: &str = "quarantine";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ran,
    Cached,
    /// Not requested, or replaced by a configured input.
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: Stage,
    pub status: StageStatus,
    pub duration_secs: f64,
    pub counts: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub workdir: PathBuf,
    pub stages: Vec<StageReport>,
}

impl RunSummary {
    pub fn status(&self, stage: Stage) -> Option<StageStatus> {
        self.stages.iter().find(|r| r.stage == stage).map(|r| r.status)
    }
}

struct Runner<'a> {
    cfg: &'a PipelineConfig,
    dir: &'a Path,
}

impl Runner<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn archive(&self) -> PathBuf {
        self.cfg.archive.clone().unwrap_or_else(|| self.path(&self.cfg.descriptor.file_name()))
    }

    fn inputs(&self, stage: Stage) -> Vec<PathBuf> {
        use files::*;
        match stage {
            Stage::Fetch => vec![],
            Stage::Ingest => vec![self.archive()],
            Stage::Clean => vec![self.path(RAW)],
            Stage::Encode => vec![self.path(CLEAN)],
            Stage::Cluster => vec![self.path(ENCODED)],
            Stage::Dedup => vec![self.path(CLEAN), self.path(ENCODED), self.path(BUCKETS)],
            Stage::Stats => vec![self.path(CLEAN), self.path(CORPUS), self.path(REMOVED)],
        }
    }

    fn outputs(&self, stage: Stage) -> Vec<&'static str> {
        use files::*;
        match stage {
            Stage::Fetch => vec![],
            Stage::Ingest => vec![RAW],
            Stage::Clean => vec![CLEAN],
            Stage::Encode => vec![ENCODED, VOCAB],
            Stage::Cluster => vec![BUCKETS],
            Stage::Dedup => vec![CORPUS, REMOVED, DEDUP_SUMMARY],
            Stage::Stats => vec![REPORT],
        }
    }

    fn config_value(&self, stage: Stage) -> serde_json::Value {
        let c = self.cfg;
        match stage {
            Stage::Fetch => json!(c.descriptor),
            Stage::Ingest => json!({ "min_chars": crate::ingest::MIN_TEXT_CHARS }),
            Stage::Clean => json!(c.clean),
            Stage::Encode => json!(c.encode),
            Stage::Cluster => json!({ "max_bucket": c.max_bucket }),
            Stage::Dedup => json!(c.dedup),
            Stage::Stats => json!(c.stats),
        }
    }

    fn stamp_path(&self, stage: Stage) -> PathBuf {
        self.path(files::STAMPS).join(format!("{stage}.json"))
    }

    /// Run one stage, or reuse its outputs.
    fn stage(&self, stage: Stage) -> Result<StageReport> {
        let started = Instant::now();
        if stage == Stage::Fetch {
            return self.fetch(started);
        }
        let inputs = self.inputs(stage);
        if let Some(missing) = inputs.iter().find(|p| !p.exists()) {
            return Err(Error::Config(format!(
                "stage `{stage}` needs {}, which does not exist; run the earlier stages first",
                missing.display()
            )));
        }
        let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
        let input_hash = hash_files(&input_refs)?;
        let config_hash = stamp::hash_value(&self.config_value(stage));
        let stamp_path = self.stamp_path(stage);
        if let Some(s) = stamp::read(&stamp_path) {
            if s.inputs == input_hash && s.config == config_hash && s.outputs_intact(self.dir) {
                log::info!("{stage}: cached");
                return Ok(StageReport {
                    stage,
                    status: StageStatus::Cached,
                    duration_secs: started.elapsed().as_secs_f64(),
                    counts: s.counts,
                });
            }
        }
        let _ = fs::remove_file(&stamp_path);

        log::info!("{stage}: running");
        let outputs = self.outputs(stage);
        let partial: Vec<PathBuf> = outputs.iter().map(|n| self.path(&format!("{n}.partial"))).collect();
        let counts = match self.execute(stage, &partial) {
            Ok(c) => c,
            Err(e) => {
                self.quarantine(stage, &outputs, &partial);
                return Err(Error::Stage { stage: stage.to_string(), source: Box::new(e) });
            }
        };
        let mut hashes = BTreeMap::new();
        for (name, tmp) in outputs.iter().zip(&partial) {
            let dest = self.path(name);
            fs::rename(tmp, &dest).map_err(|e| Error::file(&dest, e))?;
            hashes.insert(name.to_string(), hash_file(&dest)?);
        }
        let stamp = Stamp { inputs: input_hash, config: config_hash, outputs: hashes, counts: counts.clone() };
        write_json(&stamp_path, &stamp)?;
        Ok(StageReport { stage, status: StageStatus::Ran, duration_secs: started.elapsed().as_secs_f64(), counts })
    }

    fn fetch(&self, started: Instant) -> Result<StageReport> {
        if let Some(archive) = &self.cfg.archive {
            return Ok(StageReport {
                stage: Stage::Fetch,
                status: StageStatus::Skipped,
                duration_secs: 0.0,
                counts: json!({ "archive": archive }),
            });
        }
        let dest = self.archive();
        let status = if dest.exists() { StageStatus::Cached } else { StageStatus::Ran };
        let path = fetch_dump(&self.cfg.descriptor, self.dir, &FetchOptions::default())
            .map_err(|e| Error::Stage { stage: "fetch".into(), source: Box::new(e) })?;
        let bytes = fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        Ok(StageReport {
            stage: Stage::Fetch,
            status,
            duration_secs: started.elapsed().as_secs_f64(),
            counts: json!({ "archive": path, "bytes": bytes }),
        })
    }

    fn execute(&self, stage: Stage, out: &[PathBuf]) -> Result<serde_json::Value> {
        use files::*;
        let c = self.cfg;
        let w = c.workers;
        let value = match stage {
            Stage::Fetch => unreachable!("fetch is handled separately"),
            Stage::Ingest => {
                let mut pages = parse_dump(self.archive())?;
                json!(serialize_pages(&mut pages, &out[0])?)
            }
            Stage::Clean => json!(crate::clean::clean_file(&self.path(RAW), &out[0], &c.clean, w)?),
            Stage::Encode => json!(crate::encode::encode_file(&self.path(CLEAN), &out[0], &out[1], &c.encode, w)?),
            Stage::Cluster => json!(crate::cluster::cluster_file(&self.path(ENCODED), &out[0], c.max_bucket)?),
            Stage::Dedup => {
                let summary = crate::dedup::dedup_files(
                    &self.path(CLEAN),
                    &self.path(ENCODED),
                    &self.path(BUCKETS),
                    &out[0],
                    &out[1],
                    &c.dedup,
                    w,
                )?;
                write_json(&out[2], &summary)?;
                json!(summary)
            }
            Stage::Stats => {
                let report = stats_report(&self.path(CLEAN), &self.path(CORPUS), &self.path(REMOVED), &c.stats, w)?;
                write_json(&out[0], &report)?;
                report
            }
        };
        Ok(value)
    }

    fn quarantine(&self, stage: Stage, outputs: &[&str], partial: &[PathBuf]) {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis());
        let dir = self.path(files::QUARANTINE).join(format!("{stage}-{stamp}"));
        let finals = outputs.iter().map(|n| self.path(n));
        for path in partial.iter().cloned().chain(finals) {
            if !path.exists() {
                continue;
            }
            let moved = fs::create_dir_all(&dir).and_then(|_| {
                let name = path.file_name().expect("output paths have file names");
                fs::rename(&path, dir.join(name))
            });
            if let Err(e) = moved {
                log::error!("could not quarantine {}: {e}", path.display());
                let _ = fs::remove_file(&path);
            }
        }
        log::warn!("{stage}: outputs moved to {}", dir.display());
    }
}

/// Counts before and after dedup, the removal check and the profile
/// distance between the two corpora.
pub fn stats_report(
    clean: &Path,
    corpus: &Path,
    removed: &Path,
    params: &StatsParams,
    workers: usize,
) -> Result<serde_json::Value> {
    use crate::stats::{cosine_delta, profile_file, reference_axis, report_files};
    let filter = report_files(clean, corpus)?;
    let removed_count = crate::jsonl::JsonlReader::<serde_json::Value>::open(removed)?.count() as u64;
    let conserved = filter.after.articles + removed_count == filter.before.articles;
    if !conserved {
        log::warn!(
            "article counts do not add up: {} kept + {removed_count} removed != {} before",
            filter.after.articles,
            filter.before.articles
        );
    }
    let delta = profile_file(clean, params.top, workers).and_then(|p| {
        let q = profile_file(corpus, params.top, workers)?;
        cosine_delta(&p, &q, &reference_axis(&p, &q, params.axis))
    });
    let (delta, delta_error) = match delta {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(json!({
        "filter": filter,
        "removed": removed_count,
        "conserved": conserved,
        "table": filter.render(),
        "cosine_delta": { "value": delta, "error": delta_error, "top": params.top, "axis": params.axis },
    }))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::file(parent, e))?;
    }
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| Error::Json { line: 0, source })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|e| Error::file(path, e))
}

/// Run the selected stages (all when `stages` is `None`) in pipeline order.
/// A summary is written to `summary.json` whether or not a stage fails.
pub fn run(cfg: &PipelineConfig, stages: Option<&[Stage]>) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.workdir).map_err(|e| Error::file(&cfg.workdir, e))?;
    let runner = Runner { cfg, dir: &cfg.workdir };
    let mut summary = RunSummary { workdir: cfg.workdir.clone(), stages: Vec::new() };
    let mut failure = None;
    for stage in Stage::ALL {
        let selected = stages.map_or(true, |s| s.contains(&stage));
        if !selected || failure.is_some() {
            summary.stages.push(StageReport {
                stage,
                status: StageStatus::Skipped,
                duration_secs: 0.0,
                counts: serde_json::Value::Null,
            });
            continue;
        }
        match runner.stage(stage) {
            Ok(report) => summary.stages.push(report),
            Err(e) => {
                log::error!("{e}");
                summary.stages.push(StageReport {
                    stage,
                    status: StageStatus::Failed,
                    duration_secs: 0.0,
                    counts: json!({ "error": e.to_string() }),
                });
                failure = Some(e);
            }
        }
    }
    write_json(&cfg.workdir.join(files::SUMMARY), &summary)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}
