use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use corpusforge_core::clean::{clean_file, CleanConfig};
use corpusforge_core::cluster::{cluster_file, DEFAULT_MAX_BUCKET};
use corpusforge_core::dedup::{dedup_files, DedupParams, DEFAULT_PERMUTATIONS, DEFAULT_SENSITIVITY, DEFAULT_THRESHOLD};
use corpusforge_core::encode::{encode_file, EncodeParams, DEFAULT_MAX_WORDS, DEFAULT_MIN_FREQ, DEFAULT_PREFIX};
use corpusforge_core::ingest::{fetch_dump, parse_dump, serialize_pages, FetchOptions, DEFAULT_URL_TEMPLATE};
use corpusforge_core::pipeline::{self, Stage, StageStatus, WORKDIR_ENV};
use corpusforge_core::stats::{cosine_delta, profile_file, reference_axis, report_files, Axis, DEFAULT_TOP};
use corpusforge_core::{DumpDescriptor, Error, PipelineConfig, Project};
use serde::Serialize;

const EXIT_CONFIG: u8 = 2;
const EXIT_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "corpusforge", version, about = "Build cleaned, deduplicated text corpora from MediaWiki dumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline from a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated subset of fetch,ingest,clean,encode,cluster,dedup,stats.
        #[arg(long, value_delimiter = ',', value_parser = parse_stage)]
        stages: Option<Vec<Stage>>,
    },
    /// Download a pages-articles dump.
    Fetch {
        #[command(flatten)]
        dump: DumpArgs,
        #[arg(long, default_value = ".")]
        dest: PathBuf,
        #[arg(long, default_value = DEFAULT_URL_TEMPLATE)]
        url_template: String,
    },
    /// Extract main-namespace articles from a dump into JSONL.
    Ingest {
        archive: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Clean raw pages into plain text.
    Clean {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "sr")]
        language: String,
        #[arg(long, default_value = "wikipedia", value_parser = parse_project)]
        project: Project,
        /// TOML cleaning configuration; replaces --language and --project.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        workers: Workers,
    },
    /// Build the vocabulary and encode article prefixes.
    Encode {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MIN_FREQ)]
        min_freq: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_WORDS)]
        max_words: u64,
        #[arg(long, default_value_t = DEFAULT_PREFIX)]
        prefix: usize,
        #[command(flatten)]
        workers: Workers,
    },
    /// Group encoded articles into category buckets.
    Cluster {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_BUCKET)]
        max_bucket: usize,
    },
    /// Score near duplicates inside buckets and prune above the knee.
    Dedup {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        encoded: PathBuf,
        #[arg(long)]
        buckets: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        removed: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
        perms: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_SENSITIVITY)]
        sensitivity: f64,
        #[command(flatten)]
        workers: Workers,
    },
    /// Article and word counts before and after a filtering step.
    Stats {
        before: PathBuf,
        after: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Cosine delta between the token profiles of two corpora.
    Delta {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOP)]
        top: usize,
        #[arg(long, default_value = "first", value_parser = parse_axis)]
        axis: Axis,
        #[command(flatten)]
        workers: Workers,
    },
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    language: String,
    #[arg(long, value_parser = parse_project)]
    project: Project,
    /// Dump date as YYYYMMDD.
    #[arg(long)]
    version: String,
}

#[derive(Args)]
struct Workers {
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_project(s: &str) -> Result<Project, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase())).map_err(|_| format!("unknown project `{s}`"))
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase())).map_err(|_| format!("unknown axis `{s}`"))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run_pipeline(config: &Path, stages: Option<&[Stage]>) -> Result<(), Error> {
    let cfg = PipelineConfig::load(config)?;
    if std::env::var_os(WORKDIR_ENV).is_some() {
        log::info!("working directory {} (from {WORKDIR_ENV})", cfg.workdir.display());
    }
    let summary = pipeline::run(&cfg, stages)?;
    for r in &summary.stages {
        let status = match r.status {
            StageStatus::Ran => "ran",
            StageStatus::Cached => "cached",
            StageStatus::Skipped => "skipped",
            StageStatus::Failed => "failed",
        };
        println!("{:<8} {:<8} {:>8.2}s", r.stage.name(), status, r.duration_secs);
    }
    println!("summary written to {}", cfg.workdir.join(pipeline::files::SUMMARY).display());
    Ok(())
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { config, stages } => run_pipeline(&config, stages.as_deref()),
        Command::Fetch { dump, dest, url_template } => {
            let d = DumpDescriptor::with_template(&dump.language, dump.project, &dump.version, &url_template)?;
            let path = fetch_dump(&d, &dest, &FetchOptions::default())?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Ingest { archive, output } => {
            let mut pages = parse_dump(&archive)?;
            print_json(&serialize_pages(&mut pages, &output)?);
            Ok(())
        }
        Command::Clean { input, output, language, project, config, workers } => {
            let cfg = match config {
                Some(path) => CleanConfig::from_toml_file(path)?,
                None => {
                    let cfg = CleanConfig::for_language(&language, project);
                    cfg.validate()?;
                    cfg
                }
            };
            print_json(&clean_file(&input, &output, &cfg, workers.workers)?);
            Ok(())
        }
        Command::Encode { input, output, vocab, min_freq, max_words, prefix, workers } => {
            let params = EncodeParams { min_freq, max_words, prefix };
            print_json(&encode_file(&input, &output, &vocab, &params, workers.workers)?);
            Ok(())
        }
        Command::Cluster { input, output, max_bucket } => {
            print_json(&cluster_file(&input, &output, max_bucket)?);
            Ok(())
        }
        Command::Dedup { clean, encoded, buckets, output, removed, seed, perms, threshold, sensitivity, workers } => {
            let params = DedupParams { perms, threshold, seed, sensitivity };
            let summary = dedup_files(&clean, &encoded, &buckets, &output, &removed, &params, workers.workers)?;
            print_json(&summary);
            Ok(())
        }
        Command::Stats { before, after, json } => {
            let report = report_files(&before, &after)?;
            if json {
                print_json(&report);
            } else {
                print!("{}", report.render());
            }
            Ok(())
        }
        Command::Delta { first, second, top, axis, workers } => {
            let p = profile_file(&first, top, workers.workers)?;
            let q = profile_file(&second, top, workers.workers)?;
            println!("{:.6}", cosine_delta(&p, &q, &reference_axis(&p, &q, axis))?);
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Descriptor(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
