//! Resumable dump download.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use log::{info, warn};

use super::DumpDescriptor;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub max_attempts: u32,
    pub backoff: Duration,
    pub read_timeout: Duration,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions { max_attempts: 5, backoff: Duration::from_secs(2), read_timeout: Duration::from_secs(60) }
    }
}

/// Download the archive described by `descriptor` into directory `dest`.
///
/// Bytes go to `<name>.part` first and the file is renamed once its length
/// matches what the server announced, so an existing final file is always
/// complete and short-circuits the download. Interrupted transfers resume
/// with a `Range` request.
pub fn fetch_dump(descriptor: &DumpDescriptor, dest: &Path, opts: &FetchOptions) -> Result<PathBuf> {
    let target = dest.join(descriptor.file_name());
    if target.is_file() {
        info!("{} already present, skipping download", target.display());
        return Ok(target);
    }
    fs::create_dir_all(dest).map_err(|e| Error::file(dest, e))?;
    let part = dest.join(format!("{}.part", descriptor.file_name()));
    let agent = ureq::AgentBuilder::new().timeout_read(opts.read_timeout).build();

    let mut last_error = String::new();
    let mut last_short: Option<(u64, u64)> = None;
    for attempt in 1..=opts.max_attempts.max(1) {
        if attempt > 1 {
            thread::sleep(opts.backoff * (attempt - 1));
        }
        match try_download(&agent, &descriptor.source_url, &part) {
            Ok(Transfer::Complete) => {
                fs::rename(&part, &target).map_err(|e| Error::file(&target, e))?;
                return Ok(target);
            }
            Ok(Transfer::Short { expected, actual }) => {
                warn!("attempt {attempt}: got {actual} of {expected} bytes, resuming");
                last_short = Some((expected, actual));
                last_error = format!("incomplete body ({actual} of {expected} bytes)");
            }
            Err(Attempt::Fatal(e)) => return Err(e),
            Err(Attempt::Retry(msg)) => {
                warn!("attempt {attempt} failed: {msg}");
                last_error = msg;
            }
        }
    }
    if let Some((expected, actual)) = last_short {
        return Err(Error::Integrity { path: part, expected, actual });
    }
    Err(Error::Network { attempts: opts.max_attempts.max(1), message: last_error })
}

enum Transfer {
    Complete,
    Short { expected: u64, actual: u64 },
}

enum Attempt {
    Retry(String),
    Fatal(Error),
}

fn try_download(agent: &ureq::Agent, url: &str, part: &Path) -> Result<Transfer, Attempt> {
    let have = fs::metadata(part).map(|m| m.len()).unwrap_or(0);
    let mut request = agent.get(url);
    if have > 0 {
        request = request.set("Range", &format!("bytes={have}-"));
    }
    let response = match request.call() {
        Ok(r) => r,
        Err(ureq::Error::Status(404, _)) => {
            return Err(Attempt::Fatal(Error::AbsentProject { url: url.to_string() }));
        }
        Err(ureq::Error::Status(416, _)) => {
            // Local partial is unusable against this server; start over.
            let _ = fs::remove_file(part);
            return Err(Attempt::Retry("range not satisfiable, restarting".into()));
        }
        Err(ureq::Error::Status(code, _)) if code >= 500 || code == 429 => {
            return Err(Attempt::Retry(format!("HTTP {code}")));
        }
        Err(ureq::Error::Status(code, _)) => {
            return Err(Attempt::Fatal(Error::Network { attempts: 1, message: format!("HTTP {code} for {url}") }));
        }
        Err(ureq::Error::Transport(t)) => return Err(Attempt::Retry(t.to_string())),
    };

    let resumed = response.status() == 206;
    let expected = if resumed {
        response.header("Content-Range").and_then(total_from_content_range)
    } else {
        response.header("Content-Length").and_then(|v| v.trim().parse::<u64>().ok())
    };

    let io_err = |e: io::Error| Attempt::Fatal(Error::file(part, e));
    let mut file = if resumed {
        OpenOptions::new().append(true).open(part).map_err(io_err)?
    } else {
        File::create(part).map_err(io_err)?
    };
    let mut body = response.into_reader();
    let copied = io::copy(&mut body, &mut file);
    file.flush().map_err(io_err)?;
    let actual = fs::metadata(part).map(|m| m.len()).unwrap_or(0);

    match (copied, expected) {
        (_, Some(expected)) if actual > expected => {
            let _ = fs::remove_file(part);
            Err(Attempt::Fatal(Error::Integrity { path: part.to_path_buf(), expected, actual }))
        }
        (_, Some(expected)) if actual < expected => Ok(Transfer::Short { expected, actual }),
        (Err(e), None) => Err(Attempt::Retry(e.to_string())),
        (_, None) => {
            warn!("server sent no length for {url}; cannot verify size");
            Ok(Transfer::Complete)
        }
        _ => Ok(Transfer::Complete),
    }
}

/// `bytes 100-199/2000` -> 2000
fn total_from_content_range(value: &str) -> Option<u64> {
    value.rsplit('/').next()?.trim().parse().ok()
}
