use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default download location; `{wiki}` and `{version}` are substituted.
pub const DEFAULT_URL_TEMPLATE: &str =
    "https://dumps.wikimedia.org/{wiki}/{version}/{wiki}-{version}-pages-articles.xml.bz2";

/// The Wikimedia projects a dump can come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Project {
    Wikipedia,
    Wikisource,
    Wikiquote,
    Wikibooks,
    Wikinews,
}

impl Project {
    pub const ALL: [Project; 5] =
        [Project::Wikipedia, Project::Wikisource, Project::Wikiquote, Project::Wikibooks, Project::Wikinews];

    /// Suffix appended to the language code in dump names (`srwiki`, `srwikiquote`).
    pub fn dump_suffix(self) -> &'static str {
        match self {
            Project::Wikipedia => "wiki",
            Project::Wikisource => "wikisource",
            Project::Wikiquote => "wikiquote",
            Project::Wikibooks => "wikibooks",
            Project::Wikinews => "wikinews",
        }
    }

    /// Second-level domain the project is served from.
    pub fn domain(self) -> &'static str {
        match self {
            Project::Wikipedia => "wikipedia.org",
            Project::Wikisource => "wikisource.org",
            Project::Wikiquote => "wikiquote.org",
            Project::Wikibooks => "wikibooks.org",
            Project::Wikinews => "wikinews.org",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Project::Wikipedia => "wikipedia",
            Project::Wikisource => "wikisource",
            Project::Wikiquote => "wikiquote",
            Project::Wikibooks => "wikibooks",
            Project::Wikinews => "wikinews",
        }
    }

    /// Inverse of [`Project::domain`], used when reading URLs back.
    pub fn from_domain(domain: &str) -> Option<Project> {
        Project::ALL.into_iter().find(|p| domain.ends_with(p.domain()))
    }
}

impl fmt::Display for Project {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Project {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Project::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Descriptor(format!("unknown project `{s}`")))
    }
}

/// Identifies one dump: which language, which project, which dated snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpDescriptor {
    pub language_code: String,
    pub project: Project,
    pub dump_version: String,
    pub source_url: String,
}

impl DumpDescriptor {
    pub fn new(language_code: &str, project: Project, dump_version: &str) -> Result<Self> {
        Self::with_template(language_code, project, dump_version, DEFAULT_URL_TEMPLATE)
    }

    /// Build a descriptor against a mirror. The template may use `{wiki}`,
    /// `{lang}`, `{project}` and `{version}`.
    pub fn with_template(language_code: &str, project: Project, dump_version: &str, template: &str) -> Result<Self> {
        validate_language(language_code)?;
        validate_version(dump_version)?;
        let wiki = format!("{language_code}{}", project.dump_suffix());
        let source_url = template
            .replace("{wiki}", &wiki)
            .replace("{lang}", language_code)
            .replace("{project}", project.as_str())
            .replace("{version}", dump_version);
        Ok(DumpDescriptor {
            language_code: language_code.to_string(),
            project,
            dump_version: dump_version.to_string(),
            source_url,
        })
    }

    /// `srwiki`, `hrwikiquote`, ...
    pub fn wiki_name(&self) -> String {
        format!("{}{}", self.language_code, self.project.dump_suffix())
    }

    /// Local file name of the archive.
    pub fn file_name(&self) -> String {
        format!("{}-{}-pages-articles.xml.bz2", self.wiki_name(), self.dump_version)
    }

    /// Host serving the articles, e.g. `sr.wikipedia.org`.
    pub fn host(&self) -> String {
        format!("{}.{}", self.language_code, self.project.domain())
    }
}

fn validate_language(code: &str) -> Result<()> {
    if code.len() == 2 && code.bytes().all(|b| b.is_ascii_lowercase()) {
        Ok(())
    } else {
        Err(Error::Descriptor(format!("`{code}` is not an ISO 639-1 code")))
    }
}

fn validate_version(version: &str) -> Result<()> {
    let bad = || Error::Descriptor(format!("dump version `{version}` is not YYYYMMDD"));
    if version.len() != 8 || !version.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let month: u32 = version[4..6].parse().map_err(|_| bad())?;
    let day: u32 = version[6..8].parse().map_err(|_| bad())?;
    if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
        return Err(bad());
    }
    Ok(())
}
