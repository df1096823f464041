use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Project;

const LANGUAGE_DATA: &str = include_str!("../../data/languages.toml");

/// Per-article time budget when nothing else is configured.
pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

/// How HTML-like tags are treated in the final stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagPolicy {
    /// Removed together with everything inside them.
    pub destroy: BTreeSet<String>,
    /// Kept verbatim, markup included.
    pub preserve: BTreeSet<String>,
}

impl Default for TagPolicy {
    fn default() -> Self {
        TagPolicy {
            destroy: ["noinclude", "ref", "gallery", "timeline"].map(String::from).into(),
            preserve: ["math", "code", "syntaxhighlight", "b", "sup", "sub"].map(String::from).into(),
        }
    }
}

impl TagPolicy {
    pub fn validate(&self) -> Result<()> {
        let clash: Vec<_> = self.destroy.intersection(&self.preserve).collect();
        if clash.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("tags both destroyed and preserved: {clash:?}")))
        }
    }

    pub fn action(&self, name: &str) -> super::tags::TagAction {
        use super::tags::TagAction;
        let name = name.to_ascii_lowercase();
        if self.destroy.contains(&name) {
            TagAction::Destroy
        } else if self.preserve.contains(&name) {
            TagAction::Preserve
        } else {
            TagAction::Strip
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionMode {
    ExcludeListed,
    IncludeOnlyListed,
}

/// Which sections survive: everything but the listed titles, or only them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionPolicy {
    pub mode: SectionMode,
    /// Heading titles, compared case-insensitively.
    pub titles: BTreeSet<String>,
    /// In include mode, keep the lead when it carries quote bullets.
    #[serde(default)]
    pub keep_lead: bool,
}

impl SectionPolicy {
    pub fn exclude<I: IntoIterator<Item = S>, S: AsRef<str>>(titles: I) -> Self {
        SectionPolicy { mode: SectionMode::ExcludeListed, titles: normalize_titles(titles), keep_lead: false }
    }

    pub fn include_only<I: IntoIterator<Item = S>, S: AsRef<str>>(titles: I) -> Self {
        SectionPolicy { mode: SectionMode::IncludeOnlyListed, titles: normalize_titles(titles), keep_lead: false }
    }

    pub fn matches(&self, heading: &str) -> bool {
        self.titles.contains(&super::sections::normalize_heading(heading))
    }
}

fn normalize_titles<I: IntoIterator<Item = S>, S: AsRef<str>>(titles: I) -> BTreeSet<String> {
    titles.into_iter().map(|t| super::sections::normalize_heading(t.as_ref())).collect()
}

/// Templates whose parameters are kept as text instead of being dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateKeepList {
    pub names: BTreeSet<String>,
}

impl Default for TemplateKeepList {
    fn default() -> Self {
        TemplateKeepList::new(["ppoem", "cquote"])
    }
}

impl TemplateKeepList {
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(names: I) -> Self {
        TemplateKeepList { names: names.into_iter().map(|n| normalize_template_name(n.as_ref())).collect() }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(&normalize_template_name(name))
    }
}

/// `Template:Cquote`, ` cquote `, `Cquote` all compare equal.
pub fn normalize_template_name(name: &str) -> String {
    let name = name.trim();
    let name = match name.split_once(':') {
        Some((ns, rest)) if ns.trim().eq_ignore_ascii_case("template") => rest,
        _ => name,
    };
    name.replace('_', " ").split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// A regex rewrite applied in the final stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    pub pattern: String,
    pub replace: String,
}

/// Namespace aliases and section lists for one language.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LanguageTables {
    pub category: Vec<String>,
    pub file: Vec<String>,
    pub excluded_sections: Vec<String>,
    pub quote_sections: Vec<String>,
    pub replacements: Vec<Replacement>,
}

impl LanguageTables {
    /// Built-in tables for `lang`, merged over the language-neutral defaults.
    pub fn for_language(lang: &str) -> LanguageTables {
        let all = builtin_tables();
        let mut tables = all.get("default").cloned().unwrap_or_default();
        if let Some(extra) = all.get(lang) {
            tables.merge(extra);
        }
        tables
    }

    fn merge(&mut self, other: &LanguageTables) {
        fn extend(into: &mut Vec<String>, from: &[String]) {
            for v in from {
                if !into.contains(v) {
                    into.push(v.clone());
                }
            }
        }
        extend(&mut self.category, &other.category);
        extend(&mut self.file, &other.file);
        extend(&mut self.excluded_sections, &other.excluded_sections);
        extend(&mut self.quote_sections, &other.quote_sections);
        self.replacements.extend(other.replacements.iter().cloned());
    }

    pub(crate) fn is_category(&self, namespace: &str) -> bool {
        matches_ns(&self.category, namespace)
    }

    pub(crate) fn is_file(&self, namespace: &str) -> bool {
        matches_ns(&self.file, namespace)
    }
}

fn matches_ns(list: &[String], namespace: &str) -> bool {
    let ns = namespace.trim().replace('_', " ").to_lowercase();
    list.iter().any(|n| n.to_lowercase() == ns)
}

fn builtin_tables() -> &'static BTreeMap<String, LanguageTables> {
    static TABLES: OnceLock<BTreeMap<String, LanguageTables>> = OnceLock::new();
    TABLES.get_or_init(|| toml::from_str(LANGUAGE_DATA).expect("built-in language tables parse"))
}

/// Optional replacements for the per-language defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanOverrides {
    pub tags: Option<TagPolicy>,
    pub sections: Option<SectionPolicy>,
    pub templates: Option<TemplateKeepList>,
    pub tables: Option<LanguageTables>,
    pub timeout_secs: Option<u64>,
}

/// Everything the cleaner needs for one language+project dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanConfig {
    pub language: String,
    pub project: Project,
    pub tags: TagPolicy,
    pub sections: SectionPolicy,
    pub templates: TemplateKeepList,
    pub tables: LanguageTables,
    pub timeout_secs: u64,
}

impl CleanConfig {
    /// Defaults for a dataset. Wikiquote keeps only quotation sections,
    /// every other project drops the listed non-prose sections.
    pub fn for_language(language: &str, project: Project) -> CleanConfig {
        let tables = LanguageTables::for_language(language);
        let sections = if project == Project::Wikiquote {
            SectionPolicy::include_only(&tables.quote_sections)
        } else {
            SectionPolicy::exclude(&tables.excluded_sections)
        };
        CleanConfig {
            language: language.to_string(),
            project,
            tags: TagPolicy::default(),
            sections,
            templates: TemplateKeepList::default(),
            tables,
            timeout_secs: DEFAULT_TIMEOUT_SECS,
        }
    }

    /// Load a TOML file. Only `language` and `project` are required; any
    /// other table given replaces the corresponding default wholesale.
    pub fn from_toml_str(s: &str) -> Result<CleanConfig> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            language: String,
            project: Project,
            tags: Option<TagPolicy>,
            sections: Option<SectionPolicy>,
            templates: Option<TemplateKeepList>,
            tables: Option<LanguageTables>,
            timeout_secs: Option<u64>,
        }
        let f: File = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let overrides = CleanOverrides {
            tags: f.tags,
            sections: f.sections,
            templates: f.templates,
            tables: f.tables,
            timeout_secs: f.timeout_secs,
        };
        CleanConfig::with_overrides(&f.language, f.project, overrides)
    }

    pub fn with_overrides(language: &str, project: Project, o: CleanOverrides) -> Result<CleanConfig> {
        let mut cfg = CleanConfig::for_language(language, project);
        if let Some(t) = o.tags {
            cfg.tags = t;
        }
        if let Some(t) = o.tables {
            cfg.tables = t;
            cfg.sections = if cfg.project == Project::Wikiquote {
                SectionPolicy::include_only(&cfg.tables.quote_sections)
            } else {
                SectionPolicy::exclude(&cfg.tables.excluded_sections)
            };
        }
        if let Some(mut s) = o.sections {
            s.titles = normalize_titles(&s.titles);
            cfg.sections = s;
        }
        if let Some(t) = o.templates {
            cfg.templates = TemplateKeepList::new(&t.names);
        }
        if let Some(t) = o.timeout_secs {
            cfg.timeout_secs = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<CleanConfig> {
        let path = path.as_ref();
        let s = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn validate(&self) -> Result<()> {
        self.tags.validate()?;
        for r in &self.tables.replacements {
            regex::Regex::new(&r.pattern).map_err(|e| Error::Config(format!("replacement `{}`: {e}", r.pattern)))?;
        }
        if self.timeout_secs == 0 {
            return Err(Error::Config("timeout_secs must be positive".into()));
        }
        Ok(())
    }
}
