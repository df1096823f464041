use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;



use crate::error::{Error, Result};

/// Default minimum corpus frequency for a token to get an index.
pub const DEFAULT_MIN_FREQ: u64 = 3;

/// Index of every token not in the vocabulary.
pub const UNKNOWN: u32 = 0;

/// Token indices `1..=len()`, most frequent first, ties in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_index: HashMap<String, u32>,
    frequencies: HashMap<String, u64>,
    min_freq: u64,
}

impl Vocabulary {
    /// Keep the tokens counted at least `min_freq` times.
    pub fn from_counts(counts: HashMap<String, u64>, min_freq: u64) -> Vocabulary {
        let mut kept: Vec<(String, u64)> = counts.into_iter().filter(|&(_, n)| n >= min_freq).collect();
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let token_to_index = kept.iter().enumerate().map(|(i, (t, _))| (t.clone(), i as u32 + 1)).collect();
        Vocabulary { token_to_index, frequencies: kept.into_iter().collect(), min_freq }
    }

    pub fn index(&self, token: &str) -> u32 {
        self.token_to_index.get(token).copied().unwrap_or(UNKNOWN)
    }

    pub fn frequency(&self, token: &str) -> Option<u64> {
        self.frequencies.get(token).copied()
    }

    pub fn min_freq(&self) -> u64 {
        self.min_freq
    }

    pub fn len(&self) -> usize {
        self.token_to_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_to_index.is_empty()
    }

    /// Tokens in index order; position `i` holds index `i + 1`.
    pub fn tokens(&self) -> Vec<&str> {
        let mut tokens = vec![""; self.len()];
        for (t, &i) in &self.token_to_index {
            tokens[i as usize - 1] = t;
        }
        tokens
    }

    /// Write as a JSON object `{token: [index, frequency]}`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map: BTreeMap<&str, (u32, u64)> =
            self.token_to_index.iter().map(|(t, &i)| (t.as_str(), (i, self.frequencies[t]))).collect();
        let file = File::create(path).map_err(|e| Error::file(path, e))?;
        let mut out = BufWriter::new(file);
        serde_json::to_writer(&mut out, &map).map_err(|source| Error::Json { line: 1, source })?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    /// Read a file written by [`Vocabulary::save`]. The minimum frequency is
    /// taken to be the smallest stored count.
    pub fn load(path: &Path) -> Result<Vocabulary> {
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        let map: HashMap<String, (u32, u64)> =
            serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json { line: 1, source })?;
        let mut seen = vec![false; map.len()];
        for (token, &(i, _)) in &map {
            let slot = (i as usize).checked_sub(1).and_then(|i| seen.get_mut(i));
            match slot {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::Config(format!("{}: bad index {i} for `{token}`", path.display()))),
            }
        }
        let min_freq = map.values().map(|&(_, f)| f).min().unwrap_or(DEFAULT_MIN_FREQ);
        Ok(Vocabulary {
            token_to_index: map.iter().map(|(t, &(i, _))| (t.clone(), i)).collect(),
            frequencies: map.into_iter().map(|(t, (_, f))| (t, f)).collect(),
            min_freq,
        })
    }
}
