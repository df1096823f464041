//! Line-oriented JSON helpers shared by every stage.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::marker::PhantomData;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Iterator over the records of a JSONL file. Blank lines are skipped.
pub struct JsonlReader<T> {
    lines: std::io::Lines<BufReader<File>>,
    line_no: usize,
    _marker: PhantomData<T>,
}

impl<T: DeserializeOwned> JsonlReader<T> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        Ok(JsonlReader {
            lines: BufReader::with_capacity(1 << 20, file).lines(),
            line_no: 0,
            _marker: PhantomData,
        })
    }
}

impl<T: DeserializeOwned> Iterator for JsonlReader<T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            return Some(
                serde_json::from_str(&line).map_err(|source| Error::Json { line: self.line_no, source }),
            );
        }
    }
}

/// Read a whole JSONL file into memory.
pub fn read_all<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    JsonlReader::open(path)?.collect()
}

/// Buffered JSONL writer. Each record becomes one `\n`-terminated line.
pub struct JsonlWriter {
    out: BufWriter<File>,
    written: u64,
}

impl JsonlWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::file(path, e))?;
        Ok(JsonlWriter { out: BufWriter::with_capacity(1 << 20, file), written: 0 })
    }

    pub fn write<T: Serialize>(&mut self, record: &T) -> Result<()> {
        serde_json::to_writer(&mut self.out, record).map_err(|source| Error::Json {
            line: self.written as usize + 1,
            source,
        })?;
        self.out.write_all(b"\n")?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    pub fn finish(mut self) -> Result<u64> {
        self.out.flush()?;
        Ok(self.written)
    }
}

/// Write all records to `path`, returning the number of lines.
pub fn write_all<'a, T: Serialize + 'a>(
    path: impl AsRef<Path>,
    records: impl IntoIterator<Item = &'a T>,
) -> Result<u64> {
    let mut writer = JsonlWriter::create(path)?;
    for record in records {
        writer.write(record)?;
    }
    writer.finish()
}

/// Feed the records of `path` to `f` in batches of at most `size`.
pub fn for_each_batch<T: DeserializeOwned>(
    path: impl AsRef<Path>,
    size: usize,
    mut f: impl FnMut(Vec<T>) -> Result<()>,
) -> Result<()> {
    let mut reader = JsonlReader::<T>::open(path)?;
    loop {
        let batch: Vec<T> = reader.by_ref().take(size.max(1)).collect::<Result<_>>()?;
        if batch.is_empty() {
            return Ok(());
        }
        f(batch)?;
    }
}
