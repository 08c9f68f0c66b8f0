//! Line-oriented JSON helpers. Output goes through `serde_json::Value`, whose
//! map type is ordered, so keys are always written sorted.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Serializes `value` as a single line with sorted keys.
pub fn to_line<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes to JSON");
    serde_json::to_string(&v).expect("JSON value serializes")
}

pub fn write_lines<T: Serialize>(path: &Path, items: &[T]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        w.write_all(to_line(item).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("line {line}: {cause}")]
    Parse { line: usize, cause: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads one `T` per non-blank line.
pub fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ReadError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ReadError::Parse {
            line: i + 1,
            cause: e.to_string(),
        })?);
    }
    Ok(out)
}
